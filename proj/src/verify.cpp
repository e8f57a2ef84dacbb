// Copyright 2026 The ulab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ulab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "ulab/arrange.hpp"
#include "ulab/gowers.hpp"
#include "ulab/pipeline.hpp"
#include "ulab/testing.hpp"

namespace ulab {
namespace {

// Counts trials and violations and keeps the worst measured value.
struct Tally {
  int64_t trials = 0, violations = 0;
  double worst = 0;

  void check(bool ok) {
    ++trials;
    violations += !ok;
  }
  // |got - want| <= tol, recording the largest error.
  void close(double err, double tol) {
    worst = std::max(worst, err);
    check(err <= tol);
  }
};

CheckResult result(const Tally& t, Json measured = Json::object()) {
  CheckResult r;
  r.trials = t.trials;
  r.violations = t.violations;
  r.passed = t.trials > 0 && t.violations == 0;
  r.measured = std::move(measured);
  return r;
}

CheckResult tolerance_result(const Tally& t, double tol) {
  return result(t, {{"max_error", t.worst}, {"tolerance", tol}});
}

GroupFn transform(const GroupFn& f, const VerifyOptions& opt) {
  GroupFn h = dft(f);
  if (opt.corrupt_dft) h.v[h.size() - 1] *= 1.5;
  return h;
}

double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string rational_text(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

// ---- core

CheckResult core_inversion(const VerifyOptions& opt) {
  Rng rng(opt.seed, 101);
  const GroupParams g(5, 2);
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const GroupFn f = testing::random_fn(g, rng);
    const double e1 = max_abs(idft(transform(f, opt)).v - f.v);
    const double e2 = max_abs(transform(idft(f), opt).v - f.v);
    t.close(std::max(e1, e2), 1e-12);
  }
  return tolerance_result(t, 1e-12);
}

CheckResult core_parseval(const VerifyOptions& opt) {
  Rng rng(opt.seed, 102);
  const GroupParams g(5, 2);
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const GroupFn f = testing::random_fn(g, rng);
    const double lhs = transform(f, opt).v.squaredNorm();
    const double rhs = f.v.squaredNorm() / double(g.size);
    t.close(std::abs(lhs - rhs), 1e-12);
  }
  return tolerance_result(t, 1e-12);
}

CheckResult core_convolution_laws(const VerifyOptions& opt) {
  Rng rng(opt.seed, 103);
  const GroupParams g(5, 2);
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const GroupFn f = testing::random_fn(g, rng), h = testing::random_fn(g, rng);
    const GroupFn fh = transform(f, opt), hh = transform(h, opt);
    const CVec bar = fh.v.cwiseProduct(hh.v.conjugate());
    const CVec prod = fh.v.cwiseProduct(hh.v);
    t.close(max_abs(transform(barconv(f, h), opt).v - bar), 1e-10);
    t.close(max_abs(transform(conv(f, h), opt).v - prod), 1e-10);
  }
  return tolerance_result(t, 1e-10);
}

// All subspaces of F_p^n, found as spans of n-tuples of points.
std::vector<Subspace> all_subspaces(const GroupParams& g) {
  std::set<std::vector<int64_t>> seen;
  std::vector<Subspace> out;
  const int64_t tuples = ipow(g.size, g.n);
  for (int64_t code = 0; code < tuples; ++code) {
    std::vector<int64_t> pts;
    int64_t r = code;
    for (int i = 0; i < g.n; ++i) {
      pts.push_back(r % g.size);
      r /= g.size;
    }
    Subspace V = Subspace::span_points(g, pts);
    const FpMat& B = V.basis();
    std::vector<int64_t> key(B.data(), B.data() + B.size());
    key.push_back(B.rows());
    if (seen.insert(key).second) out.push_back(std::move(V));
  }
  return out;
}

CheckResult core_subspace_transform(const VerifyOptions&) {
  Tally t;
  Json counts = Json::object();
  for (auto [p, n] : {std::pair{3, 2}, {5, 2}, {3, 3}}) {
    const GroupParams g(p, n);
    const std::vector<Subspace> subs = all_subspaces(g);
    counts[g.to_string()] = subs.size();
    for (const Subspace& V : subs) {
      const std::vector<int64_t> elems = V.elements();
      Rational l1(0);
      bool exact = true;
      for (int64_t r = 0; r < g.size && exact; ++r) {
        CharacterSum s(p);
        for (int64_t x : elems) s.add(-g.dot(x, r));
        const auto m = s.exact_mean();
        if (!m) {
          exact = false;
          break;
        }
        const Rational val = *m * Rational(int64_t(elems.size()), g.size);
        l1 = l1 + (val < Rational(0) ? Rational(0) - val : val);
      }
      t.check(exact && l1 == Rational(1));
    }
  }
  return result(t, {{"subspaces", counts}});
}

CheckResult core_zero_form(const VerifyOptions&) {
  Tally t;
  for (int p : {2, 3, 5, 7})
    for (int n = 1; n <= 3; ++n) {
      CharacterSum s(p);
      s.add(0, ipow(p, n));
      const auto m = s.exact_mean();
      t.check(m.has_value() && *m == Rational(1));
    }
  return result(t);
}

// ---- gowers

CheckResult gowers_nesting(const VerifyOptions& opt) {
  Rng rng(opt.seed, 201);
  Tally t;
  for (auto [p, n] : {std::pair{3, 2}, {5, 1}}) {
    const GroupParams g(p, n);
    for (int i = 0; i < 20; ++i) {
      const GroupFn f = testing::random_fn(g, rng);
      const double a = u4_pow16(f), b = u4_pow16_via_u3(f);
      const double c = uk_pow_direct(f, 4);
      t.close(std::max({std::abs(a - b), std::abs(a - c), std::abs(b - c)}), 1e-9);
    }
  }
  return tolerance_result(t, 1e-9);
}

CheckResult gowers_direct_oracle(const VerifyOptions& opt) {
  Rng rng(opt.seed, 202);
  Tally t;
  for (auto [p, n] : {std::pair{2, 4}, {3, 2}, {5, 1}, {2, 3}, {7, 1}}) {
    const GroupParams g(p, n);
    for (int i = 0; i < 5; ++i) {
      const GroupFn f = testing::random_fn(g, rng);
      t.close(std::abs(u2_pow4(f) - uk_pow_direct(f, 2)), 1e-9);
      t.close(std::abs(u3_pow8(f) - uk_pow_direct(f, 3)), 1e-9);
      t.close(std::abs(u4_pow16(f) - uk_pow_direct(f, 4)), 1e-9);
    }
  }
  return tolerance_result(t, 1e-9);
}

CheckResult gowers_monotonicity(const VerifyOptions& opt) {
  Rng rng(opt.seed, 203);
  Tally t;
  for (auto [p, n] : {std::pair{3, 2}, {5, 2}}) {
    const GroupParams g(p, n);
    for (int i = 0; i < 20; ++i) {
      const GroupFn f = testing::random_fn(g, rng);
      double prev = uk_norm(f, 1).value;
      for (int k = 2; k <= 4; ++k) {
        const double cur = uk_norm(f, k).value;
        t.close(std::max(0.0, prev - cur), 1e-9);
        prev = cur;
      }
    }
  }
  return tolerance_result(t, 1e-9);
}

CheckResult gowers_u2_fourier(const VerifyOptions& opt) {
  Rng rng(opt.seed, 204);
  Tally t;
  for (auto [p, n] : {std::pair{7, 2}, {3, 3}}) {
    const GroupParams g(p, n);
    for (int i = 0; i < 10; ++i) {
      const GroupFn f = testing::random_fn(g, rng);
      const GroupFn h = dft(f);
      double s = 0;
      for (int64_t r = 0; r < g.size; ++r) s += std::pow(std::abs(h[r]), 4);
      t.close(std::abs(uk_norm(f, 2).value - std::pow(s, 0.25)), 1e-12);
    }
  }
  return tolerance_result(t, 1e-12);
}

CheckResult gowers_phase_norms(const VerifyOptions& opt) {
  Rng rng(opt.seed, 205);
  const GroupParams g(5, 2);
  Tally cubic, oracle;
  for (int i = 0; i < 20; ++i) {
    const GroupFn f = poly_phase_fn(PolyPhase::random(5, 2, 3, rng), g);
    cubic.close(std::abs(uk_norm(f, 4).value - 1.0), 1e-12);
  }
  const GroupParams g1(5, 1);
  PolyPhase x3(5, 1);
  x3.set({0, 0, 0}, 1);
  const GroupFn f = poly_phase_fn(x3, g1);
  const double nested = uk_norm(f, 3).value;
  const double direct = std::pow(uk_pow_direct(f, 3), 1.0 / 8);
  oracle.close(std::abs(nested - direct), 1e-10);
  Tally t = cubic;
  t.trials += oracle.trials;
  t.violations += oracle.violations;
  return result(t, {{"cubic_u4_max_error", cubic.worst},
                    {"x3_u3", nested},
                    {"x3_u3_direct", direct},
                    {"x3_oracle_error", oracle.worst}});
}

// ---- grid

CheckResult grid_manyarrangements(const VerifyOptions& opt) {
  Rng rng(opt.seed, 301);
  const GroupParams g(3, 2);
  Tally t;
  double min_ratio = 1e300;
  for (int i = 0; i < 100; ++i) {
    GridFn mu(g);
    const double density = 0.2 + 0.8 * rng.uniform();
    for (int64_t q = 0; q < mu.v.size(); ++q)
      mu.v.data()[q] = rng.bernoulli(density) ? rng.uniform() : 0.0;
    const double lhs = arr_functional(mu), rhs = std::pow(mu.l1(), 8);
    if (rhs > 0) min_ratio = std::min(min_ratio, lhs / rhs);
    t.check(lhs >= rhs - 1e-15);
  }
  return result(t, {{"min_ratio", min_ratio}});
}

CheckResult grid_simplebound(const VerifyOptions& opt) {
  Rng rng(opt.seed, 302);
  const GroupParams g(3, 2);
  Tally t;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    GridFn f[4];
    double mx = 0;
    for (auto& h : f) {
      h = testing::random_grid(g, rng);
      mx = std::max(mx, h.l2());
    }
    const double lhs = mixed_conv(f[0], f[1], f[2], f[3]).l2();
    worst = std::max(worst, lhs / mx);
    t.check(lhs <= mx + 1e-12);
  }
  return result(t, {{"max_ratio", worst}});
}

CheckResult grid_columndecay(const VerifyOptions& opt) {
  Rng rng(opt.seed, 303);
  const GroupParams g(3, 2);
  Tally t;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const GridFn m = mixed_conv(testing::random_grid(g, rng));
    for (int64_t w = 0; w < g.size; ++w) {
      const double l1 = dft(m.row(w)).v.cwiseAbs().sum();
      worst = std::max(worst, l1);
      t.check(l1 <= 1.0 + 1e-12);
    }
  }
  return result(t, {{"max_row_l1", worst}});
}

CheckResult grid_arr_exhaustive(const VerifyOptions& opt) {
  Rng rng(opt.seed, 304);
  Tally t;
  for (auto [p, n] : {std::pair{3, 1}, {2, 2}, {2, 3}, {3, 2}}) {
    const GroupParams g(p, n);
    const int trials = g.size > 8 ? 1 : 3;
    for (int i = 0; i < trials; ++i) {
      const GridFn a =
          GridFn::indicator(g, testing::random_set(g.size * g.size, 0.6, rng));
      t.close(std::abs(arr_exhaustive(a) - arr_functional(a)), 1e-12);
    }
  }
  return tolerance_result(t, 1e-12);
}

// ---- galg

CheckResult galg_triangle(const VerifyOptions& opt) {
  Rng rng(opt.seed, 401);
  const GroupParams g(5, 1);
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const Dist a = testing::random_dist(g, rng), b = testing::random_dist(g, rng),
               c = testing::random_dist(g, rng);
    t.check(ddist(a, c) <= ddist(a, b) + ddist(b, c) + 1e-12);
  }
  return result(t);
}

CheckResult galg_split(const VerifyOptions& opt) {
  Rng rng(opt.seed, 402);
  const GroupParams g(5, 1);
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const Dist a = testing::random_dist(g, rng), b = testing::random_dist(g, rng),
               c = testing::random_dist(g, rng), d = testing::random_dist(g, rng);
    t.check(ddist(dist_product(a, b), dist_product(c, d)) <=
            ddist(a, c) + ddist(b, d) + 1e-12);
  }
  return result(t);
}

CheckResult galg_cancellation(const VerifyOptions& opt) {
  Rng rng(opt.seed, 403);
  const GroupParams g(5, 1);
  Tally t;
  int64_t drawn = 0;
  while (t.trials < 300 && drawn < 100000) {
    ++drawn;
    // Concentrated pairs reach d <= 1/2 often.
    const Dist a = testing::random_dist(g, rng, 1), b = testing::random_dist(g, rng, 2);
    const Dist c = testing::random_dist(g, rng);
    if (ddist(a, b) > 0.5) continue;
    t.check(ddist(a, b) <= ddist(dist_product(a, c), dist_product(b, c)) + 1e-12);
  }
  return result(t, {{"drawn", drawn}});
}

CheckResult galg_adjoint_identity(const VerifyOptions& opt) {
  Rng rng(opt.seed, 404);
  const GroupParams g(5, 1);
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const Dist a = testing::random_dist(g, rng), b = testing::random_dist(g, rng),
               c = testing::random_dist(g, rng);
    t.close(std::abs(ddist(a, dist_product(adjoint(b), c)) - ddist(dist_product(a, b), c)),
            1e-12);
  }
  return tolerance_result(t, 1e-12);
}

CheckResult galg_almost_additive(const VerifyOptions& opt) {
  Rng rng(opt.seed, 405);
  const GroupParams g(5, 1);
  Tally t;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    DistMap phi;
    const int64_t slope = rng.uniform_int(0, 4);
    for (int64_t x = 0; x < 5; ++x) {
      const int64_t clean = mod(slope * x, 5);
      const double m = rng.bernoulli(0.4) ? 0.1 * rng.uniform() : 0.0;
      phi.push_back(m > 0 ? Dist(g, {{clean, 1 - m}, {rng.uniform_int(0, 4), m}})
                          : Dist::delta(g, clean));
    }
    const double eta = hom_defect(phi);
    const DistMap psi = self_difference(phi);
    for (int64_t u = 0; u < 5; ++u)
      for (int64_t v = 0; v < 5; ++v) {
        const double d = ddist(dist_product(psi[u], psi[v]), psi[g.add(u, v)]);
        if (eta > 0) worst = std::max(worst, d / eta);
        t.check(d <= 2 * eta + 1e-12);
      }
  }
  return result(t, {{"max_ratio_to_eta", worst}});
}

CheckResult galg_perturbation(const VerifyOptions& opt) {
  Rng rng(opt.seed, 406);
  const GroupParams g(3, 1);
  Tally t;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const DistFn psi = testing::random_distfn(g, rng, 1.0);
    GridFn mu(g), nu(g);
    for (int64_t q = 0; q < mu.v.size(); ++q) {
      mu.v.data()[q] = rng.uniform();
      nu.v.data()[q] = rng.bernoulli(0.8) ? mu.v.data()[q] : cplx(rng.uniform());
    }
    auto sq = [&](const GridFn& m) {
      const AlgGrid d = to_dense(weighted(psi, m));
      const AlgGrid c = alg_mixed_conv(d, d, d, d);
      return alg_inner(c, c);
    };
    GridFn diff(g);
    diff.v = mu.v - nu.v;
    const double lhs = std::abs(sq(mu) - sq(nu)), rhs = 8 * diff.l2();
    if (rhs > 0) worst = std::max(worst, lhs / rhs);
    t.check(lhs <= rhs + 1e-12);
  }
  return result(t, {{"max_ratio", worst}});
}

CheckResult galg_generalized_cs(const VerifyOptions& opt) {
  Rng rng(opt.seed, 407);
  const GroupParams g(3, 1);
  Tally t;
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    std::array<DistFn, 8> phi;
    double bound = 1;
    for (auto& f : phi) {
      f = testing::random_distfn(g, rng, 0.7);
      bound *= gen_norm(f);
    }
    const double lhs = gen_inner(phi);
    if (bound > 0) worst = std::max(worst, lhs / bound);
    t.check(lhs <= bound + 1e-12);
  }
  return result(t, {{"max_ratio", worst}});
}

CheckResult galg_stability_rounding(const VerifyOptions& opt) {
  Rng rng(opt.seed, 408);
  const GroupParams g(5, 2);
  Tally t;
  double max_eta = 0, worst = 0;
  for (int i = 0; i < 50; ++i) {
    DistMap phi = testing::affine_distmap(g, fp_random(2, 2, 5, rng), rng.uniform_int(0, 24));
    const int64_t x0 = rng.uniform_int(0, 24);
    const double m = 0.01 + 0.05 * rng.uniform();
    phi[x0] = Dist(g, {{phi[x0].argmax(), 1 - m}, {rng.uniform_int(0, 24), m}});
    // Rounding error can leave an unperturbed map slightly below zero.
    const double eta = std::max(0.0, hom_defect(phi));
    max_eta = std::max(max_eta, eta);
    if (eta > 0.01) {
      t.check(false);
      continue;
    }
    const Rounding r = round_stability(phi, eta);
    if (eta > 0) worst = std::max(worst, r.agreement / eta);
    t.check(r.freiman && r.agreement <= 5 * eta + 1e-12);
  }
  return result(t, {{"max_eta", max_eta}, {"max_agreement_over_eta", worst}});
}

// ---- arrange

CheckResult arrange_somearrangements(const VerifyOptions& opt) {
  Rng rng(opt.seed, 501);
  const GroupParams g(3, 2);
  Tally t;
  double min_ratio = 1e300;
  for (int i = 0; i < 10; ++i) {
    GroupFn f = poly_phase_fn(PolyPhase::random(3, 2, 3, rng), g);
    for (auto& z : f.v) z *= 0.5 + 0.5 * rng.uniform();
    const double gamma = 0.3;
    const PartialMap phi = spectral_map(f, gamma);
    const double alpha = phi.density();
    if (alpha == 0) continue;
    const double resp = respect_stats(phi, 1, RespectMode::kExact).respected;
    const double bound = std::pow(alpha, 16) * std::pow(gamma, 48);
    min_ratio = std::min(min_ratio, resp / bound);
    t.check(resp >= bound);
  }
  return result(t, {{"min_ratio", min_ratio}});
}

PartialMap random_partial_map(const GroupParams& g, double density, Rng& rng) {
  PartialMap phi(g);
  for (int64_t q = 0; q < g.size * g.size; ++q)
    if (rng.bernoulli(density)) phi.set(q, rng.uniform_int(0, g.size - 1));
  return phi;
}

CheckResult arrange_manyarr2s(const VerifyOptions& opt) {
  Rng rng(opt.seed, 502);
  const GroupParams g(3, 1);
  Tally t;
  double min_ratio = 1e300;
  for (int i = 0; i < 10; ++i) {
    const PartialMap phi = random_partial_map(g, 0.5 + 0.5 * rng.uniform(), rng);
    const double alpha = phi.density();
    const double theta = respect_stats(phi, 1, RespectMode::kExact).respected;
    const double second = respect_stats(phi, 2, RespectMode::kExact).respected;
    const double bound = std::pow(theta, 8) * std::pow(alpha, -12);
    if (bound > 0) min_ratio = std::min(min_ratio, second / bound);
    t.check(second >= bound - 1e-15);
  }
  return result(t, {{"min_ratio", min_ratio}});
}

CheckResult arrange_total_count(const VerifyOptions& opt) {
  Rng rng(opt.seed, 503);
  Tally t;
  for (auto [p, n] : {std::pair{3, 1}, {2, 2}, {5, 1}}) {
    const GroupParams g(p, n);
    PartialMap phi = random_partial_map(g, 1.0, rng);
    t.close(std::abs(respect_stats(phi, 1, RespectMode::kExact).total - 1.0), 1e-12);
    t.close(std::abs(respect_enumerate(phi).total - 1.0), 1e-12);
  }
  return tolerance_result(t, 1e-12);
}

CheckResult arrange_morse_scan(const VerifyOptions&) {
  Tally t;
  const Signs8 m = morse8();
  Signs8 neg, zero{};
  for (int i = 0; i < 8; ++i) neg[i] = -m[i];
  Json sizes = Json::object();
  for (int p : {3, 5, 7}) {
    const std::vector<Signs8> scan = morse_sign_scan(p);
    sizes[std::to_string(p)] = scan.size();
    t.check(scan == std::vector<Signs8>{neg, zero, m});
  }
  return result(t, {{"patterns", 6561}, {"admissible", sizes}});
}

CheckResult arrange_rare_zero(const VerifyOptions& opt) {
  Rng rng(opt.seed, 504);
  Tally t;
  double worst = 0;
  for (int p : {5, 7}) {
    const GroupParams g(p, 1);
    for (int i = 0; i < 10; ++i) {
      Signs32 eps;
      do {
        for (auto& e : eps) e = int(rng.uniform_int(-1, 1));
      } while (is_morse_multiple(eps));
      const MonteCarlo r = rare_zero_fraction(g, eps, 20000, opt.seed * 131 + uint64_t(p * 10 + i));
      worst = std::max(worst, r.estimate * p);
      t.check(r.estimate <= 2.0 / p + 3 * r.stderr_);
    }
  }
  return result(t, {{"max_fraction_times_G", worst}, {"samples", 20000}});
}

// ---- bilinear

CheckResult bilinear_rank_equality(const VerifyOptions& opt) {
  Rng rng(opt.seed, 601);
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const FpMat T = i % 2 ? fp_random(3, 3, 5, rng)
                          : fp_random_of_rank(3, 3, int(rng.uniform_int(0, 3)), 5, rng);
    t.check(analytic_rank_bilinear(T, 5) == double(algebraic_rank(T, 5)));
  }
  return result(t);
}

CheckResult bilinear_bohr_certified(const VerifyOptions& opt) {
  Rng rng(opt.seed, 602);
  const GroupParams g(5, 3);
  Tally t;
  int max_dim = 0, rounds = 0;
  for (int i = 0; i < 20; ++i) {
    const int k = 1 + i % 2, tt = 2;
    std::vector<AffineForm> coords = BiAffineMap::random(g, k, rng).coords();
    // A rank-one coordinate in half the maps forces a splitting round.
    if (i % 4 >= 2) coords[0].T = fp_random_of_rank(3, 3, 1, 5, rng);
    const BohrDecomposition d = bohr_decompose(BiAffineMap(g, coords), tt);
    rounds += d.rounds;
    const CellVerification cv = verify_cells(d);
    max_dim = std::max({max_dim, d.X0.dim(), d.Y0.dim()});
    t.check(cv.failures == 0 && cv.min_rank >= tt && d.X0.dim() <= tt * k &&
            d.Y0.dim() <= tt * k);
  }
  return result(t, {{"max_dim_X0_Y0", max_dim}, {"splitting_rounds", rounds}});
}

CheckResult bilinear_projection(const VerifyOptions& opt) {
  Rng rng(opt.seed, 603);
  const GroupParams g(3, 2);
  Tally idem, adj;
  for (int i = 0; i < 20; ++i) {
    const BiAffineMap beta = BiAffineMap::random(g, 1 + i % 3, rng);
    const GridFn F = testing::random_grid(g, rng), H = testing::random_grid(g, rng);
    const GridFn PF = avg_projection(F, beta), PH = avg_projection(H, beta);
    idem.close((avg_projection(PF, beta).v - PF.v).cwiseAbs().maxCoeff(), 1e-12);
    const cplx a = (PF.v.array() * H.v.array().conjugate()).mean();
    const cplx b = (F.v.array() * PH.v.array().conjugate()).mean();
    adj.close(std::abs(a - b), 1e-10);
  }
  Tally t = idem;
  t.trials += adj.trials;
  t.violations += adj.violations;
  return result(t, {{"idempotence_error", idem.worst}, {"adjoint_error", adj.worst}});
}

CheckResult bilinear_bogolyubov(const VerifyOptions& opt) {
  Rng rng(opt.seed, 604);
  const GroupParams g(3, 2);
  Tally t;
  Json ks = Json::array(), errors = Json::array();
  for (int i = 0; i < 10; ++i) {
    const GridFn f =
        GridFn::indicator(g, testing::random_set(g.size * g.size, 0.5 + 0.3 * rng.uniform(), rng));
    const BogResult r = bogolyubov_bilinear(f, 0.15);
    ks.push_back(r.report.k);
    errors.push_back(r.report.error);
    t.check(r.report.error <= 0.15 && r.report.column_decay <= 1 + 1e-9);
  }
  const GroupParams g1(5, 1);
  GridFn f(g1);
  for (int64_t x = 0; x < 5; ++x)
    for (int64_t y = 0; y < 5; ++y) f(x, y) = root_of_unity(5, x * y);
  const BogResult r = bogolyubov_bilinear(f, 0.15);
  t.check(r.report.error <= 1e-9 && r.report.m == 1);
  return result(t, {{"zeta", 0.15},
                    {"k", ks},
                    {"error", errors},
                    {"bilinear_phase_error", r.report.error},
                    {"bilinear_phase_maps", r.report.m}});
}

CheckResult bilinear_surjectivity(const VerifyOptions& opt) {
  Rng rng(opt.seed, 605);
  const GroupParams g(3, 4);
  Tally t;
  double min_slack = 1e300;
  for (int i = 0; i < 5; ++i) {
    const BiAffineMap beta = BiAffineMap::random(g, 1, rng);
    const int tt = map_rank(beta);
    for (int cu : {0, 1})
      for (int cv : {0, 1}) {
        const Subspace U = Subspace::span(g, fp_random_of_rank(4 - cu, 4, 4 - cu, 3, rng));
        const Subspace V = Subspace::span(g, fp_random_of_rank(4 - cv, 4, 4 - cv, 3, rng));
        const double frac = surjective_fraction(beta, U, V);
        const double bound = 1 - std::pow(3.0, cu + cv + 1 - tt);
        min_slack = std::min(min_slack, frac - bound);
        t.check(frac >= bound - 1e-12);
      }
  }
  return result(t, {{"min_slack", min_slack}});
}

CheckResult bilinear_four_arrangements(const VerifyOptions& opt) {
  Rng rng(opt.seed, 606);
  const GroupParams g(3, 4);
  BiAffineMap beta;
  do {
    beta = BiAffineMap::random(g, 1, rng, true);
  } while (map_rank(beta) < 4);
  const BohrDecomposition d = bohr_decompose(beta, 4);
  const int tt = d.certificate.rank, k = 1;
  const double p = 3;
  const double main = std::pow(p, -7 * k);
  const double err = 3 * std::pow(p, 2 * k - tt) + std::pow(p, k - tt);
  Tally t;
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    std::array<int64_t, 8> t8;
    for (auto& v : t8) v = rng.uniform_int(0, g.size - 1);
    const auto pts = arrangement_points(g, t8);
    std::array<Cell, 8> c;
    for (int j = 0; j < 8; ++j) c[j] = cell_of(d, pts[j] / g.size, pts[j] % g.size);
    const double dev = std::abs(cell_gen_inner(d, c) - main);
    worst = std::max(worst, dev);
    t.check(dev <= err);
  }
  return result(t, {{"max_deviation", worst}, {"bound", err}, {"rank", tt}});
}

// ---- trilinear

CheckResult trilinear_scalar_invariance(const VerifyOptions& opt) {
  Rng rng(opt.seed, 701);
  Tally t;
  for (int n : {1, 2})
    for (int i = 0; i < 10; ++i) {
      const TrilinearForm tau = TrilinearForm::random(5, n, rng);
      const Rational base = analytic_rank_tri(tau).mean;
      for (int64_t s = 2; s < 5; ++s) t.check(analytic_rank_tri(tau.scaled(s)).mean == base);
    }
  return result(t);
}

CheckResult trilinear_slice_formula(const VerifyOptions& opt) {
  Rng rng(opt.seed, 702);
  Tally t;
  for (int i = 0; i < 50; ++i) {
    const TrilinearForm tau = TrilinearForm::random(5, 2, rng);
    t.check(analytic_rank_tri(tau).mean == slice_mean(tau));
  }
  return result(t);
}

CheckResult trilinear_abc_rank(const VerifyOptions&) {
  TrilinearForm tau(5, 1);
  tau.set(0, 0, 0, 1);
  const TriRank r = analytic_rank_tri(tau);
  Tally t;
  t.check(r.mean == Rational(9, 25));
  t.close(std::abs(r.rank + std::log(9.0 / 25) / std::log(5.0)), 1e-12);
  return result(t, {{"mean", rational_text(r.mean)}, {"rank", r.rank}});
}

CheckResult trilinear_symmetrize_idempotent(const VerifyOptions& opt) {
  Rng rng(opt.seed, 703);
  Tally t;
  for (int p : {5, 7})
    for (int i = 0; i < 25; ++i) {
      const TrilinearForm s = symmetrize(TrilinearForm::random(p, 2, rng)).sigma;
      const Symmetrized again = symmetrize(s);
      t.check(again.sigma == s && again.residual.is_zero() && s.is_symmetric());
    }
  return result(t);
}

CheckResult trilinear_kappa_constant(const VerifyOptions& opt) {
  Rng rng(opt.seed, 704);
  Tally t;
  std::set<int64_t> constants;
  int64_t points = 0;
  for (int n : {1, 2})
    for (int i = 0; i < 10; ++i) {
      TrilinearForm s = TrilinearForm::random_symmetric(5, n, rng);
      if (s.is_zero()) s.set(0, 0, 0, 1);
      try {
        const Kappa k = kappa_from_sigma(s);
        points += k.points;
        if (k.cstar) constants.insert(*k.cstar);
        t.check(k.cstar.has_value() && *k.cstar == mod(kCubicAlternatingConstant, 5));
      } catch (const NumericalFault&) {
        t.check(false);
      }
    }
  t.check(constants.size() == 1);
  return result(t, {{"cstar", constants.size() == 1 ? Json(*constants.begin()) : Json(nullptr)},
                    {"points", points}});
}

// ---- cli

PipelineReport corrupted_run(uint64_t seed) {
  Rng rng(seed, 801);
  const GroupParams g(5, 2);
  const GroupFn f = testing::corrupt(poly_phase_fn(testing::sample_cubic(5, 2), g), 0.1, rng);
  PipelineConfig cfg;
  cfg.p = 5;
  cfg.n = 2;
  cfg.seed = seed;
  return run_inverse_pipeline(f, cfg);
}

std::vector<PipelineReport> sample_runs(uint64_t seed) {
  std::vector<PipelineReport> out;
  for (int n : {1, 2}) {
    PipelineConfig cfg;
    cfg.p = 5;
    cfg.n = n;
    cfg.seed = seed;
    out.push_back(run_inverse_pipeline(
        poly_phase_fn(testing::sample_cubic(5, n), GroupParams(5, n)), cfg));
  }
  out.push_back(corrupted_run(seed));
  return out;
}

const Json* stage_metrics(const PipelineReport& r, const std::string& name) {
  for (const auto& s : r.stages)
    if (s.name == name) return &s.metrics;
  return nullptr;
}

CheckResult cli_determinism(const VerifyOptions& opt) {
  Tally t;
  const std::string a = corrupted_run(opt.seed).to_json(false).dump();
  const std::string b = corrupted_run(opt.seed).to_json(false).dump();
  t.check(a == b);
  return result(t, {{"bytes", a.size()}});
}

CheckResult cli_stage7(const VerifyOptions& opt) {
  Tally t;
  int64_t checks = 0;
  for (const PipelineReport& r : sample_runs(opt.seed)) {
    const Json* m = stage_metrics(r, "extension");
    if (!m) {
      t.check(false);
      continue;
    }
    checks += (*m)["checks"].get<int64_t>();
    t.check((*m)["violations"].get<int64_t>() == 0);
  }
  return result(t, {{"quadruples", checks}});
}

CheckResult cli_stage10(const VerifyOptions& opt) {
  Tally t;
  Json pairs = Json::array();
  for (const PipelineReport& r : sample_runs(opt.seed)) {
    const Json* m = stage_metrics(r, "kappa_u3");
    if (!m) {
      t.check(false);
      continue;
    }
    const double u3 = (*m)["u3"].get<double>(), alpha = (*m)["symmetry_alpha"].get<double>();
    pairs.push_back({{"u3", u3}, {"alpha", alpha}});
    t.check(u3 + 1e-9 >= alpha && (*m)["holds"].get<bool>());
  }
  return result(t, {{"runs", pairs}});
}

}  // namespace

Json CheckResult::to_json(bool with_timing) const {
  Json j{{"module", module},   {"name", name},           {"passed", passed},
         {"trials", trials},   {"violations", violations}, {"measured", measured}};
  if (with_timing) j["seconds"] = seconds;
  return j;
}

const std::vector<Check>& verify_checks() {
  static const std::vector<Check> checks = {
      {"core", "inversion", core_inversion},
      {"core", "parseval", core_parseval},
      {"core", "convolution_laws", core_convolution_laws},
      {"core", "subspace_transform", core_subspace_transform},
      {"core", "zero_form", core_zero_form},
      {"gowers", "nesting", gowers_nesting},
      {"gowers", "direct_oracle", gowers_direct_oracle},
      {"gowers", "monotonicity", gowers_monotonicity},
      {"gowers", "u2_fourier", gowers_u2_fourier},
      {"gowers", "phase_norms", gowers_phase_norms},
      {"grid", "manyarrangements", grid_manyarrangements},
      {"grid", "simplebound", grid_simplebound},
      {"grid", "columndecay", grid_columndecay},
      {"grid", "arr_exhaustive", grid_arr_exhaustive},
      {"galg", "triangle", galg_triangle},
      {"galg", "split", galg_split},
      {"galg", "cancellation", galg_cancellation},
      {"galg", "adjoint_identity", galg_adjoint_identity},
      {"galg", "almost_additive", galg_almost_additive},
      {"galg", "perturbation", galg_perturbation},
      {"galg", "generalized_cs", galg_generalized_cs},
      {"galg", "stability_rounding", galg_stability_rounding},
      {"arrange", "somearrangements", arrange_somearrangements},
      {"arrange", "manyarr2s", arrange_manyarr2s},
      {"arrange", "total_count", arrange_total_count},
      {"arrange", "morse_scan", arrange_morse_scan},
      {"arrange", "rare_zero", arrange_rare_zero},
      {"bilinear", "rank_equality", bilinear_rank_equality},
      {"bilinear", "bohr_certified", bilinear_bohr_certified},
      {"bilinear", "projection", bilinear_projection},
      {"bilinear", "bogolyubov", bilinear_bogolyubov},
      {"bilinear", "surjectivity", bilinear_surjectivity},
      {"bilinear", "four_arrangements", bilinear_four_arrangements},
      {"trilinear", "scalar_invariance", trilinear_scalar_invariance},
      {"trilinear", "slice_formula", trilinear_slice_formula},
      {"trilinear", "abc_rank", trilinear_abc_rank},
      {"trilinear", "symmetrize_idempotent", trilinear_symmetrize_idempotent},
      {"trilinear", "kappa_constant", trilinear_kappa_constant},
      {"cli", "determinism", cli_determinism},
      {"cli", "stage7", cli_stage7},
      {"cli", "stage10", cli_stage10},
  };
  return checks;
}

const std::vector<std::string>& verify_modules() {
  static const std::vector<std::string> modules = {
      "core", "gowers", "grid", "galg", "arrange", "bilinear", "trilinear", "cli"};
  return modules;
}

namespace {

CheckResult timed(const Check& c, const VerifyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = c.run(opt);
  } catch (const Error& e) {
    r = CheckResult{};
    r.violations = 1;
    r.measured = {{"error", e.what()}};
  }
  r.module = c.module;
  r.name = c.name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

CheckResult run_check(const std::string& name, const VerifyOptions& opt) {
  for (const Check& c : verify_checks())
    if (c.module + "." + c.name == name) return timed(c, opt);
  throw Error("unknown check " + name);
}

bool VerifyReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

Json VerifyReport::to_json(bool with_timing) const {
  Json list = Json::array();
  int64_t failed = 0;
  double total = 0;
  for (const auto& c : checks) {
    list.push_back(c.to_json(with_timing));
    failed += !c.passed;
    total += c.seconds;
  }
  Json j{{"schema", kSchema},
         {"seed", options.seed},
         {"only", options.only},
         {"corrupt_dft", options.corrupt_dft},
         {"passed", passed()},
         {"failed", failed},
         {"checks", list}};
  if (with_timing) j["seconds"] = total;
  return j;
}

VerifyReport verify_suite(const VerifyOptions& opt) {
  const auto& mods = verify_modules();
  if (!opt.only.empty() && std::find(mods.begin(), mods.end(), opt.only) == mods.end())
    throw Error("unknown module " + opt.only);
  VerifyReport rep;
  rep.options = opt;
  for (const Check& c : verify_checks())
    if (opt.only.empty() || c.module == opt.only) rep.checks.push_back(timed(c, opt));
  return rep;
}

}  // namespace ulab
