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

#include "ulab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "ulab/arrange.hpp"
#include "ulab/gowers.hpp"

namespace ulab {
namespace {

constexpr double kTheoryEta = 1.0 / 1728000.0;
constexpr double kTheoryStabilityConstant = 27000.0;

struct Halt {
  PipelineStatus status;
  std::string message;
};

[[noreturn]] void gate(const std::string& msg) { throw Halt{PipelineStatus::kGate, msg}; }
[[noreturn]] void fail(const std::string& msg) {
  throw Halt{PipelineStatus::kVerification, msg};
}

std::vector<FpVec> all_digits(const GroupParams& g) {
  std::vector<FpVec> d(g.size);
  for (int64_t x = 0; x < g.size; ++x) d[x] = g.digits(x);
  return d;
}

Json rank_json(const TriRank& r) {
  return Json{{"mean", std::to_string(r.mean.num) + "/" + std::to_string(r.mean.den)},
              {"rank", r.rank}};
}

// Bi-affine map (a, b) -> gamma(a, b) + L a + S b + c with gamma(a, b)_k =
// a . M_k b, M_k stored as the slices tau(., ., e_k).
struct BiAffineFit {
  TrilinearForm tau;
  FpMat L, S;
  FpVec c;

  int64_t eval(const GroupParams& g, const std::vector<FpVec>& d, int64_t a,
               int64_t b) const {
    const int n = g.n;
    FpVec out = L * d[a] + S * d[b] + c;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[k] += d[a][i] * tau.at(i, j, k) * d[b][j];
    return g.index(out);
  }
};

// For each output coordinate, the matrix M maximizing the psi-mass on
// {(w, h, c) : c_k = w . M h}. Ties keep the lowest candidate index.
TrilinearForm fit_bilinear(const DistFn& psi, double* mass, double* agree) {
  const GroupParams& g = psi.g;
  const int p = g.p, n = g.n;
  const std::vector<FpVec> d = all_digits(g);
  const int64_t candidates = ipow(p, n * n);

  struct Support {
    FpVec w, h;
    std::vector<double> marg;  // p entries per coordinate
  };
  std::vector<Support> sup;
  *mass = 0;
  for (const auto& [flat, dist] : psi.values) {
    if (dist.total() <= 0) continue;
    Support s{d[flat / g.size], d[flat % g.size], std::vector<double>(size_t(p) * n, 0.0)};
    for (const auto& [v, wgt] : dist.entries())
      for (int k = 0; k < n; ++k) s.marg[size_t(k) * p + size_t(d[v][k])] += wgt;
    *mass += dist.total();
    sup.push_back(std::move(s));
  }

  TrilinearForm tau(p, n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> score(candidates, 0.0);
    parallel_for(0, candidates, [&](int64_t m) {
      const FpVec M = GroupParams(p, n * n).digits(m);
      double s = 0;
      for (const Support& e : sup) {
        int64_t v = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v += e.w[i] * M[i * n + j] * e.h[j];
        s += e.marg[size_t(k) * p + size_t(mod(v, p))];
      }
      score[m] = s;
    });
    const int64_t best =
        std::max_element(score.begin(), score.end()) - score.begin();
    const FpVec M = GroupParams(p, n * n).digits(best);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tau.set(i, j, k, M[i * n + j]);
  }

  double hit = 0;
  for (const auto& [flat, dist] : psi.values) {
    const FpVec& w = d[flat / g.size];
    const FpVec& h = d[flat % g.size];
    FpVec gv = FpVec::Zero(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gv[k] += w[i] * tau.at(i, j, k) * h[j];
    hit += dist.at(g.index(gv));
  }
  *agree = *mass > 0 ? hit / *mass : 0.0;
  return tau;
}

// Per coordinate, the affine l . a + s . b + c agreeing with r_k on the most
// points. Candidates run over (l, s) in index order, then c.
void fit_affine_residual(const GroupParams& g, const std::vector<int64_t>& pts,
                         const std::vector<FpVec>& resid, BiAffineFit* fit) {
  const int p = g.p, n = g.n;
  const std::vector<FpVec> d = all_digits(g);
  const GroupParams ls(p, 2 * n);
  fit->L = FpMat::Zero(n, n);
  fit->S = FpMat::Zero(n, n);
  fit->c = FpVec::Zero(n);
  for (int k = 0; k < n; ++k) {
    std::vector<int64_t> best(ls.size, 0), best_c(ls.size, 0);
    parallel_for(0, ls.size, [&](int64_t idx) {
      const FpVec coef = ls.digits(idx);
      std::vector<int64_t> count(p, 0);
      for (size_t i = 0; i < pts.size(); ++i) {
        const FpVec& a = d[pts[i] / g.size];
        const FpVec& b = d[pts[i] % g.size];
        int64_t v = resid[i][k];
        for (int j = 0; j < n; ++j) v -= coef[j] * a[j] + coef[n + j] * b[j];
        ++count[mod(v, p)];
      }
      const int64_t c = std::max_element(count.begin(), count.end()) - count.begin();
      best[idx] = count[c];
      best_c[idx] = c;
    });
    const int64_t idx = std::max_element(best.begin(), best.end()) - best.begin();
    const FpVec coef = ls.digits(idx);
    for (int j = 0; j < n; ++j) {
      fit->L(k, j) = coef[j];
      fit->S(k, j) = coef[n + j];
    }
    fit->c[k] = best_c[idx];
  }
}

template <class Body>
void run_stage(PipelineReport& rep, const std::string& name, Body&& body) {
  StageRecord rec;
  rec.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](const std::string& status) {
    rec.status = status;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.stages.push_back(std::move(rec));
  };
  try {
    body(rec.metrics);
  } catch (const Halt& h) {
    rec.metrics["diagnostic"] = h.message;
    finish(h.status == PipelineStatus::kGate ? "halted" : "failed");
    throw;
  } catch (const NumericalFault& e) {
    rec.metrics["diagnostic"] = e.what();
    finish("failed");
    throw Halt{PipelineStatus::kVerification, e.what()};
  }
  finish("ok");
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const Json& j) {
  PipelineConfig c;
  if (!j.is_object()) throw Error("config: object expected");
  static const std::set<std::string> known = {
      "p", "n", "seed", "eta", "zeta", "t", "u4_threshold", "spectral_gamma",
      "min_density", "cell_gamma", "min_cell_density", "densify_k_max",
      "densify_retries", "densify_samples", "fit_budget", "quad_budget",
      "point_budget", "input", "output"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error("config: unknown key \"" + key + "\"");
  c.p = j.value("p", c.p);
  c.n = j.value("n", c.n);
  c.seed = j.value("seed", c.seed);
  c.eta = j.value("eta", c.eta);
  c.zeta = j.value("zeta", c.zeta);
  c.t = j.value("t", c.t);
  c.u4_threshold = j.value("u4_threshold", c.u4_threshold);
  c.spectral_gamma = j.value("spectral_gamma", c.spectral_gamma);
  c.min_density = j.value("min_density", c.min_density);
  c.cell_gamma = j.value("cell_gamma", c.cell_gamma);
  c.min_cell_density = j.value("min_cell_density", c.min_cell_density);
  c.densify_k_max = j.value("densify_k_max", c.densify_k_max);
  c.densify_retries = j.value("densify_retries", c.densify_retries);
  c.densify_samples = j.value("densify_samples", c.densify_samples);
  c.fit_budget = j.value("fit_budget", c.fit_budget);
  c.quad_budget = j.value("quad_budget", c.quad_budget);
  c.point_budget = j.value("point_budget", c.point_budget);
  c.input = j.value("input", c.input);
  c.output = j.value("output", c.output);
  c.validate();
  return c;
}

void PipelineConfig::validate() const {
  if (!is_prime(p)) throw Error("config: p must be prime");
  if (n < 1) throw Error("config: n must be positive");
  if (!(eta > 0 && zeta > 0 && u4_threshold > 0 && spectral_gamma > 0 &&
        min_density > 0 && cell_gamma > 0 && min_cell_density > 0))
    throw Error("config: thresholds must be positive");
  if (t < 0) throw Error("config: t must be positive, or 0 for automatic");
  if (densify_k_max < 0 || densify_retries < 1 || densify_samples < 0)
    throw Error("config: densify parameters out of range");
  if (fit_budget < 1 || quad_budget < 1 || point_budget < 1)
    throw Error("config: budgets must be positive");
}

Json PipelineConfig::to_json() const {
  return Json{{"p", p}, {"n", n}, {"seed", seed}, {"eta", eta}, {"zeta", zeta},
              {"t", t}, {"u4_threshold", u4_threshold},
              {"spectral_gamma", spectral_gamma}, {"min_density", min_density},
              {"cell_gamma", cell_gamma}, {"min_cell_density", min_cell_density},
              {"densify_k_max", densify_k_max}, {"densify_retries", densify_retries},
              {"densify_samples", densify_samples}, {"fit_budget", fit_budget},
              {"quad_budget", quad_budget}, {"point_budget", point_budget},
              {"input", input}, {"output", output}};
}

Json PipelineReport::to_json(bool with_timing) const {
  static const char* names[] = {"ok", "", "gate", "verification"};
  Json j{{"schema", kSchema},
         {"status", names[int(status)]},
         {"exit_code", exit_code()},
         {"halted_at", halted_at},
         {"message", message},
         {"config", config.to_json()}};
  Json st = Json::array();
  for (const auto& s : stages)
    st.push_back({{"name", s.name}, {"status", s.status}, {"metrics", s.metrics}});
  j["stages"] = st;
  if (status == PipelineStatus::kOk)
    j["result"] = {{"cubic", ulab::to_json(cubic)}, {"correlation", correlation}};
  if (with_timing) {
    Json t = Json::object();
    double total = 0;
    for (const auto& s : stages) {
      t[s.name] = s.seconds;
      total += s.seconds;
    }
    j["timing"] = {{"stages", t}, {"total", total}};
  }
  return j;
}

PipelineReport run_inverse_pipeline(const GroupFn& f, const PipelineConfig& cfg) {
  cfg.validate();
  PipelineReport rep;
  rep.config = cfg;
  const GroupParams& g = f.g;
  const int p = g.p, n = g.n;
  const int64_t N = g.size;
  const std::vector<FpVec> d = all_digits(g);

  PartialMap A, A1;
  std::vector<double> magnitude;  // |d_{a,b} f^(phi(a, b))|
  double eta_measured = 0;
  BiAffineMap beta;
  int k = 0;
  std::vector<int64_t> B;  // points of A1 in the chosen cell
  BiAffineFit fit;
  std::vector<int64_t> phi2;  // fitted map on all of G x G
  AffineMap rho, sig;
  double alpha9 = 0;
  PolyPhase kappa(p, n);
  GroupFn gq;

  try {
    run_stage(rep, "u4_gate", [&](Json& m) {
      if (g.p != cfg.p || g.n != cfg.n)
        gate("input group " + g.to_string() + " does not match the config");
      m["sup_norm"] = f.sup_norm();
      if (!f.bounded(1e-9)) gate("f is not bounded by 1");
      if (p < 5) gate("cubic phases need p >= 5");
      const NormReport u4 = uk_norm(f, 4);
      m["u4"] = u4.value;
      m["u4_pow16"] = u4.power;
      m["threshold"] = cfg.u4_threshold;
      if (u4.value < cfg.u4_threshold) gate("U^4 below threshold");
      const double quad = double(N) * N * N * N;
      m["points4"] = quad;
      if (quad > double(cfg.point_budget)) gate("|G|^4 exceeds point_budget");
    });

    run_stage(rep, "spectrum", [&](Json& m) {
      A = spectral_map(f, cfg.spectral_gamma, &magnitude);
      m["gamma"] = cfg.spectral_gamma;
      m["points"] = A.size();
      m["density"] = A.density();
      if (A.size() == 0) gate("no (a, b) reaches the spectral threshold");
    });

    run_stage(rep, "freiman_densify", [&](Json& m) {
      const PartialMap rows = freiman_rows(A, magnitude);
      if (!rows_are_freiman(rows)) fail("row restriction is not Freiman");
      m["row_density"] = rows.density();
      m["row_dropped"] = A.size() - rows.size();
      const double defect = bihom_defect(rows.to_distfn(), rows.indicator());
      m["row_defect"] = defect;
      if (defect <= 1e-12) {
        A1 = rows;
        m["exact"] = true;
        m["k"] = 0;
      } else {
        DensifyOptions opt;
        opt.eta = cfg.eta;
        opt.k_max = cfg.densify_k_max;
        opt.retries = cfg.densify_retries;
        opt.seed = cfg.seed;
        if (cfg.densify_samples > 0) {
          opt.mode = RespectMode::kMonteCarlo;
          opt.samples = cfg.densify_samples;
        }
        const DensifyResult r = densify(rows, opt);
        A1 = r.selected;
        m["exact"] = false;
        m["k"] = r.k;
        m["tries"] = r.tries;
        m["score"] = r.score;
        m["satisfied"] = r.satisfied;
        m["formula_k"] = r.formula_k;
        m["respected_ratio_order2"] = r.stats.ratio();
        if (!r.satisfied) gate("densification found no selection with score >= 0");
      }
      m["density"] = A1.density();
      if (A1.density() < cfg.min_density) gate("density of A below min_density");
    });

    run_stage(rep, "bihom_defect", [&](Json& m) {
      eta_measured = bihom_defect(A1.to_distfn(), A1.indicator());
      m["eta_measured"] = eta_measured;
      m["eta_used"] = cfg.eta;
      m["eta_theory"] = kTheoryEta;
      m["within"] = eta_measured <= cfg.eta;
    });

    run_stage(rep, "bogolyubov", [&](Json& m) {
      const BogResult r = bogolyubov_bilinear(A1.indicator(), cfg.zeta);
      beta = r.beta;
      k = r.report.k;
      m["zeta"] = cfg.zeta;
      m["k"] = k;
      m["k_raw"] = r.report.k_raw;
      m["m"] = r.report.m;
      m["error"] = r.report.error;
      m["spectrum_size"] = r.report.spectrum_size;
      m["bad_rows"] = r.report.bad_rows;
      m["column_decay"] = r.report.column_decay;
      m["halvings"] = r.report.halvings;
      m["beta"] = ulab::to_json(beta);
      if (!r.report.within) gate("Bogolyubov error above zeta");
    });

    run_stage(rep, "bohr_cell", [&](Json& m) {
      const int t = cfg.t > 0 ? cfg.t : std::max(3 * k + 2, 7);
      const BohrDecomposition dec = bohr_decompose(beta, t);
      const CellVerification cv = verify_cells(dec);
      m["t"] = t;
      m["dim_X0"] = dec.X0.dim();
      m["dim_Y0"] = dec.Y0.dim();
      m["rounds"] = dec.rounds;
      m["cells"] = cv.cells;
      m["rank_failures"] = cv.failures;
      m["min_rank"] = cv.min_rank == kInfiniteRank ? -1 : cv.min_rank;
      if (cv.failures > 0) fail("a Bohr cell fails the rank certificate");

      const GridFn mu = A1.indicator();
      const GridFn v = vert_conv(mu, mu);
      const GridFn F = horiz_conv(v, v);
      GridFn xi = avg_projection(F, beta);
      xi.v = (F.v - xi.v).cwiseAbs().cast<cplx>();
      const OneSet one = restrict_to_one_set(dec, mu, A1.to_distfn(), xi, cfg.cell_gamma);
      if (!one.found) gate("no Bohr cell meets the density and error criteria");
      std::vector<int64_t> cell_pts;
      for (auto& [c, pts] : bohr_cells(dec))
        if (c == one.cell) cell_pts = pts;
      for (int64_t q : cell_pts)
        if (A1.contains(q)) B.push_back(q);
      m["cell"] = {{"v", one.cell.v}, {"w", one.cell.w}, {"z", one.cell.z}};
      m["cell_points"] = cell_pts.size();
      m["points"] = B.size();
      m["defect"] = one.defect;
      m["mu_value"] = one.mu_value;
      m["xi_value"] = one.xi_value;
      const double dens = double(B.size()) / double(N * N);
      m["density"] = dens;
      if (dens < cfg.min_cell_density) gate("chosen cell below min_cell_density");
    });

    run_stage(rep, "stability", [&](Json& m) {
      const double cand = double(ipow(p, n * n)) * double(N) * double(N);
      const double aff = double(ipow(p, 2 * n)) * double(B.size());
      if (cand > double(cfg.fit_budget) || aff > double(cfg.fit_budget))
        gate("bi-affine fit exceeds fit_budget");
      std::vector<int64_t> vals;
      for (int64_t q : B) vals.push_back(A1.at(q));
      const DistFn phiB = DistFn::from_map(g, B, vals);
      double mass = 0, agree = 0;
      fit.tau = fit_bilinear(mixed_conv(phiB), &mass, &agree);
      m["mixed_mass"] = mass;
      m["bilinear_agreement"] = agree;

      std::vector<FpVec> resid;
      for (int64_t q : B) {
        FpVec r = d[A1.at(q)];
        const FpVec& a = d[q / N];
        const FpVec& b = d[q % N];
        for (int kk = 0; kk < n; ++kk)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[kk] -= a[i] * fit.tau.at(i, j, kk) * b[j];
        resid.push_back(r);
      }
      fit_affine_residual(g, B, resid, &fit);

      phi2.assign(N * N, 0);
      for (int64_t a = 0; a < N; ++a)
        for (int64_t b = 0; b < N; ++b) phi2[a * N + b] = fit.eval(g, d, a, b);
      int64_t miss = 0;
      for (int64_t q : B) miss += phi2[q] != A1.at(q);
      const double dist = B.empty() ? 0.0 : double(miss) / double(B.size());
      m["distance"] = dist;
      m["eta_measured"] = eta_measured;
      m["constant_measured"] = eta_measured > 0 ? Json(dist / eta_measured) : Json(nullptr);
      m["constant_theory"] = kTheoryStabilityConstant;
      m["tau"] = ulab::to_json(fit.tau);
      m["L"] = ulab::to_json(fit.L);
      m["S"] = ulab::to_json(fit.S);
      m["c"] = ulab::to_json(fit.c);
    });

    run_stage(rep, "extension", [&](Json& m) {
      int64_t checks = 0, bad = 0;
      for (int64_t x = 0; x < N; ++x)
        for (int64_t y1 = 0; y1 < N; ++y1)
          for (int64_t y2 = 0; y2 < N; ++y2) {
            const int64_t s = g.add(y1, y2);
            bad += g.add(phi2[x * N + s], phi2[x * N]) !=
                   g.add(phi2[x * N + y1], phi2[x * N + y2]);
            bad += g.add(phi2[s * N + x], phi2[x]) !=
                   g.add(phi2[y1 * N + x], phi2[y2 * N + x]);
            checks += 2;
          }
      m["checks"] = checks;
      m["violations"] = bad;
      if (bad > 0) fail("extension is not bi-affine");
    });

    run_stage(rep, "back_to_phi", [&](Json& m) {
      int64_t hit = 0;
      const std::vector<int64_t> pts = A.points();
      for (int64_t q : pts) hit += phi2[q] == A.at(q);
      std::vector<double> sq(N * N, 0.0);
      parallel_for(0, N, [&](int64_t b) {
        const GroupFn db = derivative(f, b);
        for (int64_t a = 0; a < N; ++a)
          sq[a * N + b] = std::norm(dft(derivative(db, a))[phi2[a * N + b]]);
      });
      double mean = 0, on_a = 0;
      for (int64_t q = 0; q < N * N; ++q) mean += sq[q];
      for (int64_t q : pts) on_a += sq[q];
      m["agreement_on_A"] = pts.empty() ? 0.0 : double(hit) / double(pts.size());
      m["mean_sq_correlation"] = mean / double(N * N);
      m["mean_sq_correlation_on_A"] = pts.empty() ? 0.0 : on_a / double(pts.size());
      rho = AffineMap{fit.L, fit.c};
      sig = AffineMap{fit.S, FpVec::Zero(n)};
    });

    run_stage(rep, "symmetry", [&](Json& m) {
      const SymmetryReport s = symmetry_pipeline(f, fit.tau, rho, sig);
      alpha9 = s.alpha;
      m["alpha"] = s.alpha;
      Json pr = Json::array();
      for (const auto& r : s.pair_ranks) pr.push_back(rank_json(r));
      m["pair_ranks"] = pr;
      m["residual_rank"] = rank_json(s.residual);
      m["asserted"] = s.asserted;
      m["partial_bound"] = s.partial_bound;
      m["full_bound"] = s.full_bound;
      m["partial_holds"] = s.partial_holds;
      m["full_holds"] = s.full_holds;
      if (!s.asserted) gate("correlation with the trilinear phase vanishes");
      if (!s.partial_holds || !s.full_holds) fail("symmetry bound violated");
    });

    run_stage(rep, "kappa_u3", [&](Json& m) {
      const TrilinearForm sym = symmetrize(fit.tau).sigma;
      const Kappa k0 = kappa_from_sigma(sym);
      m["points_checked"] = k0.points;
      if (k0.cstar) {
        m["cstar"] = *k0.cstar;
        const int64_t s = inv_mod(mod(-*k0.cstar, p), p);
        kappa = kappa_from_sigma(sym.scaled(s)).kappa;
      } else {
        m["cstar"] = nullptr;
      }
      m["kappa"] = ulab::to_json(kappa);
      const GroupFn phase = poly_phase_fn(kappa, g);
      gq = GroupFn(g, f.v.cwiseProduct(phase.v.conjugate()));

      GridFn u = GridFn::constant(g, cplx(1, 0)), v(g), w(g);
      for (int64_t x = 0; x < N; ++x)
        for (int64_t c = 0; c < N; ++c) {
          v(x, c) = root_of_unity(p, -g.dot(sig.apply(g, x), c));
          w(x, c) = root_of_unity(p, -g.dot(rho.apply(g, x), c));
        }
      const U3Lower r = u3_lower(gq, u, v, w);
      m["alpha"] = r.alpha;
      m["u3"] = r.u3;
      m["holds"] = r.holds;
      m["symmetry_alpha"] = alpha9;
      m["u3_at_least_symmetry_alpha"] = r.u3 + 1e-9 >= alpha9;
      if (!r.holds) fail("U^3 norm below the measured correlation");
    });

    run_stage(rep, "quadratic", [&](Json& m) {
      const QuadSearch qs = quad_phase_search(gq, cfg.quad_budget);
      rep.cubic = kappa + qs.q;
      rep.correlation = std::abs(correlation(f, rep.cubic));
      m["q"] = ulab::to_json(qs.q);
      m["candidates"] = qs.candidates;
      m["g_correlation"] = qs.abs_corr;
      m["cubic"] = ulab::to_json(rep.cubic);
      m["correlation"] = rep.correlation;
    });
  } catch (const Halt& h) {
    rep.status = h.status;
    rep.halted_at = rep.stages.empty() ? "" : rep.stages.back().name;
    rep.message = h.message;
  }
  return rep;
}

}  // namespace ulab
