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

#include "ulab/trilinear.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>

#include "ulab/gowers.hpp"

namespace ulab {

namespace {

constexpr int64_t kTripleBudget = 100'000'000;
constexpr int64_t kQuadrupleBudget = 50'000'000;

void require_compatible(const TrilinearForm& s, const TrilinearForm& t) {
  if (s.p() != t.p() || s.n() != t.n())
    throw Error("trilinear forms live on different groups");
}

int64_t group_power(int p, int e) {
  double v = std::pow(double(p), double(e));
  if (v > 9e18) throw Error("group power overflows");
  return ipow(p, e);
}

}  // namespace

TrilinearForm::TrilinearForm(int p, int n)
    : p_(p), n_(n), c_(size_t(n) * n * n, 0) {
  if (!is_prime(p)) throw Error("TrilinearForm: p must be prime");
  if (n < 1) throw Error("TrilinearForm: n must be positive");
}

TrilinearForm TrilinearForm::random(int p, int n, Rng& rng) {
  TrilinearForm t(p, n);
  for (int64_t& c : t.c_) c = rng.uniform_int(0, p - 1);
  return t;
}

TrilinearForm TrilinearForm::random_symmetric(int p, int n, Rng& rng) {
  TrilinearForm t(p, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const int64_t v = rng.uniform_int(0, p - 1);
        const int idx[3] = {i, j, k};
        for (const auto& pi : kPermutations)
          t.at(idx[pi[0]], idx[pi[1]], idx[pi[2]]) = v;
      }
  return t;
}

TrilinearForm TrilinearForm::diagonal(int p, int n) {
  TrilinearForm t(p, n);
  for (int i = 0; i < n; ++i) t.at(i, i, i) = 1;
  return t;
}

TrilinearForm TrilinearForm::from_cubic(const PolyPhase& q) {
  const int p = q.p();
  if (p < 5) throw Error("from_cubic: requires p >= 5");
  TrilinearForm t(p, q.n());
  for (const auto& [m, c] : q.terms()) {
    if (m.size() != 3) continue;
    std::vector<std::array<int, 3>> orbit;
    for (const auto& pi : kPermutations) {
      std::array<int, 3> o = {m[pi[0]], m[pi[1]], m[pi[2]]};
      if (std::find(orbit.begin(), orbit.end(), o) == orbit.end())
        orbit.push_back(o);
    }
    const int64_t share = mod(c * inv_mod(int64_t(orbit.size()), p), p);
    for (const auto& o : orbit) t.at(o[0], o[1], o[2]) = share;
  }
  return t;
}

int64_t TrilinearForm::eval(const FpVec& a, const FpVec& b,
                            const FpVec& c) const {
  int64_t s = 0;
  for (int i = 0; i < n_; ++i) {
    if (a[i] % p_ == 0) continue;
    int64_t si = 0;
    for (int j = 0; j < n_; ++j) {
      if (b[j] % p_ == 0) continue;
      int64_t sj = 0;
      for (int k = 0; k < n_; ++k) sj += at(i, j, k) * mod(c[k], p_);
      si += mod(sj, p_) * mod(b[j], p_);
    }
    s += mod(si, p_) * mod(a[i], p_);
  }
  return mod(s, p_);
}

FpMat TrilinearForm::slice(const FpVec& x) const {
  FpMat T = FpMat::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) T(j, k) += x[i] * at(i, j, k);
  return fp_reduce(T, p_);
}

TrilinearForm TrilinearForm::permuted(const std::array<int, 3>& pi) const {
  TrilinearForm t(p_, n_);
  std::array<int, 3> idx;
  for (idx[0] = 0; idx[0] < n_; ++idx[0])
    for (idx[1] = 0; idx[1] < n_; ++idx[1])
      for (idx[2] = 0; idx[2] < n_; ++idx[2])
        t.at(idx[0], idx[1], idx[2]) = at(idx[pi[0]], idx[pi[1]], idx[pi[2]]);
  return t;
}

TrilinearForm TrilinearForm::scaled(int64_t s) const {
  TrilinearForm t(p_, n_);
  for (size_t i = 0; i < c_.size(); ++i) t.c_[i] = mod(c_[i] * mod(s, p_), p_);
  return t;
}

TrilinearForm TrilinearForm::operator+(const TrilinearForm& o) const {
  require_compatible(*this, o);
  TrilinearForm t(p_, n_);
  for (size_t i = 0; i < c_.size(); ++i) t.c_[i] = mod(c_[i] + o.c_[i], p_);
  return t;
}

TrilinearForm TrilinearForm::operator-(const TrilinearForm& o) const {
  require_compatible(*this, o);
  TrilinearForm t(p_, n_);
  for (size_t i = 0; i < c_.size(); ++i) t.c_[i] = mod(c_[i] - o.c_[i], p_);
  return t;
}

bool TrilinearForm::operator==(const TrilinearForm& o) const {
  return p_ == o.p_ && n_ == o.n_ && c_ == o.c_;
}

bool TrilinearForm::is_symmetric() const {
  for (const auto& pi : kPermutations)
    if (!(permuted(pi) == *this)) return false;
  return true;
}

bool TrilinearForm::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](int64_t v) { return v == 0; });
}

TriRank analytic_rank_tri(const TrilinearForm& tau) {
  const GroupParams g(tau.p(), tau.n());
  const int64_t N = g.size;
  if (double(N) * double(N) * double(N) > double(kTripleBudget))
    throw Error("analytic_rank_tri: p^{3n} exceeds budget");
  std::vector<FpVec> digits(N);
  for (int64_t x = 0; x < N; ++x) digits[x] = g.digits(x);

  std::vector<CharacterSum> partial(N, CharacterSum(g.p));
  parallel_for(0, N, [&](int64_t a) {
    const FpMat T = tau.slice(digits[a]);
    for (int64_t b = 0; b < N; ++b) {
      // tau(a, b, c) = l . c with l = T^t b
      const int64_t l = g.index(fp_mul(FpMat(T.transpose()), digits[b], g.p));
      for (int64_t c = 0; c < N; ++c) partial[a].add(g.dot(l, c));
    }
  });
  CharacterSum total(g.p);
  for (const CharacterSum& s : partial) total += s;
  const std::optional<Rational> mean = total.exact_mean();
  if (!mean) throw NumericalFault("analytic_rank_tri: character sum not real");
  if (mean->num <= 0)
    throw NumericalFault("analytic_rank_tri: nonpositive mean " +
                         mean->to_string());
  return {*mean, -std::log(mean->to_double()) / std::log(double(g.p))};
}

Rational slice_mean(const TrilinearForm& tau) {
  const GroupParams g(tau.p(), tau.n());
  std::vector<int64_t> by_rank(tau.n() + 1, 0);
  for (int64_t x = 0; x < g.size; ++x)
    ++by_rank[fp_rank(tau.slice(g.digits(x)), g.p)];
  Rational s(0);
  for (int r = 0; r <= tau.n(); ++r)
    s = s + Rational(by_rank[r], ipow(g.p, r));
  return s / Rational(g.size);
}

Symmetrized symmetrize(const TrilinearForm& tau) {
  const int p = tau.p();
  if (p < 5) throw Error("symmetrize: requires p >= 5");
  TrilinearForm sum(p, tau.n());
  for (const auto& pi : kPermutations) sum = sum + tau.permuted(pi);
  Symmetrized out;
  out.sigma = sum.scaled(inv_mod(6, p));
  out.residual = tau - out.sigma;
  return out;
}

Subadditivity subadditivity_check(const TrilinearForm& sigma,
                                  const TrilinearForm& tau) {
  using boost::multiprecision::cpp_int;
  Subadditivity out;
  out.first = analytic_rank_tri(sigma);
  out.second = analytic_rank_tri(tau);
  out.sum = analytic_rank_tri(sigma + tau);
  const cpp_int num = cpp_int(out.first.mean.num) * out.second.mean.num;
  const cpp_int den = cpp_int(out.first.mean.den) * out.second.mean.den;
  out.holds = cpp_int(out.sum.mean.num) * pow(den, 8) >=
              pow(num, 8) * cpp_int(out.sum.mean.den);
  return out;
}

Box3Check box3_criterion(const TrilinearForm& tau, const GridFn& u,
                         const GridFn& v, const GridFn& w) {
  const GroupParams g(tau.p(), tau.n());
  require_same(g, u.g);
  require_same(g, v.g);
  require_same(g, w.g);
  const int64_t N = g.size;
  if (double(N) * double(N) * double(N) > double(kTripleBudget))
    throw Error("box3_criterion: p^{3n} exceeds budget");
  std::vector<cplx> roots(g.p);
  for (int k = 0; k < g.p; ++k) roots[k] = root_of_unity(g.p, -k);
  std::vector<cplx> partial(N);
  parallel_for(0, N, [&](int64_t a) {
    const FpMat Tt = tau.slice(g.digits(a)).transpose();
    cplx s = 0;
    for (int64_t b = 0; b < N; ++b) {
      const int64_t l = g.index(fp_mul(Tt, g.digits(b), g.p));
      cplx sb = 0;
      for (int64_t c = 0; c < N; ++c) sb += v(b, c) * w(a, c) * roots[g.dot(l, c)];
      s += u(a, b) * sb;
    }
    partial[a] = s;
  });
  cplx total = 0;
  for (const cplx& s : partial) total += s;
  Box3Check out;
  out.value = std::abs(total) / (double(N) * double(N) * double(N));
  out.bound = std::pow(analytic_rank_tri(tau).mean.to_double(), 1.0 / 8);
  out.holds = out.value <= out.bound + 1e-12;
  return out;
}

SliceFamily SliceFamily::of(const TrilinearForm& tau) {
  SliceFamily fam;
  fam.p = tau.p();
  for (int i = 0; i < tau.n(); ++i) {
    FpVec e = FpVec::Zero(tau.n());
    e[i] = 1;
    fam.maps.push_back(tau.slice(e));
  }
  return fam;
}

FpMat SliceFamily::at(const FpVec& x) const {
  if (maps.empty()) throw Error("SliceFamily: empty family");
  FpMat T = FpMat::Zero(maps[0].rows(), maps[0].cols());
  for (int i = 0; i < dim(); ++i) T += x[i] * maps[i];
  return fp_reduce(T, p);
}

LowRankSubspaces lowrank_subspaces(const SliceFamily& fam, int k) {
  const int m = fam.dim();
  if (m == 0) throw Error("lowrank_subspaces: empty family");
  for (const FpMat& M : fam.maps)
    if (M.rows() != m || M.cols() != m)
      throw Error("lowrank_subspaces: slices must be square of the family dimension");
  const GroupParams g(fam.p, m);
  const int p = fam.p;

  LowRankSubspaces out{Subspace(g), Subspace(g), Subspace(g), -1, FpVec()};
  for (int64_t x = 0; x < g.size; ++x) {
    const FpVec xd = g.digits(x);
    const int r = fp_rank(fam.at(xd), p);
    if (r > k)
      throw Error("lowrank_subspaces: a slice has rank " + std::to_string(r) +
                  " above " + std::to_string(k));
    if (r > out.max_rank) {
      out.max_rank = r;
      out.pivot = xd;
    }
  }
  const int r = out.max_rank;
  const FpMat T = fam.at(out.pivot);

  // Q = [C | K] with K = ker T; then T Q = [T C | 0] and T C has full rank r.
  const FpMat K = fp_kernel(T, p);
  const FpMat C = fp_complement(FpMat(K.transpose()), m, p).transpose();
  FpMat Q(m, m);
  Q << C, K;
  const FpMat TC = fp_mul(T, C, p);
  const FpMat D = fp_complement(FpMat(TC.transpose()), m, p).transpose();
  FpMat Pinv(m, m);
  Pinv << TC, D;
  const std::optional<FpMat> P = fp_inverse(Pinv, p);
  if (!P) throw NumericalFault("lowrank_subspaces: range basis is singular");

  // W = {u : the top-left r x r block of P T_u Q vanishes}.
  FpMat cond(r * r, m);
  for (int i = 0; i < m; ++i) {
    const FpMat B = fp_mul(fp_mul(*P, fam.maps[i], p), Q, p);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) cond(a * r + b, i) = B(a, b);
  }
  const FpMat Wb = fp_kernel(cond, p);
  out.W = Subspace::span(g, FpMat(Wb.transpose()));
  out.E = Subspace::span(g, FpMat(K.transpose()));
  out.F = Subspace::span(g, FpMat(TC.transpose()));
  return out;
}

bool lowrank_containment(const SliceFamily& fam, const LowRankSubspaces& s) {
  const GroupParams& g = s.W.group();
  for (int64_t x : s.W.elements()) {
    const FpMat T = fam.at(g.digits(x));
    for (int64_t u : s.E.elements())
      if (!s.F.contains(fp_mul(T, g.digits(u), fam.p))) return false;
  }
  return true;
}

Subspace low_slice_rank_subspace(const TrilinearForm& tau, int bound) {
  const GroupParams g(tau.p(), tau.n());
  const int n = g.n, p = g.p;
  std::vector<FpMat> slices(g.size);
  for (int64_t x = 0; x < g.size; ++x) slices[x] = tau.slice(g.digits(x));
  auto ok = [&](const Subspace& V) {
    for (int64_t x : V.elements())
      if (fp_rank(slices[x], p) > bound) return false;
    return true;
  };
  for (int c = 0; c <= n; ++c) {
    const int64_t count = group_power(p, c * n);
    if (count > kTripleBudget)
      throw Error("low_slice_rank_subspace: search exceeds budget");
    for (int64_t i = 0; i < count; ++i) {
      FpMat R(c, n);
      int64_t t = i;
      for (int r = 0; r < c; ++r)
        for (int j = n - 1; j >= 0; --j) {
          R(r, j) = t % p;
          t /= p;
        }
      // Each subspace once: keep only full-rank matrices already reduced.
      const Rref rr = fp_rref(R, p);
      if (int(rr.pivots.size()) != c || rr.m != R) continue;
      const Subspace V = Subspace::span(g, R).annihilator();
      if (ok(V)) return V;
    }
  }
  throw NumericalFault("low_slice_rank_subspace: zero subspace rejected");
}

LowerPhase LowerPhase::zero(int p, int n) {
  LowerPhase h;
  h.p = p;
  h.Mab = h.Mbc = h.Mac = FpMat::Zero(n, n);
  h.la = h.lb = h.lc = FpVec::Zero(n);
  return h;
}

int64_t LowerPhase::eval(const FpVec& a, const FpVec& b, const FpVec& c) const {
  int64_t s = c0;
  s += a.dot(fp_mul(Mab, b, p)) + b.dot(fp_mul(Mbc, c, p)) +
       a.dot(fp_mul(Mac, c, p));
  s += la.dot(a) + lb.dot(b) + lc.dot(c);
  return mod(s, p);
}

LowerPhase LowerPhase::shifted(const FpVec& a0, const FpVec& b0,
                               const FpVec& c0v) const {
  LowerPhase h = *this;
  const FpMat MabT = Mab.transpose(), MbcT = Mbc.transpose(),
              MacT = Mac.transpose();
  h.la = fp_reduce(la + Mab * b0 + Mac * c0v, p);
  h.lb = fp_reduce(lb + MabT * a0 + Mbc * c0v, p);
  h.lc = fp_reduce(lc + MbcT * b0 + MacT * a0, p);
  h.c0 = mod(eval(a0, b0, c0v), p);
  return h;
}

LowerPhase trilinear_shift(const TrilinearForm& tau, const FpVec& a0,
                           const FpVec& b0, const FpVec& c0) {
  const int p = tau.p(), n = tau.n();
  LowerPhase h = LowerPhase::zero(p, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int64_t t = tau.at(i, j, k);
        if (t == 0) continue;
        h.Mbc(j, k) -= t * a0[i];
        h.Mac(i, k) -= t * b0[j];
        h.Mab(i, j) -= t * c0[k];
        h.lc[k] += t * a0[i] * b0[j];
        h.lb[j] += t * a0[i] * c0[k];
        h.la[i] += t * b0[j] * c0[k];
      }
  h.Mab = fp_reduce(h.Mab, p);
  h.Mbc = fp_reduce(h.Mbc, p);
  h.Mac = fp_reduce(h.Mac, p);
  h.la = fp_reduce(h.la, p);
  h.lb = fp_reduce(h.lb, p);
  h.lc = fp_reduce(h.lc, p);
  h.c0 = mod(-tau.eval(a0, b0, c0), p);
  return h;
}

namespace {

using CubeWeight = std::function<cplx(int64_t, int64_t, int64_t)>;

// E_x E_{a in A, b in B, c in C} d_{a,b,c} f(x) weight(a, b, c). The x and c
// averages come from one correlation per (a, b).
cplx cube_average(const GroupFn& f, const std::vector<int64_t>& A,
                  const std::vector<int64_t>& B, const std::vector<int64_t>& C,
                  const CubeWeight& weight) {
  std::vector<cplx> partial(A.size());
  parallel_for(0, int64_t(A.size()), [&](int64_t i) {
    const GroupFn da = derivative(f, A[i]);
    cplx s = 0;
    for (int64_t b : B) {
      const GroupFn dab = derivative(da, b);
      const GroupFn auto_corr = barconv(dab, dab);
      for (int64_t c : C) s += auto_corr[c] * weight(A[i], b, c);
    }
    partial[i] = s;
  });
  cplx total = 0;
  for (const cplx& s : partial) total += s;
  return total / (double(A.size()) * double(B.size()) * double(C.size()));
}

std::vector<int64_t> translate(const GroupParams& g, const std::vector<int64_t>& V,
                               int64_t a0) {
  std::vector<int64_t> out;
  out.reserve(V.size());
  for (int64_t v : V) out.push_back(g.add(v, a0));
  return out;
}

// Least element of each coset of V inside V0, ascending.
std::vector<int64_t> coset_reps(const GroupParams& g, const Subspace& V0,
                                const Subspace& V) {
  const std::vector<int64_t> inner = V.elements();
  std::vector<uint8_t> seen(g.size, 0);
  std::vector<int64_t> reps;
  for (int64_t x : V0.elements()) {
    if (seen[x]) continue;
    reps.push_back(x);
    for (int64_t v : inner) seen[g.add(x, v)] = 1;
  }
  return reps;
}

std::vector<FpVec> all_digits(const GroupParams& g) {
  std::vector<FpVec> d(g.size);
  for (int64_t x = 0; x < g.size; ++x) d[x] = g.digits(x);
  return d;
}

LowerPhase add_phases(const LowerPhase& x, const LowerPhase& y) {
  LowerPhase h = x;
  h.Mab = fp_reduce(x.Mab + y.Mab, x.p);
  h.Mbc = fp_reduce(x.Mbc + y.Mbc, x.p);
  h.Mac = fp_reduce(x.Mac + y.Mac, x.p);
  h.la = fp_reduce(x.la + y.la, x.p);
  h.lb = fp_reduce(x.lb + y.lb, x.p);
  h.lc = fp_reduce(x.lc + y.lc, x.p);
  h.c0 = mod(x.c0 + y.c0, x.p);
  return h;
}

}  // namespace

cplx restricted_correlation(const GroupFn& f, const LowerPhase& h,
                            const TrilinearForm& tau, const Subspace& V,
                            int64_t w) {
  const GroupParams& g = f.g;
  if (g.p != tau.p() || g.n != tau.n()) throw Error("restricted_correlation: group mismatch");
  GroupFn shifted(g);
  for (int64_t x = 0; x < g.size; ++x) shifted[x] = f[g.sub(x, w)];
  const std::vector<FpVec> d = all_digits(g);
  const std::vector<int64_t> el = V.elements();
  return cube_average(shifted, el, el, el, [&](int64_t a, int64_t b, int64_t c) {
    return root_of_unity(g.p, h.eval(d[a], d[b], d[c]) + tau.eval(d[a], d[b], d[c]));
  });
}

PassToSubspace pass_to_subspace(const GroupFn& f, const LowerPhase& h,
                                const TrilinearForm& tau, const Subspace& V0,
                                const Subspace& V) {
  const GroupParams& g = f.g;
  if (!(V.intersect(V0) == V)) throw Error("pass_to_subspace: V must lie in V0");
  const std::vector<FpVec> d = all_digits(g);
  auto phase = [&](const LowerPhase& hh) {
    return [&g, &d, &tau, hh](int64_t a, int64_t b, int64_t c) {
      return root_of_unity(g.p, hh.eval(d[a], d[b], d[c]) + tau.eval(d[a], d[b], d[c]));
    };
  };
  PassToSubspace out;
  out.alpha = std::abs(restricted_correlation(f, h, tau, V0, 0));

  const std::vector<int64_t> reps = coset_reps(g, V0, V);
  const std::vector<int64_t> inner = V.elements();
  bool have = false;
  for (int64_t a0 : reps)
    for (int64_t b0 : reps)
      for (int64_t c0 : reps) {
        const double coset = std::abs(cube_average(
            f, translate(g, inner, a0), translate(g, inner, b0),
            translate(g, inner, c0), phase(h)));
        out.coset_max = std::max(out.coset_max, coset);
        const LowerPhase h1 =
            add_phases(h.shifted(d[a0], d[b0], d[c0]),
                       trilinear_shift(tau, d[a0], d[b0], d[c0]));
        const int64_t w = g.add(g.add(a0, b0), c0);
        const double value = std::abs(restricted_correlation(f, h1, tau, V, w));
        if (!have || value > out.value + 1e-12) {
          have = true;
          out.a0 = d[a0];
          out.b0 = d[b0];
          out.c0 = d[c0];
          out.w = w;
          out.h1 = h1;
          out.value = value;
        }
      }
  out.preserved = out.value >= out.alpha - 1e-9;
  return out;
}

SymmetryReport symmetry_pipeline(const GroupFn& f, const TrilinearForm& tau,
                                 const AffineMap& rho_lin,
                                 const AffineMap& sigma_lin) {
  const GroupParams& g = f.g;
  if (g.p != tau.p() || g.n != tau.n()) throw Error("symmetry_pipeline: group mismatch");
  const std::vector<FpVec> d = all_digits(g);
  std::vector<int64_t> all(g.size);
  for (int64_t x = 0; x < g.size; ++x) all[x] = x;

  SymmetryReport out;
  out.alpha = std::abs(cube_average(f, all, all, all, [&](int64_t a, int64_t b, int64_t c) {
    const int64_t ph = tau.eval(d[a], d[b], d[c]) +
                       g.dot(rho_lin.apply(g, a), c) +
                       g.dot(sigma_lin.apply(g, b), c);
    return root_of_unity(g.p, -ph);
  }));
  const Symmetrized s = symmetrize(tau);
  out.sigma = s.sigma;
  for (size_t i = 0; i < kPermutations.size(); ++i)
    out.pair_ranks[i] = analytic_rank_tri(tau - tau.permuted(kPermutations[i]));
  out.residual = analytic_rank_tri(s.residual);
  out.asserted = out.alpha >= 1e-9;
  if (out.asserted) {
    const double bound = std::max(0.0, -std::log(out.alpha) / std::log(double(g.p)));
    out.partial_bound = bound;
    out.full_bound = 4096 * bound;
    // kPermutations[1] swaps the last two slots.
    out.partial_holds = out.pair_ranks[1].rank <= out.partial_bound + 1e-9;
    out.full_holds = out.residual.rank <= out.full_bound + 1e-9;
  }
  return out;
}

Kappa kappa_from_sigma(const TrilinearForm& sigma) {
  const int p = sigma.p(), n = sigma.n();
  if (p < 5) throw Error("kappa_from_sigma: requires p >= 5");
  const GroupParams g(p, n);
  if (double(g.size) * g.size * g.size * g.size > double(kQuadrupleBudget))
    throw Error("kappa_from_sigma: p^{4n} exceeds budget");

  Kappa out{PolyPhase(p, n), std::nullopt, 0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::vector<int> m = {i, j, k};
        out.kappa.set(m, out.kappa.coeff(m) + sigma.at(i, j, k));
      }

  const int64_t N = g.size;
  const std::vector<int64_t> kap = out.kappa.table(g);
  const std::vector<FpVec> d = all_digits(g);
  std::vector<int64_t> sig(N * N * N);
  for (int64_t a = 0; a < N; ++a)
    for (int64_t b = 0; b < N; ++b)
      for (int64_t c = 0; c < N; ++c)
        sig[(a * N + b) * N + c] = sigma.eval(d[a], d[b], d[c]);

  // Lowest (a, b, c) with sigma != 0 fixes the constant.
  int64_t cstar = -1;
  for (int64_t i = 0; i < N * N * N && cstar < 0; ++i)
    if (sig[i] != 0) {
      const int64_t a = i / (N * N), b = (i / N) % N, c = i % N;
      const int64_t S = -kap[0] + kap[g.neg(a)] + kap[g.neg(b)] + kap[g.neg(c)] -
                        kap[g.neg(g.add(a, b))] - kap[g.neg(g.add(b, c))] -
                        kap[g.neg(g.add(a, c))] + kap[g.neg(g.add(g.add(a, b), c))];
      cstar = mod(mod(S, p) * inv_mod(sig[i], p), p);
    }

  std::vector<uint8_t> bad(N, 0);
  parallel_for(0, N, [&](int64_t x) {
    for (int64_t a = 0; a < N && !bad[x]; ++a) {
      const int64_t xa = g.sub(x, a);
      for (int64_t b = 0; b < N; ++b) {
        const int64_t xb = g.sub(x, b), xab = g.sub(xa, b);
        for (int64_t c = 0; c < N; ++c) {
          const int64_t S = -kap[x] + kap[xa] + kap[xb] + kap[g.sub(x, c)] -
                            kap[xab] - kap[g.sub(xb, c)] - kap[g.sub(xa, c)] +
                            kap[g.sub(xab, c)];
          const int64_t want = cstar < 0 ? 0 : cstar * sig[(a * N + b) * N + c];
          if (mod(S - want, p) != 0) bad[x] = 1;
        }
      }
    }
  });
  if (std::any_of(bad.begin(), bad.end(), [](uint8_t v) { return v != 0; }))
    throw NumericalFault("kappa_from_sigma: alternating sum not proportional to sigma");
  out.points = N * N * N * N;
  if (cstar >= 0) out.cstar = cstar;
  return out;
}

U3Lower u3_lower(const GroupFn& g, const GridFn& u, const GridFn& v,
                 const GridFn& w) {
  require_same(g.g, u.g);
  require_same(g.g, v.g);
  require_same(g.g, w.g);
  std::vector<int64_t> all(g.size());
  for (int64_t x = 0; x < g.size(); ++x) all[x] = x;
  U3Lower out;
  out.alpha = std::abs(cube_average(g, all, all, all, [&](int64_t a, int64_t b, int64_t c) {
    return u(a, b) * v(b, c) * w(a, c);
  }));
  out.u3 = uk_norm(g, 3).value;
  out.holds = out.u3 >= out.alpha - 1e-12;
  return out;
}

QuadSearch quad_phase_search(const GroupFn& g, int64_t budget) {
  const GroupParams& G = g.g;
  const int p = G.p, n = G.n;
  std::vector<std::vector<int>> monos;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) monos.push_back({i, j});
  const double quads = std::pow(double(p), double(monos.size()));
  if (quads * double(G.size) * double(G.size) > double(budget))
    throw Error("quad_phase_search: candidate count exceeds budget");
  const int64_t Q = int64_t(quads);

  auto quad_of = [&](int64_t qi) {
    PolyPhase q(p, n);
    for (const auto& m : monos) {
      q.set(m, qi % p);
      qi /= p;
    }
    return q;
  };
  std::vector<int64_t> best_r(Q);
  std::vector<cplx> best_v(Q);
  parallel_for(0, Q, [&](int64_t qi) {
    const std::vector<int64_t> tab = quad_of(qi).table(G);
    GroupFn h(G);
    for (int64_t x = 0; x < G.size; ++x) h[x] = g[x] * root_of_unity(p, -tab[x]);
    const GroupFn hh = dft(h);
    int64_t arg = 0;
    for (int64_t r = 1; r < G.size; ++r)
      if (std::abs(hh[r]) > std::abs(hh[arg]) + 1e-12) arg = r;
    best_r[qi] = arg;
    best_v[qi] = hh[arg];
  });
  int64_t arg = 0;
  for (int64_t qi = 1; qi < Q; ++qi)
    if (std::abs(best_v[qi]) > std::abs(best_v[arg]) + 1e-12) arg = qi;

  QuadSearch out;
  out.q = quad_of(arg);
  const FpVec r = G.digits(best_r[arg]);
  for (int i = 0; i < n; ++i) out.q.set({i}, r[i]);
  out.corr = best_v[arg];
  out.abs_corr = std::abs(out.corr);
  out.candidates = Q * G.size;
  return out;
}

}  // namespace ulab
