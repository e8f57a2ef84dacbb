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

#include "ulab/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ulab/grid.hpp"

namespace ulab {

namespace {

// Digits of i in base p, length k, least significant first.
FpVec base_digits(int64_t i, int p, int k) {
  FpVec d(k);
  for (int j = 0; j < k; ++j) {
    d[j] = i % p;
    i /= p;
  }
  return d;
}

int64_t base_index(const FpVec& d, int p) {
  int64_t i = 0;
  for (Eigen::Index j = d.size() - 1; j >= 0; --j) i = i * p + mod(d[j], p);
  return i;
}

int64_t checked_pow(int p, int k, int64_t cap, const char* what) {
  int64_t s = 1;
  for (int i = 0; i < k; ++i) {
    s *= p;
    if (s > cap) throw Error(std::string(what) + ": p^k exceeds the enumeration cap");
  }
  return s;
}

constexpr int64_t kScanCap = 1 << 22;

// Basis columns of a subspace.
FpMat columns_of(const Subspace& s) { return s.basis().transpose(); }

Subspace span_columns(const GroupParams& g, const FpMat& cols) {
  return Subspace::span(g, cols.transpose());
}

}  // namespace

AffineForm AffineForm::zero(int n) {
  AffineForm f;
  f.T = FpMat::Zero(n, n);
  f.a = FpVec::Zero(n);
  f.b = FpVec::Zero(n);
  return f;
}

AffineForm AffineForm::bilinear(FpMat T) {
  AffineForm f = zero(int(T.rows()));
  f.T = std::move(T);
  return f;
}

BiAffineMap::BiAffineMap(const GroupParams& g, std::vector<AffineForm> coords)
    : g_(g) {
  for (auto& c : coords) push_back(std::move(c));
}

void BiAffineMap::push_back(AffineForm f) {
  const int n = g_.n;
  if (f.T.rows() != n || f.T.cols() != n || f.a.size() != n || f.b.size() != n)
    throw Error("BiAffineMap: coordinate shape does not match n");
  f.T = fp_reduce(f.T, g_.p);
  for (int i = 0; i < n; ++i) {
    f.a[i] = mod(f.a[i], g_.p);
    f.b[i] = mod(f.b[i], g_.p);
  }
  f.lambda = mod(f.lambda, g_.p);
  c_.push_back(std::move(f));
}

BiAffineMap BiAffineMap::random(const GroupParams& g, int k, Rng& rng,
                                bool bilinear_only) {
  BiAffineMap m(g);
  const int n = g.n, p = g.p;
  for (int i = 0; i < k; ++i) {
    AffineForm f = AffineForm::bilinear(fp_random(n, n, p, rng));
    if (!bilinear_only) {
      f.a = fp_random(n, 1, p, rng).col(0);
      f.b = fp_random(n, 1, p, rng).col(0);
      f.lambda = rng.uniform_int(0, p - 1);
    }
    m.push_back(std::move(f));
  }
  return m;
}

int64_t BiAffineMap::eval(int i, int64_t x, int64_t y) const {
  const AffineForm& f = c_[i];
  const FpVec xd = g_.digits(x), yd = g_.digits(y);
  int64_t s = f.lambda;
  for (int r = 0; r < g_.n; ++r) {
    int64_t ty = 0;
    for (int c = 0; c < g_.n; ++c) ty += f.T(r, c) * yd[c];
    s += xd[r] * (ty + f.b[r]) + f.a[r] * yd[r];
  }
  return mod(s, g_.p);
}

FpVec BiAffineMap::eval(int64_t x, int64_t y) const {
  const FpVec xd = g_.digits(x), yd = g_.digits(y);
  FpVec out(k());
  for (int i = 0; i < k(); ++i) {
    const AffineForm& f = c_[i];
    out[i] = mod(xd.dot(f.T * yd + f.b) + f.a.dot(yd) + f.lambda, g_.p);
  }
  return out;
}

int64_t BiAffineMap::eval_index(int64_t x, int64_t y) const {
  checked_pow(g_.p, k(), int64_t(1) << 40, "eval_index");
  return base_index(eval(x, y), g_.p);
}

bool BiAffineMap::is_bilinear() const {
  for (const auto& f : c_)
    if (!f.a.isZero() || !f.b.isZero() || f.lambda != 0) return false;
  return true;
}

FpMat BiAffineMap::combination(const FpVec& u) const {
  if (u.size() != k()) throw Error("BiAffineMap: combination length must be k");
  FpMat T = FpMat::Zero(g_.n, g_.n);
  for (int i = 0; i < k(); ++i) T += u[i] * c_[i].T;
  return fp_reduce(T, g_.p);
}

BiAffineParts biaffine_parts(const BiAffineMap& beta) {
  const GroupParams& g = beta.group();
  const int n = g.n, p = g.p, k = beta.k();
  BiAffineParts out;
  out.z = beta.eval(0, 0);
  out.A = FpMat::Zero(k, n);
  out.B = FpMat::Zero(k, n);
  std::vector<int64_t> e(n);
  for (int i = 0; i < n; ++i) {
    FpVec d = FpVec::Zero(n);
    d[i] = 1;
    e[i] = g.index(d);
  }
  for (int i = 0; i < n; ++i) {
    // A x = beta(x, 0) - beta(0, 0), B y = beta(0, y) - beta(0, 0).
    out.A.col(i) = beta.eval(e[i], 0) - out.z;
    out.B.col(i) = beta.eval(0, e[i]) - out.z;
  }
  out.A = fp_reduce(out.A, p);
  out.B = fp_reduce(out.B, p);
  std::vector<AffineForm> coords(k, AffineForm::zero(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      // gamma(x, y) = beta(x, y) - beta(x, 0) - beta(0, y) + beta(0, 0)
      FpVec v = beta.eval(e[r], e[c]) - beta.eval(e[r], 0) - beta.eval(0, e[c]) + out.z;
      for (int i = 0; i < k; ++i) coords[i].T(r, c) = mod(v[i], p);
    }
  out.gamma = BiAffineMap(g, std::move(coords));
  return out;
}

int algebraic_rank(const FpMat& T, int p) { return fp_rank(T, p); }

Rational bilinear_character_mean(const FpMat& T, int p) {
  const int n = int(T.rows());
  GroupParams g(p, n);
  std::vector<FpVec> ty(g.size);
  for (int64_t y = 0; y < g.size; ++y) ty[y] = T * g.digits(y);
  CharacterSum cs(p);
  for (int64_t x = 0; x < g.size; ++x) {
    const FpVec xd = g.digits(x);
    for (int64_t y = 0; y < g.size; ++y) cs.add(xd.dot(ty[y]));
  }
  auto m = cs.exact_mean();
  if (!m) throw NumericalFault("analytic rank: character mean is not real");
  return *m;
}

double analytic_rank_bilinear(const FpMat& T, int p) {
  const Rational m = bilinear_character_mean(T, p);
  if (m.num != 1) throw NumericalFault("analytic rank: mean " + m.to_string() +
                                       " is not a power of 1/p");
  int r = 0;
  for (int64_t d = m.den; d > 1; d /= p) {
    if (d % p) throw NumericalFault("analytic rank: mean is not a power of 1/p");
    ++r;
  }
  return double(r);
}

RankScan map_rank_scan(const BiAffineMap& beta) {
  RankScan s;
  const int k = beta.k(), p = beta.group().p;
  if (k == 0) return s;
  const int64_t total = checked_pow(p, k, kScanCap, "map_rank");
  s.ranks.assign(total, 0);
  parallel_for(1, total, [&](int64_t i) {
    s.ranks[i] = fp_rank(beta.combination(base_digits(i, p, k)), p);
  });
  int64_t best = 1;
  for (int64_t i = 2; i < total; ++i)
    if (s.ranks[i] < s.ranks[best]) best = i;
  s.rank = s.ranks[best];
  s.argmin = base_digits(best, p, k);
  return s;
}

int map_rank(const BiAffineMap& beta) { return map_rank_scan(beta).rank; }

bool normality(const std::vector<int64_t>& points, const BiAffineMap& beta,
               Axis axis) {
  const GroupParams& g = beta.group();
  const int64_t rk = int64_t(points.size()) * beta.k();
  int64_t count = 0;
  for (int64_t s = 0; s < g.size; ++s) {
    bool all = true;
    for (int64_t q : points) {
      FpVec v = axis == Axis::kX ? beta.eval(q, s) : beta.eval(s, q);
      if (!v.isZero()) {
        all = false;
        break;
      }
    }
    count += all;
  }
  // count == p^{n - rk}, i.e. count p^{rk} == p^n.
  if (rk > g.n) return false;
  return count * ipow(g.p, int(rk)) == g.size;
}

IndStep indstep(const BiAffineMap& beta, int t) {
  const GroupParams& g = beta.group();
  IndStep out{false, FpVec(), Subspace(g), Subspace(g), map_rank_scan(beta)};
  if (out.scan.rank >= t) {
    out.high_rank = true;
    return out;
  }
  out.u = out.scan.argmin;
  const FpMat T = beta.combination(out.u);
  out.V = span_columns(g, fp_kernel(T.transpose(), g.p));
  out.W = span_columns(g, fp_kernel(T, g.p));
  return out;
}

namespace {

// Restricted bilinear parts B_X^T (sum_i L_{l,i} T_i) B_Y for each row l.
std::vector<FpMat> restricted_forms(const BiAffineMap& beta, const FpMat& L,
                                    const FpMat& BX, const FpMat& BY) {
  const int p = beta.group().p;
  std::vector<FpMat> out;
  for (Eigen::Index l = 0; l < L.rows(); ++l) {
    const FpMat T = beta.combination(L.row(l).transpose());
    out.push_back(fp_mul(fp_mul(BX.transpose(), T, p), BY, p));
  }
  return out;
}

RankScan scan_forms(const std::vector<FpMat>& forms, int p, int rows, int cols) {
  RankScan s;
  const int k = int(forms.size());
  if (k == 0) return s;
  const int64_t total = checked_pow(p, k, kScanCap, "bohr_decompose");
  s.ranks.assign(total, 0);
  parallel_for(1, total, [&](int64_t i) {
    const FpVec c = base_digits(i, p, k);
    FpMat M = FpMat::Zero(rows, cols);
    for (int l = 0; l < k; ++l) M += c[l] * forms[l];
    s.ranks[i] = fp_rank(fp_reduce(M, p), p);
  });
  int64_t best = 1;
  for (int64_t i = 2; i < total; ++i)
    if (s.ranks[i] < s.ranks[best]) best = i;
  s.rank = s.ranks[best];
  s.argmin = base_digits(best, p, k);
  return s;
}

// Projection onto the first r coordinates of the basis [B0 | B1].
int64_t project(const GroupParams& g, const FpMat& inv, const FpMat& B0,
                int64_t x) {
  if (B0.cols() == 0) return 0;
  const FpVec c = fp_mul(inv, g.digits(x), g.p);
  return g.index(fp_mul(B0, FpVec(c.head(B0.cols())), g.p));
}

FpMat direct_sum_inverse(const FpMat& B0, const FpMat& B1, int p) {
  FpMat full(B0.rows(), B0.cols() + B1.cols());
  full << B0, B1;
  auto inv = fp_inverse(full, p);
  if (!inv) throw NumericalFault("bohr_decompose: subspaces are not a direct sum");
  return *inv;
}

}  // namespace

int64_t BohrDecomposition::x0(int64_t x) const {
  return project(g, x_inverse, columns_of(X0), x);
}

int64_t BohrDecomposition::y0(int64_t y) const {
  return project(g, y_inverse, columns_of(Y0), y);
}

BohrDecomposition bohr_decompose(const BiAffineMap& beta, int t) {
  const GroupParams& g = beta.group();
  const int n = g.n, p = g.p, k = beta.k();
  BohrDecomposition d(g);
  d.beta = beta;
  d.t = t;
  FpMat BX = FpMat::Identity(n, n), BY = FpMat::Identity(n, n);
  FpMat U(0, k);
  for (;;) {
    const FpMat L = fp_complement(U, k, p);
    const std::vector<FpMat> forms = restricted_forms(beta, L, BX, BY);
    RankScan scan = scan_forms(forms, p, int(BX.cols()), int(BY.cols()));
    if (scan.rank >= t) {
      d.L = L;
      d.certificate = std::move(scan);
      break;
    }
    if (d.rounds >= k) throw NumericalFault("bohr_decompose: more than k rounds");
    FpMat M = FpMat::Zero(BX.cols(), BY.cols());
    FpVec u = FpVec::Zero(k);
    for (Eigen::Index l = 0; l < L.rows(); ++l) {
      M += scan.argmin[l] * forms[l];
      u += scan.argmin[l] * L.row(l).transpose();
    }
    M = fp_reduce(M, p);
    for (int i = 0; i < k; ++i) u[i] = mod(u[i], p);
    BX = fp_mul(BX, fp_kernel(M.transpose(), p), p);
    BY = fp_mul(BY, fp_kernel(M, p), p);
    d.peeled.push_back(u);
    FpMat U2(U.rows() + 1, k);
    U2 << U, u.transpose();
    U = U2;
    ++d.rounds;
  }
  d.BX1 = BX;
  d.BY1 = BY;
  d.X1 = span_columns(g, BX);
  d.Y1 = span_columns(g, BY);
  // Standard-basis complements; basis() rows are echelon so pivots match.
  d.X0 = Subspace::span(g, fp_complement(BX.transpose(), n, p));
  d.Y0 = Subspace::span(g, fp_complement(BY.transpose(), n, p));
  d.x_inverse = direct_sum_inverse(columns_of(d.X0), BX, p);
  d.y_inverse = direct_sum_inverse(columns_of(d.Y0), BY, p);
  return d;
}

Cell cell_of(const BohrDecomposition& d, int64_t x, int64_t y) {
  return {d.x0(x), d.y0(y), d.beta.eval_index(x, y)};
}

std::vector<std::pair<Cell, std::vector<int64_t>>> bohr_cells(
    const BohrDecomposition& d) {
  const GroupParams& g = d.g;
  const FpMat X0c = columns_of(d.X0), Y0c = columns_of(d.Y0);
  std::vector<int64_t> px(g.size), py(g.size);
  for (int64_t x = 0; x < g.size; ++x) {
    px[x] = project(g, d.x_inverse, X0c, x);
    py[x] = project(g, d.y_inverse, Y0c, x);
  }
  std::map<Cell, std::vector<int64_t>> cells;
  for (int64_t x = 0; x < g.size; ++x)
    for (int64_t y = 0; y < g.size; ++y)
      cells[{px[x], py[y], d.beta.eval_index(x, y)}].push_back(x * g.size + y);
  return {cells.begin(), cells.end()};
}

BiAffineMap restrict_to_cell(const BohrDecomposition& d, int64_t v, int64_t w) {
  const GroupParams& g = d.g;
  const int p = g.p;
  const int d1 = int(d.BX1.cols()), d2 = int(d.BY1.cols());
  // Pad to a common dimension; padded coordinates do not affect the value.
  const int m = std::max({d1, d2, 1});
  GroupParams h(p, m);
  const FpVec vd = g.digits(v), wd = g.digits(w);
  auto value = [&](const FpVec& a, const FpVec& b) {
    const FpVec x = vd + fp_mul(d.BX1, FpVec(a.head(d1)), p);
    const FpVec y = wd + fp_mul(d.BY1, FpVec(b.head(d2)), p);
    const FpVec z = d.beta.eval(g.index(x), g.index(y));
    return fp_mul(d.L, z, p);
  };
  const int kk = int(d.L.rows());
  std::vector<AffineForm> coords(kk, AffineForm::zero(m));
  const FpVec zero = FpVec::Zero(m);
  const FpVec z0 = value(zero, zero);
  auto unit = [&](int i) {
    FpVec e = FpVec::Zero(m);
    e[i] = 1;
    return e;
  };
  std::vector<FpVec> xa(d1), yb(d2);
  for (int i = 0; i < d1; ++i) xa[i] = value(unit(i), zero);
  for (int j = 0; j < d2; ++j) yb[j] = value(zero, unit(j));
  for (int l = 0; l < kk; ++l) {
    coords[l].lambda = z0[l];
    for (int i = 0; i < d1; ++i) coords[l].b[i] = mod(xa[i][l] - z0[l], p);
    for (int j = 0; j < d2; ++j) coords[l].a[j] = mod(yb[j][l] - z0[l], p);
  }
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) {
      const FpVec z = value(unit(i), unit(j));
      for (int l = 0; l < kk; ++l)
        coords[l].T(i, j) = mod(z[l] - xa[i][l] - yb[j][l] + z0[l], p);
    }
  return BiAffineMap(h, std::move(coords));
}

CellVerification verify_cells(const BohrDecomposition& d) {
  CellVerification out;
  // The restriction depends only on (v, w); every such pair has cells.
  const std::vector<int64_t> vs = d.X0.elements(), ws = d.Y0.elements();
  for (int64_t v : vs)
    for (int64_t w : ws) {
      const int r = map_rank(restrict_to_cell(d, v, w));
      ++out.cells;
      out.min_rank = std::min(out.min_rank, r);
      if (r < d.t) ++out.failures;
    }
  return out;
}

GridFn avg_projection(const GridFn& F, const BiAffineMap& beta) {
  const GroupParams& g = F.g;
  require_same(g, beta.group());
  const int64_t N = g.size;
  std::map<std::vector<int64_t>, int> level;
  std::vector<int> label(N * N);
  for (int64_t x = 0; x < N; ++x)
    for (int64_t y = 0; y < N; ++y) {
      const FpVec z = beta.eval(x, y);
      std::vector<int64_t> key(z.data(), z.data() + z.size());
      auto it = level.emplace(std::move(key), int(level.size())).first;
      label[x * N + y] = it->second;
    }
  std::vector<cplx> sum(level.size(), 0.0);
  std::vector<int64_t> cnt(level.size(), 0);
  for (int64_t q = 0; q < N * N; ++q) {
    sum[label[q]] += F.v(q / N, q % N);
    ++cnt[label[q]];
  }
  GridFn out(g);
  for (int64_t q = 0; q < N * N; ++q)
    out.v(q / N, q % N) = sum[label[q]] / double(cnt[label[q]]);
  return out;
}

double surjective_fraction(const BiAffineMap& beta, const Subspace& U,
                           const Subspace& V) {
  const GroupParams& g = beta.group();
  const int p = g.p, k = beta.k();
  const FpMat BV = columns_of(V);
  const std::vector<int64_t> xs = U.elements();
  int64_t good = 0;
  for (int64_t x : xs) {
    const FpVec xd = g.digits(x);
    FpMat R(k, g.n);
    for (int i = 0; i < k; ++i) {
      const AffineForm& f = beta.coords()[i];
      R.row(i) = (f.T.transpose() * xd + f.a).transpose();
    }
    good += fp_rank(fp_mul(R, BV, p), p) == k;
  }
  return double(good) / double(xs.size());
}

GridFn cell_indicator(const BohrDecomposition& d, const Cell& c) {
  GridFn out(d.g);
  for (const auto& [cell, pts] : bohr_cells(d))
    if (cell == c)
      for (int64_t q : pts) out.v(q / d.g.size, q % d.g.size) = 1.0;
  return out;
}

double cell_gen_inner(const BohrDecomposition& d, const std::array<Cell, 8>& c) {
  std::array<GridFn, 8> b;
  auto cells = bohr_cells(d);
  for (int i = 0; i < 8; ++i) {
    b[i] = GridFn(d.g);
    for (const auto& [cell, pts] : cells)
      if (cell == c[i])
        for (int64_t q : pts) b[i].v(q / d.g.size, q % d.g.size) = 1.0;
  }
  const GridFn m1 = mixed_conv(b[0], b[1], b[2], b[3]);
  const GridFn m2 = mixed_conv(b[4], b[5], b[6], b[7]);
  return (m1.v.array() * m2.v.array().conjugate()).sum().real() /
         double(m1.v.size());
}

QrSample qr_sample_check(const std::vector<std::vector<uint8_t>>& sets,
                         const std::vector<double>& f, double theta,
                         std::optional<double> alpha) {
  const int64_t m = int64_t(sets.size()), X = int64_t(f.size());
  if (m == 0 || X == 0) throw Error("qr_sample_check: empty family or ground set");
  for (const auto& s : sets)
    if (int64_t(s.size()) != X) throw Error("qr_sample_check: set size mismatch");
  QrSample out;
  std::vector<double> bx(X, 0.0);
  for (int64_t x = 0; x < X; ++x) {
    int64_t c = 0;
    for (const auto& s : sets) c += s[x] != 0;
    bx[x] = double(c) / double(m);
  }
  double mean = 0;
  for (double v : bx) mean += v;
  out.alpha = alpha ? *alpha : mean / double(X);
  constexpr double kTol = 1e-12;
  int64_t bad1 = 0;
  for (double v : bx) bad1 += std::abs(v - out.alpha) > kTol;
  out.eps1 = double(bad1) / double(X);
  int64_t bad2 = 0;
  const double a2 = out.alpha * out.alpha;
  for (int64_t x = 0; x < X; ++x)
    for (int64_t y = 0; y < X; ++y) {
      int64_t c = 0;
      for (const auto& s : sets) c += s[x] && s[y];
      bad2 += std::abs(double(c) / double(m) - a2) > kTol;
    }
  out.eps2 = double(bad2) / double(X * X);
  double ef = 0;
  for (double v : f) ef += v;
  ef /= double(X);
  for (const auto& s : sets) {
    double e = 0;
    for (int64_t x = 0; x < X; ++x)
      if (s[x]) e += f[x];
    e /= double(X);
    out.exceptions += std::abs(e - out.alpha * ef) > theta;
  }
  out.bound = (2 * out.alpha * out.eps1 + out.eps2) * double(m) / (theta * theta);
  out.holds = double(out.exceptions) <= out.bound + 1e-9;
  return out;
}

OneSet restrict_to_one_set(const BohrDecomposition& d, const GridFn& mu,
                           const DistFn& phi, const GridFn& xi, double gamma) {
  const int64_t N = d.g.size;
  const double mu8 = arr_functional(mu);
  const double zeta = xi.mean_real();
  OneSet best;
  for (const auto& [cell, pts] : bohr_cells(d)) {
    double mv = 0, xv = 0;
    for (int64_t q : pts) {
      mv += mu.v(q / N, q % N).real();
      xv += xi.v(q / N, q % N).real();
    }
    mv /= double(pts.size());
    xv /= double(pts.size());
    if (mv < mu8 / 2 || xv > zeta / gamma) continue;
    GridFn ind = GridFn::indicator(d.g, pts);
    if (arr_functional(ind) <= 0) continue;
    const double defect = bihom_defect(phi, ind);
    if (!best.found || defect < best.defect) {
      best = {cell, defect, mv, xv, true};
    }
  }
  return best;
}

}  // namespace ulab
