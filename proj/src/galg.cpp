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

#include "ulab/galg.hpp"

#include <algorithm>
#include <cmath>

#include "ulab/grid.hpp"

namespace ulab {

Dist::Dist(const GroupParams& g, std::vector<Entry> entries) : g_(g) {
  std::sort(entries.begin(), entries.end());
  for (const auto& [a, w] : entries) {
    if (a < 0 || a >= g.size) throw Error("Dist: element out of range");
    if (w < 0) throw Error("Dist: negative weight");
    if (!e_.empty() && e_.back().first == a)
      e_.back().second += w;
    else
      e_.emplace_back(a, w);
  }
}

Dist Dist::delta(const GroupParams& g, int64_t a) { return Dist(g, {{a, 1.0}}); }

Dist Dist::uniform(const GroupParams& g) {
  std::vector<Entry> e;
  e.reserve(g.size);
  for (int64_t a = 0; a < g.size; ++a) e.emplace_back(a, 1.0 / double(g.size));
  return Dist(g, std::move(e));
}

Dist Dist::from_dense(const GroupParams& g, const Eigen::VectorXd& w,
                      double floor) {
  Dist d(g);
  for (int64_t a = 0; a < g.size; ++a)
    if (w[a] > floor) d.e_.emplace_back(a, w[a]);
  return d;
}

double Dist::at(int64_t a) const {
  auto it = std::lower_bound(e_.begin(), e_.end(), Entry{a, -1.0});
  return (it != e_.end() && it->first == a) ? it->second : 0.0;
}

double Dist::total() const {
  double s = 0;
  for (const auto& [a, w] : e_) s += w;
  return s;
}

bool Dist::in_simplex(double tol) const { return std::abs(total() - 1.0) <= tol; }

Eigen::VectorXd Dist::dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g_.size);
  for (const auto& [a, w] : e_) out[a] = w;
  return out;
}

Dist Dist::scaled(double c) const {
  if (c < 0) throw Error("Dist: negative scale");
  Dist d(g_);
  for (const auto& [a, w] : e_) d.e_.emplace_back(a, w * c);
  return d;
}

int64_t Dist::argmax(bool* tie) const {
  int64_t best = -1;
  double bw = -1;
  bool t = false;
  for (const auto& [a, w] : e_) {
    if (w > bw + 1e-12) {
      best = a;
      bw = w;
      t = false;
    } else if (std::abs(w - bw) <= 1e-12) {
      t = true;
    }
  }
  if (tie) *tie = t;
  return best < 0 ? 0 : best;
}

Dist dist_product(const Dist& u, const Dist& v) {
  require_same(u.group(), v.group());
  const GroupParams& g = u.group();
  std::vector<Dist::Entry> e;
  e.reserve(u.entries().size() * v.entries().size());
  for (const auto& [a, wa] : u.entries())
    for (const auto& [b, wb] : v.entries()) e.emplace_back(g.add(a, b), wa * wb);
  return Dist(g, std::move(e));
}

Dist adjoint(const Dist& u) {
  std::vector<Dist::Entry> e;
  for (const auto& [a, w] : u.entries()) e.emplace_back(u.group().neg(a), w);
  return Dist(u.group(), std::move(e));
}

double dist_inner(const Dist& u, const Dist& v) {
  require_same(u.group(), v.group());
  double s = 0;
  auto i = u.entries().begin(), j = v.entries().begin();
  while (i != u.entries().end() && j != v.entries().end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

double ddist(const Dist& u, const Dist& v) {
  return u.total() * v.total() - dist_inner(u, v);
}

bool DistFn::valid(double tol) const {
  for (const auto& [i, d] : values) {
    const double t = d.total();
    if (std::abs(t) > tol && std::abs(t - 1.0) > tol) return false;
  }
  return true;
}

DistFn DistFn::from_map(const GroupParams& g, const std::vector<int64_t>& flat,
                        const std::vector<int64_t>& phi) {
  if (flat.size() != phi.size()) throw Error("DistFn: size mismatch");
  DistFn f(g);
  for (size_t i = 0; i < flat.size(); ++i)
    f.values[flat[i]] = Dist::delta(g, phi[i]);
  return f;
}

AlgGrid::AlgGrid(const GroupParams& g) : g(g) {
  const int64_t n3 = g.size * g.size * g.size;
  if (n3 > 64 * kDefaultSizeCap)
    throw Error("AlgGrid: |G|^3 too large for dense storage");
  v = CVec::Zero(n3);
}

AlgGrid to_dense(const DistFn& phi) {
  AlgGrid a(phi.g);
  const int64_t N = phi.g.size;
  for (const auto& [i, d] : phi.values)
    for (const auto& [c, w] : d.entries()) a.v[i * N + c] = w;
  return a;
}

DistFn to_sparse(const AlgGrid& a, double floor) {
  DistFn f(a.g);
  const int64_t N = a.g.size;
  for (int64_t i = 0; i < N * N; ++i) {
    std::vector<Dist::Entry> e;
    for (int64_t c = 0; c < N; ++c) {
      const double w = a.v[i * N + c].real();
      if (w > floor) e.emplace_back(c, w);
    }
    if (!e.empty()) f.values.emplace(i, Dist(a.g, std::move(e)));
  }
  return f;
}

DistFn weighted(const DistFn& phi, const GridFn& mu) {
  require_same(phi.g, mu.g);
  DistFn out(phi.g);
  for (const auto& [i, d] : phi.values) {
    const double m = mu.v.data()[i].real();
    if (m > 0) out.values.emplace(i, d.scaled(m));
  }
  return out;
}

namespace {

// Transform along one axis of a dense |G|^3 array: 0 = x, 1 = y, 2 = c.
void transform_axis(CVec& v, const GroupParams& g, int axis, bool inverse) {
  const int64_t N = g.size;
  const int64_t stride = axis == 0 ? N * N : (axis == 1 ? N : 1);
  // Enumerate the N^2 lines along the axis by their two other coordinates.
  parallel_for(0, N * N, [&](int64_t line) {
    const int64_t u = line / N, w = line % N;
    int64_t base;
    if (axis == 0)
      base = u * N + w;
    else if (axis == 1)
      base = u * N * N + w;
    else
      base = (u * N + w) * N;
    dft_axis(v.data() + base, g.p, g.n, stride, inverse);
  });
}

AlgGrid alg_conv_along(const AlgGrid& a, const AlgGrid& b, int axis) {
  require_same(a.g, b.g);
  const GroupParams& g = a.g;
  CVec A = a.v, B = b.v;
  for (CVec* m : {&A, &B}) {
    transform_axis(*m, g, 2, false);
    transform_axis(*m, g, axis, false);
  }
  A.array() *= B.array().conjugate();
  transform_axis(A, g, axis, true);
  transform_axis(A, g, 2, true);
  AlgGrid out(g);
  out.v = A * double(g.size);
  return out;
}

}  // namespace

AlgGrid alg_vert_conv(const AlgGrid& a, const AlgGrid& b) {
  return alg_conv_along(a, b, 1);
}

AlgGrid alg_horiz_conv(const AlgGrid& a, const AlgGrid& b) {
  return alg_conv_along(a, b, 0);
}

AlgGrid alg_mixed_conv(const AlgGrid& a1, const AlgGrid& a2, const AlgGrid& a3,
                       const AlgGrid& a4) {
  return alg_horiz_conv(alg_vert_conv(a1, a2), alg_vert_conv(a3, a4));
}

DistFn mixed_conv(const DistFn& phi) {
  AlgGrid d = to_dense(phi);
  AlgGrid v = alg_vert_conv(d, d);
  return to_sparse(alg_horiz_conv(v, v));
}

double alg_inner(const AlgGrid& a, const AlgGrid& b) {
  require_same(a.g, b.g);
  const double N = double(a.g.size);
  return b.v.dot(a.v).real() / (N * N);
}

double gen_inner(const std::array<DistFn, 8>& phi) {
  std::array<AlgGrid, 8> d;
  for (int i = 0; i < 8; ++i) d[i] = to_dense(phi[i]);
  AlgGrid left = alg_mixed_conv(d[0], d[1], d[2], d[3]);
  AlgGrid right = alg_mixed_conv(d[4], d[5], d[6], d[7]);
  return alg_inner(left, right);
}

double gen_norm(const DistFn& phi) {
  AlgGrid d = to_dense(phi);
  AlgGrid v = alg_vert_conv(d, d);
  AlgGrid m = alg_horiz_conv(v, v);
  return std::pow(std::max(0.0, alg_inner(m, m)), 0.125);
}

double bihom_defect(const DistFn& phi, const GridFn& mu) {
  require_same(phi.g, mu.g);
  for (int64_t i = 0; i < mu.v.size(); ++i)
    if (mu.v.data()[i].real() < 0) throw Error("bihom_defect: mu must be non-negative");
  const double base = arr_functional(mu);
  if (base <= 0) throw Error("bihom_defect: mixed convolution of mu vanishes");
  AlgGrid d = to_dense(weighted(phi, mu));
  AlgGrid v = alg_vert_conv(d, d);
  AlgGrid m = alg_horiz_conv(v, v);
  return 1.0 - alg_inner(m, m) / base;
}

namespace {

GroupFn dense_map(const DistMap& phi, const GroupParams& g2) {
  const int64_t N = int64_t(phi.size());
  GroupFn f(g2);
  for (int64_t x = 0; x < N; ++x)
    for (const auto& [c, w] : phi[x].entries()) f.v[x * N + c] = w;
  return f;
}

DistMap sparse_map(const GroupFn& f, const GroupParams& g) {
  const int64_t N = g.size;
  DistMap out(N, Dist(g));
  for (int64_t x = 0; x < N; ++x) {
    Eigen::VectorXd w(N);
    for (int64_t c = 0; c < N; ++c) w[c] = f.v[x * N + c].real();
    out[x] = Dist::from_dense(g, w);
  }
  return out;
}

const GroupParams& map_group(const DistMap& phi) {
  if (phi.empty()) throw Error("DistMap: empty");
  const GroupParams& g = phi[0].group();
  if (int64_t(phi.size()) != g.size) throw Error("DistMap: size must be |G|");
  return g;
}

}  // namespace

DistMap self_difference(const DistMap& phi) {
  return cross_difference(phi, phi);
}

DistMap cross_difference(const DistMap& phi, const DistMap& psi) {
  const GroupParams& g = map_group(phi);
  GroupParams g2(g.p, 2 * g.n, kDefaultSizeCap * 64);
  GroupFn b = barconv(dense_map(phi, g2), dense_map(psi, g2));
  b.v *= double(g.size);
  return sparse_map(b, g);
}

double hom_defect(const DistMap& phi) {
  DistMap psi = self_difference(phi);
  double s = 0;
  for (const Dist& d : psi) s += dist_inner(d, d);
  return 1.0 - s / double(psi.size());
}

bool is_affine_map(const GroupParams& g, const std::vector<int64_t>& omega) {
  const int64_t N = g.size;
  for (int64_t x = 0; x < N; ++x)
    for (int64_t y = 0; y < N; ++y)
      if (g.add(omega[g.add(x, y)], omega[0]) != g.add(omega[x], omega[y]))
        return false;
  return true;
}

Rounding round_by_argmax(const DistMap& phi) {
  const GroupParams& g = map_group(phi);
  DistMap psi = self_difference(phi);
  DistMap theta = cross_difference(phi, psi);
  Rounding r;
  r.omega.resize(g.size);
  double agree = 0, defect = 0;
  for (int64_t x = 0; x < g.size; ++x) {
    bool tie = false;
    r.omega[x] = theta[x].argmax(&tie);
    r.tie = r.tie || tie;
    agree += ddist(phi[x], Dist::delta(g, r.omega[x]));
    defect += dist_inner(psi[x], psi[x]);
  }
  r.agreement = agree / double(g.size);
  r.measured_eta = 1.0 - defect / double(g.size);
  r.freiman = is_affine_map(g, r.omega);
  return r;
}

Rounding round_stability(const DistMap& phi, double eta) {
  if (!(eta >= 0 && eta < 1.0 / 18.0))
    throw Error("round_stability: eta must lie in [0, 1/18)");
  for (const Dist& d : phi)
    if (!d.in_simplex()) throw Error("round_stability: values must be distributions");
  return round_by_argmax(phi);
}

}  // namespace ulab
