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

#include "ulab/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ulab::testing {

GroupFn random_fn(const GroupParams& g, Rng& rng) {
  GroupFn f(g);
  for (int64_t x = 0; x < g.size; ++x) {
    const double r = std::sqrt(rng.uniform());
    const double t = 2.0 * kPi * rng.uniform();
    f.v[x] = std::polar(r, t);
  }
  return f;
}

GroupFn random_unimodular(const GroupParams& g, Rng& rng) {
  GroupFn f(g);
  for (int64_t x = 0; x < g.size; ++x) f.v[x] = std::polar(1.0, 2.0 * kPi * rng.uniform());
  return f;
}

GroupFn random_sign_fn(const GroupParams& g, Rng& rng) {
  GroupFn f(g);
  for (int64_t x = 0; x < g.size; ++x) f.v[x] = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return f;
}

std::vector<int64_t> random_set(int64_t size, double density, Rng& rng) {
  std::vector<int64_t> out;
  for (int64_t x = 0; x < size; ++x)
    if (rng.bernoulli(density)) out.push_back(x);
  return out;
}

GroupFn corrupt(const GroupFn& f, double fraction, Rng& rng) {
  std::vector<int64_t> idx(f.size());
  std::iota(idx.begin(), idx.end(), int64_t(0));
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  const int64_t m = std::llround(fraction * double(f.size()));
  GroupFn out = f;
  for (int64_t i = 0; i < m; ++i) out.v[idx[i]] = std::polar(1.0, 2.0 * kPi * rng.uniform());
  return out;
}

PolyPhase sample_cubic(int p, int n) {
  PolyPhase q(p, n);
  if (n == 1) {
    q.set({0, 0, 0}, 1);
    q.set({0, 0}, 2);
    q.set({0}, 1);
    return q;
  }
  q.set({0, 0, 0}, 1);
  q.set({0, 1, 1}, 2);
  q.set({1, 1, 1}, 3);
  q.set({0, 1}, 1);
  q.set({1}, 4);
  return q;
}

GridFn random_grid(const GroupParams& g, Rng& rng) {
  GridFn F(g);
  for (int64_t x = 0; x < g.size; ++x) F.set_row(x, random_fn(g, rng));
  return F;
}

Dist random_dist(const GroupParams& g, Rng& rng, int support) {
  std::vector<Dist::Entry> e;
  double t = 0;
  for (int i = 0; i < support; ++i) {
    const double w = rng.uniform();
    e.emplace_back(rng.uniform_int(0, g.size - 1), w);
    t += w;
  }
  for (auto& [a, w] : e) w /= t;
  return Dist(g, e);
}

DistFn random_distfn(const GroupParams& g, Rng& rng, double density) {
  DistFn f(g);
  for (int64_t i = 0; i < g.size * g.size; ++i)
    if (rng.bernoulli(density)) f.values.emplace(i, random_dist(g, rng, 2));
  return f;
}

DistMap affine_distmap(const GroupParams& g, const FpMat& T, int64_t c) {
  DistMap phi;
  for (int64_t x = 0; x < g.size; ++x)
    phi.push_back(Dist::delta(g, g.add(g.index(T * g.digits(x)), c)));
  return phi;
}

}  // namespace ulab::testing
