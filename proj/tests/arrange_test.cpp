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

#include "ulab/arrange.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "ulab/testing.hpp"

namespace ulab {
namespace {

// phi(a, b) = (a . b) s for a fixed s in G.
PartialMap bilinear_map(const GroupParams& g, int64_t s) {
  PartialMap phi(g);
  for (int64_t a = 0; a < g.size; ++a)
    for (int64_t b = 0; b < g.size; ++b)
      phi.set(a * g.size + b, g.scale(g.dot(a, b), s));
  return phi;
}

PartialMap random_map(const GroupParams& g, double density, Rng& rng) {
  PartialMap phi(g);
  for (int64_t q = 0; q < g.size * g.size; ++q)
    if (rng.bernoulli(density)) phi.set(q, rng.uniform_int(0, g.size - 1));
  return phi;
}

TEST(PartialMapTest, Basics) {
  GroupParams g(3, 1);
  PartialMap phi(g);
  phi.set(4, 2);
  phi.set(7, 1);
  EXPECT_EQ(phi.size(), 2);
  EXPECT_NEAR(phi.density(), 2.0 / 9, 1e-15);
  EXPECT_EQ(phi.points(), (std::vector<int64_t>{4, 7}));
  phi.erase(4);
  EXPECT_FALSE(phi.contains(4));
  EXPECT_EQ(phi.to_distfn().values.size(), 1u);
  EXPECT_THROW(phi.set(1, 3), Error);
}

TEST(RespectStatsTest, BilinearRespectsEverything) {
  for (auto [p, n] : {std::pair{3, 1}, {5, 1}, {3, 2}}) {
    GroupParams g(p, n);
    PartialMap phi = bilinear_map(g, 1);
    for (int order : {1, 2}) {
      ArrangementStats st = respect_stats(phi, order, RespectMode::kExact);
      EXPECT_NEAR(st.total, 1.0, 1e-12);
      EXPECT_NEAR(st.respected, 1.0, 1e-12);
      ArrangementStats mc = respect_stats(phi, order, RespectMode::kMonteCarlo, 3000, 5);
      EXPECT_EQ(mc.total, 1.0);
      EXPECT_EQ(mc.respected, 1.0);
    }
  }
}

TEST(RespectStatsTest, CubicDerivativeSpectrum) {
  GroupParams g(5, 1);
  PolyPhase q(5, 1);
  q.set({0, 0, 0}, 1);
  PartialMap phi = spectral_map(poly_phase_fn(q, g), 0.999);
  ASSERT_EQ(phi.size(), 25);
  for (int64_t a = 0; a < 5; ++a)
    for (int64_t b = 0; b < 5; ++b) EXPECT_EQ(phi.at(a * 5 + b), mod(6 * a * b, 5));
  ArrangementStats st = respect_stats(phi, 1, RespectMode::kExact);
  EXPECT_NEAR(st.total, 1.0, 1e-12);
  EXPECT_NEAR(st.respected, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(st.tuples(g), std::pow(5.0, 8));
}

TEST(RespectStatsTest, TallyMatchesAlgebraIdentity) {
  Rng rng(1);
  GroupParams g(3, 1);
  for (int trial = 0; trial < 20; ++trial) {
    PartialMap phi = random_map(g, 0.4 + 0.6 * rng.uniform(), rng);
    ArrangementStats a = respect_enumerate(phi);
    ArrangementStats b = respect_stats(phi, 1, RespectMode::kExact);
    EXPECT_NEAR(a.total, b.total, 1e-9);
    EXPECT_NEAR(a.respected, b.respected, 1e-9);
    EXPECT_LE(a.respected, a.total);
  }
  EXPECT_THROW(respect_enumerate(PartialMap(GroupParams(11, 1))), Error);
}

TEST(RespectStatsTest, MonteCarloAgreesWithExact) {
  Rng rng(2);
  GroupParams g(3, 1);
  for (int order : {1, 2}) {
    PartialMap phi = random_map(g, 0.9, rng);
    ArrangementStats ex = respect_stats(phi, order, RespectMode::kExact);
    ArrangementStats mc = respect_stats(phi, order, RespectMode::kMonteCarlo, 200000, 9);
    EXPECT_LE(std::abs(mc.total - ex.total), 4 * mc.total_stderr + 1e-12);
    EXPECT_LE(std::abs(mc.respected - ex.respected), 4 * mc.respected_stderr + 1e-12);
    ArrangementStats again = respect_stats(phi, order, RespectMode::kMonteCarlo, 200000, 9);
    EXPECT_EQ(mc.respected, again.respected);
  }
}

TEST(RespectStatsTest, ManyArr2sAndSomeArrangements) {
  Rng rng(3);
  GroupParams g(3, 1);
  for (int trial = 0; trial < 20; ++trial) {
    PartialMap phi = random_map(g, 0.5 + 0.5 * rng.uniform(), rng);
    const double alpha = phi.density();
    const double theta = respect_stats(phi, 1, RespectMode::kExact).respected;
    const double second = respect_stats(phi, 2, RespectMode::kExact).respected;
    EXPECT_GE(second, std::pow(theta, 8) * std::pow(alpha, -12) - 1e-15);
  }
  // Spectral maps of bounded functions.
  GroupParams h(3, 2);
  for (int trial = 0; trial < 5; ++trial) {
    GroupFn f = poly_phase_fn(PolyPhase::random(3, 2, 3, rng), h);
    for (auto& z : f.v) z *= 0.5 + 0.5 * rng.uniform();
    const double gamma = 0.3;
    PartialMap phi = spectral_map(f, gamma);
    const double alpha = phi.density();
    if (alpha == 0) continue;
    const double resp = respect_stats(phi, 1, RespectMode::kExact).respected;
    EXPECT_GE(resp, std::pow(alpha, 16) * std::pow(gamma, 48));
  }
}

TEST(MorseScanTest, ExactlyThreePatterns) {
  const Signs8 m = morse8();
  EXPECT_EQ(m, (Signs8{1, -1, -1, 1, -1, 1, 1, -1}));
  EXPECT_TRUE(first_order_admissible(m, 5));
  EXPECT_FALSE(first_order_admissible({1, 0, 0, 0, 0, 0, 0, 0}, 5));
  for (int p : {3, 5, 7}) {
    auto scan = morse_sign_scan(p);
    ASSERT_EQ(scan.size(), 3u) << "p = " << p;
    Signs8 neg, zero{};
    for (int i = 0; i < 8; ++i) neg[i] = -m[i];
    EXPECT_EQ(scan[0], neg);
    EXPECT_EQ(scan[1], zero);
    EXPECT_EQ(scan[2], m);
  }
}

TEST(MorseScanTest, AdmissiblePatternsVanishOnSamples) {
  GroupParams g(5, 1);
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<int64_t, 8> t;
    for (auto& v : t) v = rng.uniform_int(0, 4);
    auto pts = arrangement_points(g, t);
    int64_t s = 0;
    for (int i = 0; i < 8; ++i) s += morse8()[i] * (pts[i] / 5) * (pts[i] % 5);
    EXPECT_EQ(mod(s, 5), 0);
  }
}

TEST(RareZeroTest, NonMorsePatterns) {
  Signs32 flipped = morse32();
  flipped[13] = -flipped[13];
  GroupParams g5(5, 1);
  MonteCarlo a = rare_zero_fraction(g5, flipped, 100000, 1);
  EXPECT_LE(a.estimate, 2.0 / 5 + 3 * a.stderr_);
  EXPECT_GT(a.estimate, 0.0);

  Rng rng(5);
  GroupParams g7(7, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Signs32 eps;
    do {
      for (auto& e : eps) e = int(rng.uniform_int(-1, 1));
    } while (is_morse_multiple(eps));
    MonteCarlo b = rare_zero_fraction(g7, eps, 20000, 2 + trial);
    EXPECT_LE(b.estimate, 2.0 / 7 + 3 * b.stderr_);
  }

  Signs32 zero{};
  EXPECT_THROW(rare_zero_fraction(g5, zero, 100, 1), Error);
  EXPECT_THROW(rare_zero_fraction(g5, morse32(), 100, 1), Error);
}

TEST(RareZeroTest, TwoDimensionalTensor) {
  Signs32 flipped = morse32();
  flipped[0] = 0;
  GroupParams g(3, 2);
  MonteCarlo a = rare_zero_fraction(g, flipped, 20000, 3);
  EXPECT_LE(a.estimate, 2.0 / 9 + 3 * a.stderr_);
}

TEST(DensifyTest, BilinearAndTrivialK) {
  GroupParams g(3, 1);
  PartialMap phi = bilinear_map(g, 2);
  DensifyOptions opt;
  opt.k = 0;
  DensifyResult r0 = densify(phi, opt);
  EXPECT_EQ(r0.selected.domain, phi.domain);
  EXPECT_EQ(r0.stats.respected, r0.input.respected);
  EXPECT_TRUE(r0.satisfied);
  for (int k : {1, 3}) {
    opt.k = k;
    DensifyResult r = densify(phi, opt);
    EXPECT_NEAR(r.stats.ratio(), 1.0, 1e-12);
    EXPECT_GT(r.formula_k, 1e9);
  }
}

TEST(DensifyTest, SelectionRemovesIncoherentPoints) {
  GroupParams g(3, 2);
  Rng rng(6);
  PartialMap phi = bilinear_map(g, 4);
  for (int64_t q = 0; q < g.size * g.size; ++q)
    if (rng.bernoulli(0.1)) phi.set(q, g.add(phi.at(q), rng.uniform_int(1, 8)));
  DensifyOptions opt;
  opt.eta = 0.05;
  opt.seed = 11;
  DensifyResult r = densify(phi, opt);
  EXPECT_LT(r.input.ratio(), 0.5);
  EXPECT_TRUE(r.satisfied);
  EXPECT_GE(r.stats.ratio(), 0.95);
  EXPECT_GT(r.stats.total, 0);
  for (int64_t q : r.selected.points()) EXPECT_EQ(r.selected.at(q), phi.at(q));
  DensifyResult again = densify(phi, opt);
  EXPECT_EQ(again.selected.domain, r.selected.domain);
}

TEST(DensifyTest, EmptyInputFails) {
  DensifyOptions opt;
  opt.k = 1;
  EXPECT_THROW(densify(PartialMap(GroupParams(3, 1)), opt), Error);
}

TEST(FreimanRowsTest, LinearRowsKeptAndFilterIsSound) {
  GroupParams g(5, 1);
  PartialMap lin = bilinear_map(g, 1);
  EXPECT_TRUE(rows_are_freiman(lin));
  EXPECT_EQ(freiman_rows(lin).domain, lin.domain);

  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    PartialMap phi = random_map(g, 0.8, rng);
    PartialMap f = freiman_rows(phi);
    EXPECT_TRUE(rows_are_freiman(f));
    for (int64_t q : f.points()) {
      EXPECT_TRUE(phi.contains(q));
      EXPECT_EQ(f.at(q), phi.at(q));
    }
    // Greedy maximality: no removed point can be added back.
    for (int64_t q : phi.points()) {
      if (f.contains(q)) continue;
      PartialMap h = f;
      h.set(q, phi.at(q));
      EXPECT_FALSE(rows_are_freiman(h));
    }
  }
}

TEST(FreimanRowsTest, PriorityOrderSkipsLowConfidencePoints) {
  GroupParams g(5, 1);
  const int64_t N = g.size;
  PartialMap phi(g);
  for (int64_t x = 0; x < N; ++x) phi.set(x * N, g.scale(2, x));
  phi.set(0, 1);  // off the linear map x -> 2x
  std::vector<double> priority(N * N, 1.0);
  priority[0] = 0.1;

  const PartialMap by_index = freiman_rows(phi);
  const PartialMap by_priority = freiman_rows(phi, priority);
  EXPECT_TRUE(by_index.contains(0));
  EXPECT_FALSE(by_priority.contains(0));
  EXPECT_EQ(by_priority.size(), 4);
  EXPECT_LT(by_index.size(), by_priority.size());
  EXPECT_TRUE(rows_are_freiman(by_priority));
  EXPECT_THROW(freiman_rows(phi, std::vector<double>(3, 1.0)), Error);
}

}  // namespace
}  // namespace ulab
