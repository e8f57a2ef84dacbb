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

#include <cmath>

#include "gtest/gtest.h"
#include "ulab/fp.hpp"
#include "ulab/grid.hpp"
#include "ulab/testing.hpp"

namespace ulab {
namespace {

Dist random_dist(const GroupParams& g, Rng& rng, int support = 3) {
  std::vector<Dist::Entry> e;
  double t = 0;
  for (int i = 0; i < support; ++i) {
    double w = rng.uniform();
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

TEST(DistTest, ProductAdjointDistance) {
  GroupParams g(3, 2);
  EXPECT_EQ(dist_product(Dist::delta(g, 4), Dist::delta(g, 7)).entries(),
            Dist::delta(g, g.add(4, 7)).entries());
  Dist u = dist_product(Dist::uniform(g), Dist::uniform(g));
  for (int64_t a = 0; a < g.size; ++a) EXPECT_NEAR(u.at(a), 1.0 / 9, 1e-15);
  EXPECT_EQ(adjoint(Dist::delta(g, 5)).entries(), Dist::delta(g, g.neg(5)).entries());
  EXPECT_DOUBLE_EQ(ddist(Dist::delta(g, 2), Dist::delta(g, 2)), 0.0);
  EXPECT_DOUBLE_EQ(ddist(Dist::delta(g, 2), Dist::delta(g, 3)), 1.0);
  EXPECT_NEAR(ddist(Dist::uniform(g), Dist::uniform(g)), 1.0 - 1.0 / 9, 1e-15);

  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Dist a = random_dist(g, rng).scaled(2.0 * rng.uniform());
    Dist b = random_dist(g, rng).scaled(2.0 * rng.uniform());
    EXPECT_NEAR(dist_product(a, b).total(), a.total() * b.total(), 1e-12);
    Dist lhs = adjoint(dist_product(a, b));
    Dist rhs = dist_product(adjoint(a), adjoint(b));
    EXPECT_LT((lhs.dense() - rhs.dense()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(adjoint(adjoint(a)).entries(), a.entries());
  }
}

TEST(DistanceTest, TriangleSplitCancellation) {
  GroupParams g(5, 1);
  Rng rng(2);
  int cancellation_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Dist a = random_dist(g, rng), b = random_dist(g, rng), c = random_dist(g, rng),
         d = random_dist(g, rng);
    EXPECT_LE(ddist(a, c), ddist(a, b) + ddist(b, c) + 1e-12);
    EXPECT_LE(ddist(dist_product(a, b), dist_product(c, d)),
              ddist(a, c) + ddist(b, d) + 1e-12);
    EXPECT_NEAR(ddist(a, dist_product(adjoint(b), c)), ddist(dist_product(a, b), c),
                1e-12);
    // Cancellation needs d(a, b) <= 1/2; concentrated pairs exercise it.
    Dist a2 = random_dist(g, rng, 1), b2 = random_dist(g, rng, 2);
    if (ddist(a2, b2) <= 0.5) {
      ++cancellation_cases;
      EXPECT_LE(ddist(a2, b2), ddist(dist_product(a2, c), dist_product(b2, c)) + 1e-12);
    }
  }
  EXPECT_GT(cancellation_cases, 50);
}

TEST(MixedConvAlgTest, DeltaValuedBilinear) {
  GroupParams g(5, 1);
  std::vector<int64_t> flat, phi;
  for (int64_t x = 0; x < 5; ++x)
    for (int64_t y = 0; y < 5; ++y) {
      flat.push_back(x * 5 + y);
      phi.push_back(mod(2 * x * y, 5));
    }
  DistFn m = mixed_conv(DistFn::from_map(g, flat, phi));
  for (int64_t w = 0; w < 5; ++w)
    for (int64_t h = 0; h < 5; ++h) {
      const Dist& d = m.values.at(w * 5 + h);
      EXPECT_NEAR(d.at(mod(2 * w * h, 5)), 1.0, 1e-12);
      EXPECT_NEAR(d.total(), 1.0, 1e-12);
    }
}

TEST(BihomDefectTest, ExactCases) {
  GroupParams g(3, 2);
  const int64_t N = g.size;
  GridFn one = GridFn::constant(g, 1.0);
  std::vector<int64_t> flat, bil, rowfn;
  Rng rng(3);
  std::vector<int64_t> theta(N);
  for (auto& t : theta) t = rng.uniform_int(0, N - 1);
  for (int64_t x = 0; x < N; ++x)
    for (int64_t y = 0; y < N; ++y) {
      flat.push_back(x * N + y);
      bil.push_back(g.scale(g.dot(x, y), 1));
      rowfn.push_back(theta[x]);
    }
  EXPECT_NEAR(bihom_defect(DistFn::from_map(g, flat, bil), one), 0.0, 1e-12);
  EXPECT_NEAR(bihom_defect(DistFn::from_map(g, flat, rowfn), one), 0.0, 1e-12);
  EXPECT_THROW(bihom_defect(DistFn(g), GridFn(g)), Error);
}

// Respected fraction of 4-arrangements in A by direct enumeration.
double respected_ratio(const GroupParams& g, const std::vector<int>& in_a,
                       const std::vector<int64_t>& phi) {
  const int64_t N = g.size;
  int64_t total = 0, respected = 0;
  std::array<int64_t, 8> t;
  int64_t tuples = 1;
  for (int i = 0; i < 8; ++i) tuples *= N;
  for (int64_t r = 0; r < tuples; ++r) {
    int64_t s = r;
    for (auto& v : t) {
      v = s % N;
      s /= N;
    }
    auto pts = arrangement_points(g, t);
    bool all = true;
    for (int64_t q : pts) all = all && in_a[q];
    if (!all) continue;
    ++total;
    int64_t v1 = g.sub(g.add(phi[pts[0]], phi[pts[3]]), g.add(phi[pts[1]], phi[pts[2]]));
    int64_t v2 = g.sub(g.add(phi[pts[4]], phi[pts[7]]), g.add(phi[pts[5]], phi[pts[6]]));
    respected += v1 == v2;
  }
  return double(respected) / double(total);
}

TEST(BihomDefectTest, MatchesExhaustiveRespectRatio) {
  GroupParams g(3, 1);
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> in_a(9);
    std::vector<int64_t> flat, vals, phi(9);
    for (int64_t i = 0; i < 9; ++i) {
      in_a[i] = rng.bernoulli(0.7);
      phi[i] = rng.uniform_int(0, 2);
      if (in_a[i]) {
        flat.push_back(i);
        vals.push_back(phi[i]);
      }
    }
    GridFn mu = GridFn::indicator(g, flat);
    if (arr_functional(mu) == 0) continue;
    const double eta = bihom_defect(DistFn::from_map(g, flat, vals), mu);
    EXPECT_NEAR(1.0 - eta, respected_ratio(g, in_a, phi), 1e-12);
  }
}

TEST(GenInnerTest, Reductions) {
  GroupParams g(3, 1);
  std::vector<int64_t> all(9), zeros(9, 0);
  for (int i = 0; i < 9; ++i) all[i] = i;
  DistFn d0 = DistFn::from_map(g, all, zeros);
  std::array<DistFn, 8> same;
  same.fill(d0);
  EXPECT_NEAR(gen_inner(same), 1.0, 1e-12);

  Rng rng(5);
  auto a = testing::random_set(9, 0.6, rng);
  DistFn da = DistFn::from_map(g, a, std::vector<int64_t>(a.size(), 0));
  same.fill(da);
  EXPECT_NEAR(gen_inner(same), arr_functional(GridFn::indicator(g, a)), 1e-12);
}

TEST(GenInnerTest, GeneralizedCauchySchwarz) {
  GroupParams g(3, 1);
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<DistFn, 8> phi;
    double bound = 1;
    for (auto& f : phi) {
      f = random_distfn(g, rng, 0.7);
      bound *= gen_norm(f);
    }
    EXPECT_LE(gen_inner(phi), bound + 1e-12);
  }
}

TEST(PerturbationTest, EightTermBound) {
  GroupParams g(3, 1);
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    DistFn psi = random_distfn(g, rng, 1.0);
    GridFn mu(g), nu(g);
    for (int64_t i = 0; i < mu.v.size(); ++i) {
      mu.v.data()[i] = rng.uniform();
      nu.v.data()[i] = rng.bernoulli(0.8) ? mu.v.data()[i] : rng.uniform();
    }
    auto sq = [&](const GridFn& m) {
      AlgGrid d = to_dense(weighted(psi, m));
      AlgGrid c = alg_mixed_conv(d, d, d, d);
      return alg_inner(c, c);
    };
    GridFn diff(g);
    diff.v = mu.v - nu.v;
    EXPECT_LE(std::abs(sq(mu) - sq(nu)), 8 * diff.l2() + 1e-12);
  }
}

DistMap affine_map(const GroupParams& g, const FpMat& T, int64_t c) {
  DistMap phi;
  for (int64_t x = 0; x < g.size; ++x) {
    FpVec y = T * g.digits(x);
    phi.push_back(Dist::delta(g, g.add(g.index(y), c)));
  }
  return phi;
}

TEST(RoundStabilityTest, AffineIsFixed) {
  GroupParams g(5, 2);
  FpMat T(2, 2);
  T << 1, 2, 3, 4;
  DistMap phi = affine_map(g, T, 7);
  Rounding r = round_stability(phi, 0.0);
  EXPECT_NEAR(r.agreement, 0.0, 1e-12);
  EXPECT_NEAR(r.measured_eta, 0.0, 1e-12);
  EXPECT_TRUE(r.freiman);
  EXPECT_FALSE(r.tie);
  for (int64_t x = 0; x < g.size; ++x) EXPECT_EQ(r.omega[x], phi[x].argmax());
  EXPECT_THROW(round_stability(phi, 0.06), Error);
}

TEST(RoundStabilityTest, OnePointReassigned) {
  GroupParams g(5, 2);
  FpMat T(2, 2);
  T << 2, 0, 1, 1;
  DistMap phi = affine_map(g, T, 3);
  const int64_t original = phi[11].argmax();
  phi[11] = Dist::delta(g, g.add(original, 1));
  Rounding r = round_by_argmax(phi);
  EXPECT_TRUE(r.freiman);
  EXPECT_EQ(r.omega[11], original);
  EXPECT_NEAR(r.agreement, 1.0 / 25, 1e-12);
}

TEST(RoundStabilityTest, PerturbedMapsStayWithinFiveEta) {
  GroupParams g(5, 2);
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    FpMat T = fp_random(2, 2, 5, rng);
    DistMap phi = affine_map(g, T, rng.uniform_int(0, 24));
    const int64_t x0 = rng.uniform_int(0, 24);
    const double m = 0.01 + 0.05 * rng.uniform();
    phi[x0] = Dist(g, {{phi[x0].argmax(), 1 - m}, {rng.uniform_int(0, 24), m}});
    const double eta = hom_defect(phi);
    ASSERT_LT(eta, 1.0 / 18);
    Rounding r = round_stability(phi, eta);
    EXPECT_TRUE(r.freiman);
    EXPECT_LE(r.agreement, 5 * eta + 1e-12);
    EXPECT_NEAR(r.measured_eta, eta, 1e-12);
  }
}

TEST(AlmostAdditiveTest, AllPairs) {
  GroupParams g(5, 1);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    DistMap phi;
    const int64_t slope = rng.uniform_int(0, 4);
    for (int64_t x = 0; x < 5; ++x) {
      const int64_t clean = mod(slope * x, 5);
      const double m = rng.bernoulli(0.4) ? 0.1 * rng.uniform() : 0.0;
      phi.push_back(m > 0 ? Dist(g, {{clean, 1 - m}, {rng.uniform_int(0, 4), m}})
                          : Dist::delta(g, clean));
    }
    const double eta = hom_defect(phi);
    DistMap psi = self_difference(phi);
    for (int64_t u = 0; u < 5; ++u)
      for (int64_t v = 0; v < 5; ++v)
        EXPECT_LE(ddist(dist_product(psi[u], psi[v]), psi[g.add(u, v)]),
                  2 * eta + 1e-12);
  }
}

}  // namespace
}  // namespace ulab
