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

#include "ulab/gowers.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "ulab/testing.hpp"

namespace ulab {
namespace {

TEST(DerivativeTest, AtZeroIsModulusSquared) {
  GroupParams g(5, 2);
  Rng rng(1);
  GroupFn f = testing::random_fn(g, rng);
  GroupFn d = derivative(f, 0);
  for (int64_t x = 0; x < g.size; ++x)
    EXPECT_NEAR(std::abs(d[x] - std::norm(f[x])), 0.0, 1e-15);
}

TEST(DerivativeTest, CubicPhase) {
  GroupParams g(5, 1);
  PolyPhase cube(5, 1);
  cube.set({0, 0, 0}, 1);
  GroupFn d = derivative(poly_phase_fn(cube, g), GroupElem(g, 1));
  for (int64_t x = 0; x < 5; ++x)
    EXPECT_NEAR(std::abs(d[x] - root_of_unity(5, 3 * x * x - 3 * x + 1)), 0.0, 1e-14);
}

TEST(DerivativeTest, Commute) {
  GroupParams g(3, 2);
  Rng rng(2);
  GroupFn f = testing::random_fn(g, rng);
  for (int64_t a = 0; a < g.size; a += 2)
    for (int64_t b = 0; b < g.size; b += 3) {
      GroupFn ab = derivative(derivative(f, b), a);
      GroupFn ba = derivative(derivative(f, a), b);
      EXPECT_LT((ab.v - ba.v).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(UkNormTest, ConstantIsOne) {
  GroupParams g(3, 2);
  GroupFn one = GroupFn::constant(g, 1.0);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(uk_norm(one, k).value, 1.0, 1e-12);
    EXPECT_NEAR(uk_norm(one, k, NormMethod::kDirect).value, 1.0, 1e-12);
  }
  EXPECT_THROW(uk_norm(one, 5), Error);
  EXPECT_THROW(uk_norm(one, 0), Error);
}

TEST(UkNormTest, PhasesOfLowDegreeHaveNormOne) {
  Rng rng(3);
  GroupParams g(5, 1);
  for (int k = 2; k <= 4; ++k)
    for (int trial = 0; trial < 5; ++trial) {
      GroupFn f = poly_phase_fn(PolyPhase::random(5, 1, k - 1, rng), g);
      EXPECT_NEAR(uk_norm(f, k).value, 1.0, 1e-12);
      EXPECT_NEAR(uk_norm(f, k, NormMethod::kDirect).value, 1.0, 1e-12);
    }
}

TEST(UkNormTest, DeltaFunction) {
  GroupParams g(5, 1);
  GroupFn d = GroupFn::indicator(g, {0});
  EXPECT_NEAR(uk_norm(d, 2).power, std::pow(5.0, -3), 1e-15);
  EXPECT_NEAR(uk_norm(d, 2, NormMethod::kDirect).power, std::pow(5.0, -3), 1e-15);
}

TEST(UkNormTest, NestingIdentities) {
  Rng rng(4);
  for (auto [p, n] : {std::pair{3, 2}, {5, 1}, {2, 3}}) {
    GroupParams g(p, n);
    for (int trial = 0; trial < 5; ++trial) {
      GroupFn f = testing::random_fn(g, rng);
      const double a = u4_pow16(f), b = u4_pow16_via_u3(f);
      EXPECT_NEAR(a, b, 1e-9);
      EXPECT_NEAR(a, uk_pow_direct(f, 4), 1e-9);
      EXPECT_NEAR(u3_pow8(f), uk_pow_direct(f, 3), 1e-9);
      EXPECT_NEAR(u2_pow4(f), uk_pow_direct(f, 2), 1e-9);
    }
  }
}

TEST(UkNormTest, Monotone) {
  Rng rng(5);
  GroupParams g(3, 2);
  for (int trial = 0; trial < 20; ++trial) {
    GroupFn f = testing::random_fn(g, rng);
    double prev = uk_norm(f, 1).value;
    for (int k = 2; k <= 4; ++k) {
      const double cur = uk_norm(f, k).value;
      EXPECT_LE(prev, cur + 1e-9);
      EXPECT_LE(cur, f.sup_norm() + 1e-9);
      prev = cur;
    }
  }
}

TEST(UkNormTest, U2MatchesDualFourNorm) {
  Rng rng(6);
  GroupParams g(7, 2);
  GroupFn f = testing::random_fn(g, rng);
  GroupFn h = dft(f);
  double s = 0;
  for (int64_t r = 0; r < g.size; ++r) s += std::pow(std::abs(h[r]), 4);
  EXPECT_NEAR(uk_norm(f, 2).value, std::pow(s, 0.25), 1e-12);
}

TEST(UkNormTest, DirectOracleSizeLimit) {
  GroupParams g(3, 4);
  EXPECT_THROW(uk_pow_direct(GroupFn::constant(g, 1.0), 2), Error);
}

TEST(BoxNormTest, Examples) {
  GroupParams g(5, 1);
  EXPECT_NEAR(box_norm2(GridFn::constant(g, 1.0)), 1.0, 1e-14);
  GridFn F(g);
  for (int64_t x = 0; x < 5; ++x)
    for (int64_t y = 0; y < 5; ++y) F(x, y) = root_of_unity(5, x * y);
  EXPECT_NEAR(box_norm2_pow4(F), 0.2, 1e-14);

  GroupParams g2(3, 2);
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    GridFn R(g2);
    for (int64_t i = 0; i < R.v.size(); ++i)
      R.v.data()[i] = std::polar(1.0, 2 * kPi * rng.uniform());
    EXPECT_LE(box_norm2(R), 1.0 + 1e-12);
  }
}

// Vertex-by-vertex box average against the matrix formula.
TEST(BoxNormTest, MatchesDefinition) {
  GroupParams g(3, 1);
  Rng rng(8);
  GridFn F(g);
  for (int64_t i = 0; i < F.v.size(); ++i)
    F.v.data()[i] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  cplx s = 0;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          s += F(x, y) * std::conj(F(g.sub(x, a), y)) *
               std::conj(F(x, g.sub(y, b))) * F(g.sub(x, a), g.sub(y, b));
  EXPECT_NEAR(box_norm2_pow4(F), s.real() / 81.0, 1e-14);
  EXPECT_NEAR(s.imag(), 0.0, 1e-12);
}

TEST(BoxNormTest, ThreeVariable) {
  GroupParams g(5, 1);
  Grid3Fn one(g);
  one.v.setOnes();
  EXPECT_NEAR(box_norm3(one), 1.0, 1e-13);

  Grid3Fn F(g);
  CharacterSum count(5);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) {
        F.at(a, b, c) = root_of_unity(5, a * b * c);
        count.add(a * b * c);
      }
  auto exact = count.exact_mean();
  ASSERT_TRUE(exact.has_value());
  EXPECT_EQ(*exact, Rational(9, 25));
  EXPECT_NEAR(box_norm3_pow8(F), exact->to_double(), 1e-13);

  Grid3Fn G = F;
  G.v *= cplx(0.3, -0.4);
  EXPECT_NEAR(box_norm3(G), 0.5 * box_norm3(F), 1e-13);

  GroupParams big(5, 3);
  EXPECT_THROW(Grid3Fn{big}, Error);
}

}  // namespace
}  // namespace ulab
