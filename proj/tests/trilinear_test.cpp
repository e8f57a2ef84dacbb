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

#include <cmath>

#include "gtest/gtest.h"
#include "ulab/gowers.hpp"
#include "ulab/testing.hpp"

namespace ulab {
namespace {

TrilinearForm abc(int p) {
  TrilinearForm t(p, 1);
  t.set(0, 0, 0, 1);
  return t;
}

GridFn random_grid(const GroupParams& g, Rng& rng) {
  GridFn F(g);
  for (int64_t x = 0; x < g.size; ++x) F.set_row(x, testing::random_fn(g, rng));
  return F;
}

FpVec random_vec(int n, int p, Rng& rng) {
  FpVec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform_int(0, p - 1);
  return v;
}

// E_{a,b,c} w^{tau(a,b,c)} by plain enumeration.
double brute_mean(const TrilinearForm& tau) {
  const GroupParams g(tau.p(), tau.n());
  cplx s = 0;
  for (int64_t a = 0; a < g.size; ++a)
    for (int64_t b = 0; b < g.size; ++b)
      for (int64_t c = 0; c < g.size; ++c)
        s += root_of_unity(g.p, tau.eval(g.digits(a), g.digits(b), g.digits(c)));
  EXPECT_NEAR(s.imag(), 0, 1e-6);
  return s.real() / std::pow(double(g.size), 3);
}

TEST(TrilinearFormTest, EvalIsTrilinear) {
  Rng rng(1);
  const TrilinearForm t = TrilinearForm::random(5, 3, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const FpVec a = random_vec(3, 5, rng), a2 = random_vec(3, 5, rng);
    const FpVec b = random_vec(3, 5, rng), c = random_vec(3, 5, rng);
    const int64_t s = rng.uniform_int(0, 4);
    EXPECT_EQ(t.eval(a + s * a2, b, c),
              mod(t.eval(a, b, c) + s * t.eval(a2, b, c), 5));
    EXPECT_EQ(t.eval(b, a + a2, c), mod(t.eval(b, a, c) + t.eval(b, a2, c), 5));
    EXPECT_EQ(t.eval(c, b, a + a2), mod(t.eval(c, b, a) + t.eval(c, b, a2), 5));
    EXPECT_EQ(t.eval(a, b, c), mod(b.dot(fp_mul(t.slice(a), c, 5)), 5));
  }
}

TEST(TrilinearFormTest, SlicesAreLinear) {
  Rng rng(2);
  const TrilinearForm t = TrilinearForm::random(5, 2, rng);
  const SliceFamily fam = SliceFamily::of(t);
  for (int trial = 0; trial < 20; ++trial) {
    const FpVec x = random_vec(2, 5, rng), y = random_vec(2, 5, rng);
    EXPECT_EQ(t.slice(x + y), fp_reduce(t.slice(x) + t.slice(y), 5));
    EXPECT_EQ(fam.at(x), t.slice(x));
  }
}

TEST(TrilinearFormTest, PermutedSwapsSlots) {
  Rng rng(3);
  const TrilinearForm t = TrilinearForm::random(7, 2, rng);
  const TrilinearForm s = t.permuted({1, 0, 2});
  for (int trial = 0; trial < 20; ++trial) {
    const FpVec a = random_vec(2, 7, rng), b = random_vec(2, 7, rng),
                c = random_vec(2, 7, rng);
    EXPECT_EQ(s.eval(a, b, c), t.eval(b, a, c));
    EXPECT_EQ(t.permuted({2, 0, 1}).eval(a, b, c), t.eval(c, a, b));
  }
}

TEST(AnalyticRankTest, ZeroForm) {
  const TriRank r = analytic_rank_tri(TrilinearForm(5, 2));
  EXPECT_EQ(r.mean, Rational(1));
  EXPECT_EQ(r.rank, 0);
}

TEST(AnalyticRankTest, ProductOfCoordinates) {
  const TriRank r = analytic_rank_tri(abc(5));
  EXPECT_EQ(r.mean, Rational(9, 25));
  EXPECT_NEAR(r.rank, -std::log(9.0 / 25) / std::log(5.0), 1e-12);
  EXPECT_NEAR(r.rank, 0.6348, 1e-4);
}

TEST(AnalyticRankTest, DiagonalIsMultiplicative) {
  const double one = analytic_rank_tri(abc(5)).rank;
  for (int n = 1; n <= 3; ++n) {
    const TriRank r = analytic_rank_tri(TrilinearForm::diagonal(5, n));
    EXPECT_EQ(r.mean, Rational(ipow(9, n), ipow(25, n)));
    EXPECT_NEAR(r.rank, n * one, 1e-12);
  }
}

TEST(AnalyticRankTest, MatchesPlainEnumeration) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const TrilinearForm t = TrilinearForm::random(5, 2, rng);
    EXPECT_NEAR(analytic_rank_tri(t).mean.to_double(), brute_mean(t), 1e-12);
  }
}

TEST(AnalyticRankTest, SliceFormulaIsExact) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const TrilinearForm t = TrilinearForm::random(5, 2, rng);
    EXPECT_EQ(analytic_rank_tri(t).mean, slice_mean(t));
  }
  const TrilinearForm t3 = TrilinearForm::random(3, 3, rng);
  EXPECT_EQ(analytic_rank_tri(t3).mean, slice_mean(t3));
}

TEST(AnalyticRankTest, ScalarInvariance) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const TrilinearForm t = TrilinearForm::random(5, 2, rng);
    const Rational m = analytic_rank_tri(t).mean;
    for (int s = 1; s < 5; ++s) EXPECT_EQ(analytic_rank_tri(t.scaled(s)).mean, m);
  }
}

TEST(SymmetrizeTest, SymmetricIsFixed) {
  Rng rng(7);
  const TrilinearForm t = TrilinearForm::random_symmetric(5, 3, rng);
  ASSERT_TRUE(t.is_symmetric());
  const Symmetrized s = symmetrize(t);
  EXPECT_EQ(s.sigma, t);
  EXPECT_TRUE(s.residual.is_zero());
}

TEST(SymmetrizeTest, SingleMonomialOrbit) {
  TrilinearForm t(5, 2);
  t.set(0, 1, 0, 1);  // a_1 b_2 c_1
  const Symmetrized s = symmetrize(t);
  const int64_t third = mod(2 * inv_mod(6, 5), 5);
  EXPECT_EQ(s.sigma.at(0, 1, 0), third);
  EXPECT_EQ(s.sigma.at(1, 0, 0), third);
  EXPECT_EQ(s.sigma.at(0, 0, 1), third);
  EXPECT_EQ(s.sigma.at(0, 0, 0), 0);
  EXPECT_EQ(s.sigma.at(1, 1, 0), 0);
  EXPECT_EQ(s.residual, t - s.sigma);
}

TEST(SymmetrizeTest, SymmetricAtRandomPointsAndIdempotent) {
  Rng rng(8);
  const TrilinearForm t = TrilinearForm::random(7, 3, rng);
  const TrilinearForm s = symmetrize(t).sigma;
  EXPECT_TRUE(s.is_symmetric());
  EXPECT_EQ(symmetrize(s).sigma, s);
  for (int trial = 0; trial < 1000; ++trial) {
    const FpVec a = random_vec(3, 7, rng), b = random_vec(3, 7, rng),
                c = random_vec(3, 7, rng);
    EXPECT_EQ(s.eval(a, b, c), s.eval(b, a, c));
    EXPECT_EQ(s.eval(a, b, c), s.eval(a, c, b));
  }
}

TEST(SymmetrizeTest, RejectsSmallCharacteristic) {
  EXPECT_THROW(symmetrize(TrilinearForm(3, 2)), Error);
}

TEST(SubadditivityTest, Examples) {
  const Subadditivity zero = subadditivity_check(TrilinearForm(5, 1), TrilinearForm(5, 1));
  EXPECT_TRUE(zero.holds);
  EXPECT_EQ(zero.sum.rank, 0);
  const Subadditivity cancel = subadditivity_check(abc(5), abc(5).scaled(-1));
  EXPECT_TRUE(cancel.holds);
  EXPECT_EQ(cancel.sum.mean, Rational(1));
}

TEST(SubadditivityTest, RandomPairs) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const TrilinearForm s = TrilinearForm::random(5, 2, rng);
    const TrilinearForm t = TrilinearForm::random(5, 2, rng);
    const Subadditivity r = subadditivity_check(s, t);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.sum.rank, 8 * (r.first.rank + r.second.rank) + 1e-12);
  }
}

TEST(Box3Test, Examples) {
  const GroupParams g(5, 1);
  const GridFn one = GridFn::constant(g, 1.0);
  const Box3Check trivial = box3_criterion(TrilinearForm(5, 1), one, one, one);
  EXPECT_NEAR(trivial.value, 1, 1e-12);
  EXPECT_TRUE(trivial.holds);
  const Box3Check prod = box3_criterion(abc(5), one, one, one);
  EXPECT_NEAR(prod.value, 9.0 / 25, 1e-12);
  EXPECT_NEAR(prod.bound, std::pow(9.0 / 25, 1.0 / 8), 1e-12);
  EXPECT_TRUE(prod.holds);
}

TEST(Box3Test, RandomBoundedFunctions) {
  const GroupParams g(5, 2);
  const TrilinearForm t = TrilinearForm::diagonal(5, 2);
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Box3Check c =
        box3_criterion(t, random_grid(g, rng), random_grid(g, rng), random_grid(g, rng));
    EXPECT_TRUE(c.holds) << c.value << " > " << c.bound;
  }
}

void expect_lowrank(const SliceFamily& fam, int k) {
  const LowRankSubspaces s = lowrank_subspaces(fam, k);
  const int r = s.max_rank;
  EXPECT_LE(s.W.codim(), r * r);
  EXPECT_EQ(s.E.codim(), r);
  EXPECT_EQ(s.F.dim(), r);
  EXPECT_TRUE(lowrank_containment(fam, s));
}

TEST(LowRankTest, SingleEntry) {
  SliceFamily fam;
  fam.p = 5;
  for (int i = 0; i < 3; ++i) fam.maps.push_back(FpMat::Zero(3, 3));
  fam.maps[0](0, 0) = 1;
  const LowRankSubspaces s = lowrank_subspaces(fam, 1);
  const GroupParams g(5, 3);
  EXPECT_EQ(s.max_rank, 1);
  EXPECT_EQ(s.W.codim(), 1);
  EXPECT_FALSE(s.W.contains(g.index(FpVec::Unit(3, 0))));
  FpMat e23(2, 3);
  e23 << 0, 1, 0, 0, 0, 1;
  EXPECT_TRUE(s.E == Subspace::span(g, e23));
  EXPECT_TRUE(s.F == Subspace::span(g, FpMat(FpVec::Unit(3, 0).transpose())));
  EXPECT_TRUE(lowrank_containment(fam, s));
}

TEST(LowRankTest, ZeroFamily) {
  SliceFamily fam;
  fam.p = 5;
  for (int i = 0; i < 2; ++i) fam.maps.push_back(FpMat::Zero(2, 2));
  const LowRankSubspaces s = lowrank_subspaces(fam, 0);
  EXPECT_EQ(s.W.codim(), 0);
  EXPECT_EQ(s.E.codim(), 0);
  EXPECT_EQ(s.F.dim(), 0);
}

TEST(LowRankTest, RandomRankTwoFamilies) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    SliceFamily fam;
    fam.p = 5;
    // Shared column space, or shared row space, keeps every slice at rank 2.
    const FpMat U = fp_random(3, 2, 5, rng);
    for (int i = 0; i < 3; ++i) {
      const FpMat N = fp_random(2, 3, 5, rng);
      fam.maps.push_back(trial % 2 ? fp_mul(U, N, 5)
                                   : FpMat(fp_mul(U, N, 5).transpose()));
    }
    expect_lowrank(fam, 2);
  }
}

TEST(LowRankTest, RejectsHighRank) {
  Rng rng(12);
  const SliceFamily fam = SliceFamily::of(TrilinearForm::diagonal(5, 2));
  EXPECT_THROW(lowrank_subspaces(fam, 0), Error);
  expect_lowrank(fam, 2);
}

TEST(LowSliceRankTest, DiagonalNeedsOneCondition) {
  const TrilinearForm t = TrilinearForm::diagonal(5, 2);
  const Subspace V = low_slice_rank_subspace(t, 1);
  EXPECT_EQ(V.codim(), 1);
  for (int64_t x : V.elements()) EXPECT_LE(fp_rank(t.slice(V.group().digits(x)), 5), 1);
  EXPECT_EQ(low_slice_rank_subspace(t, 2).codim(), 0);
  EXPECT_EQ(low_slice_rank_subspace(t, 0).codim(), 2);
}

TEST(LowerPhaseTest, ShiftIdentities) {
  Rng rng(13);
  const int p = 5, n = 2;
  const TrilinearForm t = TrilinearForm::random(p, n, rng);
  LowerPhase h = LowerPhase::zero(p, n);
  h.Mab = fp_random(n, n, p, rng);
  h.Mbc = fp_random(n, n, p, rng);
  h.Mac = fp_random(n, n, p, rng);
  h.la = random_vec(n, p, rng);
  h.lc = random_vec(n, p, rng);
  h.c0 = 3;
  for (int trial = 0; trial < 50; ++trial) {
    const FpVec a0 = random_vec(n, p, rng), b0 = random_vec(n, p, rng),
                c0 = random_vec(n, p, rng);
    const FpVec a = random_vec(n, p, rng), b = random_vec(n, p, rng),
                c = random_vec(n, p, rng);
    EXPECT_EQ(trilinear_shift(t, a0, b0, c0).eval(a, b, c),
              mod(t.eval(a - a0, b - b0, c - c0) - t.eval(a, b, c), p));
    EXPECT_EQ(h.shifted(a0, b0, c0).eval(a, b, c), h.eval(a + a0, b + b0, c + c0));
  }
}

// tau with d_{a,b,c} w^kappa(x) = w^{-tau(a,b,c)}.
TrilinearForm cancelling(const PolyPhase& kappa) {
  return TrilinearForm::from_cubic(kappa).scaled(-6);
}

PolyPhase random_cubic(int p, int n, Rng& rng) {
  PolyPhase q = PolyPhase::random(p, n, 3, rng);
  PolyPhase cubic(p, n);
  for (const auto& [m, c] : q.terms())
    if (m.size() == 3) cubic.set(m, c);
  return cubic;
}

TEST(PassToSubspaceTest, SameSubspaceIsIdentity) {
  const GroupParams g(5, 1);
  Rng rng(14);
  const GroupFn f = testing::random_unimodular(g, rng);
  const TrilinearForm t = TrilinearForm::random(5, 1, rng);
  const Subspace V = Subspace::whole(g);
  const PassToSubspace r = pass_to_subspace(f, LowerPhase::zero(5, 1), t, V, V);
  EXPECT_EQ(r.w, 0);
  EXPECT_EQ(r.a0, FpVec::Zero(1));
  EXPECT_NEAR(r.value, r.alpha, 1e-12);
  EXPECT_NEAR(r.coset_max, r.alpha, 1e-12);
  EXPECT_TRUE(r.preserved);
}

TEST(PassToSubspaceTest, CubicPhaseRestrictsToPhase) {
  const GroupParams g(5, 2);
  Rng rng(15);
  const PolyPhase kappa = random_cubic(5, 2, rng);
  const GroupFn f = poly_phase_fn(kappa, g);
  const TrilinearForm t = cancelling(kappa);
  FpMat row(1, 2);
  row << 1, 2;
  const Subspace V = Subspace::span(g, row);
  const PassToSubspace r =
      pass_to_subspace(f, LowerPhase::zero(5, 2), t, Subspace::whole(g), V);
  EXPECT_NEAR(r.alpha, 1, 1e-9);
  EXPECT_NEAR(r.value, 1, 1e-9);
  EXPECT_EQ(r.w, 0);
  EXPECT_TRUE(r.preserved);
}

TEST(PassToSubspaceTest, PlantedCubicKeepsCosetBound) {
  const GroupParams g(5, 2);
  Rng rng(16);
  const PolyPhase kappa = random_cubic(5, 2, rng);
  const GroupFn noise = testing::random_unimodular(g, rng);
  GroupFn f(g, 0.5 * poly_phase_fn(kappa, g).v + 0.5 * noise.v);
  FpMat row(1, 2);
  row << 0, 1;
  const PassToSubspace r = pass_to_subspace(f, LowerPhase::zero(5, 2), cancelling(kappa),
                                            Subspace::whole(g), Subspace::span(g, row));
  EXPECT_GE(r.coset_max, r.alpha - 1e-12);
  EXPECT_TRUE(r.preserved) << r.value << " < " << r.alpha;
}

TEST(SymmetryPipelineTest, CubeOfIdentity) {
  const GroupParams g(5, 1);
  PolyPhase kappa(5, 1);
  kappa.set({0, 0, 0}, 1);
  const TrilinearForm t = abc(5).scaled(6);
  const AffineMap zero{FpMat::Zero(1, 1), FpVec::Zero(1)};
  const SymmetryReport r = symmetry_pipeline(poly_phase_fn(kappa, g), t, zero, zero);
  EXPECT_NEAR(r.alpha, 1, 1e-9);
  EXPECT_TRUE(r.asserted);
  for (const TriRank& pr : r.pair_ranks) EXPECT_EQ(pr.rank, 0);
  EXPECT_EQ(r.residual.rank, 0);
  EXPECT_EQ(r.sigma, t);
  EXPECT_TRUE(r.partial_holds);
  EXPECT_TRUE(r.full_holds);
}

TEST(SymmetryPipelineTest, PlantedAsymmetricPiece) {
  const GroupParams g(5, 2);
  Rng rng(17);
  const PolyPhase kappa = random_cubic(5, 2, rng);
  TrilinearForm piece(5, 2);
  piece.set(0, 1, 1, 1);
  const TrilinearForm t = TrilinearForm::from_cubic(kappa).scaled(6) + piece;
  const AffineMap zero{FpMat::Zero(2, 2), FpVec::Zero(2)};
  const SymmetryReport r = symmetry_pipeline(poly_phase_fn(kappa, g), t, zero, zero);
  EXPECT_TRUE(r.asserted);
  EXPECT_TRUE(r.full_holds);
  const double piece_rank = analytic_rank_tri(piece).rank;
  EXPECT_LE(r.residual.rank, 8 * (1 + piece_rank) + 1e-12);
}

TEST(SymmetryPipelineTest, NoCorrelationIsVacuous) {
  const GroupParams g(5, 1);
  Rng rng(18);
  const AffineMap zero{FpMat::Zero(1, 1), FpVec::Zero(1)};
  const SymmetryReport r =
      symmetry_pipeline(GroupFn(g), TrilinearForm::random(5, 1, rng), zero, zero);
  EXPECT_EQ(r.alpha, 0);
  EXPECT_FALSE(r.asserted);
  EXPECT_TRUE(r.partial_holds);
  EXPECT_TRUE(r.full_holds);
}

TEST(KappaTest, ZeroForm) {
  const Kappa k = kappa_from_sigma(TrilinearForm(5, 2));
  EXPECT_TRUE(k.kappa.terms().empty());
  EXPECT_FALSE(k.cstar.has_value());
}

TEST(KappaTest, CubeOfIdentity) {
  const Kappa k = kappa_from_sigma(abc(5));
  PolyPhase cube(5, 1);
  cube.set({0, 0, 0}, 1);
  EXPECT_EQ(k.kappa, cube);
  ASSERT_TRUE(k.cstar.has_value());
  EXPECT_EQ(*k.cstar, mod(kCubicAlternatingConstant, 5));
  EXPECT_EQ(k.points, 625);
  // Alternating sum at (x, a, b, c) = (0, 1, 1, 1) over the integers.
  auto kap = [](int64_t x) { return x * x * x; };
  EXPECT_EQ(-kap(0) + 3 * kap(-1) - 3 * kap(-2) + kap(-3), -6);
}

TEST(KappaTest, ConstantIsUniversal) {
  Rng rng(19);
  for (int p : {5, 7}) {
    for (int trial = 0; trial < 3; ++trial) {
      const TrilinearForm s = TrilinearForm::random_symmetric(p, p == 5 ? 2 : 1, rng);
      if (s.is_zero()) continue;
      const Kappa k = kappa_from_sigma(s);
      ASSERT_TRUE(k.cstar.has_value());
      EXPECT_EQ(*k.cstar, mod(kCubicAlternatingConstant, p));
      EXPECT_EQ(TrilinearForm::from_cubic(k.kappa), s);
    }
  }
}

TEST(KappaTest, AsymmetricFormFaults) {
  TrilinearForm t(5, 2);
  t.set(0, 1, 0, 1);
  EXPECT_THROW(kappa_from_sigma(t), NumericalFault);
}

TEST(U3LowerTest, ConstantWeightsGiveEighthPower) {
  const GroupParams g(5, 1);
  Rng rng(20);
  const GroupFn f = testing::random_fn(g, rng);
  const GridFn one = GridFn::constant(g, 1.0);
  const U3Lower r = u3_lower(f, one, one, one);
  EXPECT_NEAR(r.alpha, u3_pow8(f), 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(U3LowerTest, QuadraticPhase) {
  const GroupParams g(5, 2);
  Rng rng(21);
  const GroupFn f = poly_phase_fn(PolyPhase::random(5, 2, 2, rng), g);
  const U3Lower r = u3_lower(f, random_grid(g, rng), random_grid(g, rng),
                             random_grid(g, rng));
  EXPECT_NEAR(r.u3, 1, 1e-9);
  EXPECT_TRUE(r.holds);
}

TEST(U3LowerTest, RandomInputs) {
  const GroupParams g(5, 2);
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const U3Lower r = u3_lower(testing::random_fn(g, rng), random_grid(g, rng),
                               random_grid(g, rng), random_grid(g, rng));
    EXPECT_TRUE(r.holds) << r.alpha << " > " << r.u3;
  }
}

TEST(QuadSearchTest, FindsSquare) {
  const GroupParams g(5, 1);
  PolyPhase sq(5, 1);
  sq.set({0, 0}, 1);
  const QuadSearch r = quad_phase_search(poly_phase_fn(sq, g));
  EXPECT_EQ(r.q, sq);
  EXPECT_NEAR(r.abs_corr, 1, 1e-12);
  EXPECT_EQ(r.candidates, 25);
}

TEST(QuadSearchTest, NoisyQuadratic) {
  const GroupParams g(5, 2);
  Rng rng(23);
  PolyPhase q = PolyPhase::random(5, 2, 2, rng);
  q.set({}, 0);
  const GroupFn noise = testing::random_unimodular(g, rng);
  const GroupFn f(g, poly_phase_fn(q, g).v + 0.1 * noise.v);
  const QuadSearch r = quad_phase_search(f);
  EXPECT_EQ(r.q, q);
  EXPECT_GE(r.abs_corr, 0.9);
}

TEST(QuadSearchTest, RandomUnimodularIsSmall) {
  const GroupParams g(5, 2);
  Rng rng(24);
  const QuadSearch r = quad_phase_search(testing::random_unimodular(g, rng));
  EXPECT_LT(r.abs_corr, 0.6);
  EXPECT_EQ(r.candidates, ipow(5, 3) * 25);
}

TEST(QuadSearchTest, Budget) {
  const GroupParams g(5, 2);
  EXPECT_THROW(quad_phase_search(GroupFn(g), 1000), Error);
}

}  // namespace
}  // namespace ulab
