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

// Trilinear forms on F_p^n, their analytic rank, symmetrization, and the
// steps that turn a correlating trilinear form into a cubic phase.

#ifndef ULAB_TRILINEAR_HPP_
#define ULAB_TRILINEAR_HPP_

#include <array>
#include <optional>
#include <vector>

#include "ulab/bogolyubov.hpp"
#include "ulab/fp.hpp"
#include "ulab/gridfn.hpp"

namespace ulab {

// tau(a, b, c) = sum tau_ijk a_i b_j c_k
class TrilinearForm {
 public:
  TrilinearForm() : TrilinearForm(5, 1) {}
  TrilinearForm(int p, int n);

  static TrilinearForm random(int p, int n, Rng& rng);
  static TrilinearForm random_symmetric(int p, int n, Rng& rng);
  // sum_i a_i b_i c_i
  static TrilinearForm diagonal(int p, int n);
  // The trilinear form of a homogeneous cubic: kappa(x) = sigma(x, x, x)
  // with sigma symmetric. Requires p >= 5.
  static TrilinearForm from_cubic(const PolyPhase& q);

  int p() const { return p_; }
  int n() const { return n_; }
  int64_t& at(int i, int j, int k) { return c_[(i * n_ + j) * n_ + k]; }
  int64_t at(int i, int j, int k) const { return c_[(i * n_ + j) * n_ + k]; }
  void set(int i, int j, int k, int64_t v) { at(i, j, k) = mod(v, p_); }

  int64_t eval(const FpVec& a, const FpVec& b, const FpVec& c) const;
  // T_x with tau(x, y, z) = y . T_x z
  FpMat slice(const FpVec& x) const;
  // (a, b, c) -> tau(a_{pi(0)}, a_{pi(1)}, a_{pi(2)}) where a_0 = a etc.
  TrilinearForm permuted(const std::array<int, 3>& pi) const;
  TrilinearForm scaled(int64_t s) const;
  TrilinearForm operator+(const TrilinearForm& o) const;
  TrilinearForm operator-(const TrilinearForm& o) const;
  bool operator==(const TrilinearForm& o) const;
  bool is_symmetric() const;
  bool is_zero() const;

  const std::vector<int64_t>& coeffs() const { return c_; }

 private:
  int p_, n_;
  std::vector<int64_t> c_;
};

inline constexpr std::array<std::array<int, 3>, 6> kPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

struct TriRank {
  Rational mean;  // E_{a,b,c} w^{tau(a,b,c)}
  double rank = 0;
};
// Exact count of tau over all (a, b, c); p^{3n} evaluations.
TriRank analytic_rank_tri(const TrilinearForm& tau);
// E_x p^{-rank(T_x)} from the slices; p^n rank computations.
Rational slice_mean(const TrilinearForm& tau);

struct Symmetrized {
  TrilinearForm sigma;
  TrilinearForm residual;  // tau - sigma
};
// sigma = (1/6) sum over permutations. Throws for p < 5.
Symmetrized symmetrize(const TrilinearForm& tau);

struct Subadditivity {
  TriRank sum, first, second;
  bool holds = false;
};
// rank(sigma + tau) <= 8 (rank(sigma) + rank(tau)), compared as
// mean(sigma + tau) >= (mean(sigma) mean(tau))^8 in exact arithmetic.
Subadditivity subadditivity_check(const TrilinearForm& sigma,
                                  const TrilinearForm& tau);

struct Box3Check {
  double value = 0;  // |E u(a,b) v(b,c) w(a,c) w^{-tau(a,b,c)}|
  double bound = 0;  // p^{-r/8}
  bool holds = false;
};
Box3Check box3_criterion(const TrilinearForm& tau, const GridFn& u,
                         const GridFn& v, const GridFn& w);

// x -> T_x linear, T_x = sum_i x_i maps[i].
struct SliceFamily {
  int p = 5;
  std::vector<FpMat> maps;

  static SliceFamily of(const TrilinearForm& tau);
  int dim() const { return int(maps.size()); }
  FpMat at(const FpVec& x) const;
};

struct LowRankSubspaces {
  Subspace W;        // in V
  Subspace E;        // in the domain
  Subspace F;        // in the range
  int max_rank = 0;  // largest rank among the T_x
  FpVec pivot;       // an x attaining it
};
// Throws if some T_x has rank above k. All spaces share the dimension of
// the family (square slices).
LowRankSubspaces lowrank_subspaces(const SliceFamily& fam, int k);
// T_x u in F for every x in W and u in E, checked on all elements.
bool lowrank_containment(const SliceFamily& fam, const LowRankSubspaces& s);

// A subspace V of least codimension with rank(T_x) <= bound for every x in
// V. Codimensions are scanned upward; within one codimension, candidate
// annihilators are taken in order of their reduced bases as digit strings.
Subspace low_slice_rank_subspace(const TrilinearForm& tau, int bound);

// A product of linear and bilinear phase functions of (a, b, c) and a root
// of unity: the phase is
//   a.Mab b + b.Mbc c + a.Mac c + la.a + lb.b + lc.c + c0.
struct LowerPhase {
  int p = 5;
  FpMat Mab, Mbc, Mac;
  FpVec la, lb, lc;
  int64_t c0 = 0;

  static LowerPhase zero(int p, int n);
  int64_t eval(const FpVec& a, const FpVec& b, const FpVec& c) const;
  // (a, b, c) -> h(a + a0, b + b0, c + c0)
  LowerPhase shifted(const FpVec& a0, const FpVec& b0, const FpVec& c0v) const;
};

// tau(a - a0, b - b0, c - c0) - tau(a, b, c) as a lower-order phase.
LowerPhase trilinear_shift(const TrilinearForm& tau, const FpVec& a0,
                           const FpVec& b0, const FpVec& c0);

// E_x E_{a,b,c in V} w^{h(a,b,c) + tau(a,b,c)} d_{a,b,c} f(x - w).
cplx restricted_correlation(const GroupFn& f, const LowerPhase& h,
                            const TrilinearForm& tau, const Subspace& V,
                            int64_t w);

struct PassToSubspace {
  FpVec a0, b0, c0;
  int64_t w = 0;
  LowerPhase h1;
  double alpha = 0;   // |correlation| on V0
  double value = 0;   // |correlation| on V with h1 and the shift w
  // max over coset triples of |E over the coset triple|, which averages to
  // the V0 correlation and so is at least alpha.
  double coset_max = 0;
  bool preserved = false;  // value >= alpha
};
// Scans coset representatives of V in V0 in lexicographic order and keeps
// the shift with the largest rebuilt correlation.
PassToSubspace pass_to_subspace(const GroupFn& f, const LowerPhase& h,
                                const TrilinearForm& tau, const Subspace& V0,
                                const Subspace& V);

struct SymmetryReport {
  double alpha = 0;  // |E_x E_{a,b,c} d_{a,b,c} f(x) w^{-tau - rho_lin(a).c - sigma_lin(b).c}|
  TrilinearForm sigma;
  std::array<TriRank, 6> pair_ranks;  // tau - tau o pi, in kPermutations order
  TriRank residual;                   // tau - sigma
  bool asserted = false;              // alpha large enough to assert anything
  double partial_bound = 0;           // log_p(1 / alpha)
  double full_bound = 0;              // 2^12 log_p(1 / alpha)
  bool partial_holds = true;
  bool full_holds = true;
};
// rho_lin and sigma_lin are the affine maps G -> G of the correlation
// inequality.
SymmetryReport symmetry_pipeline(const GroupFn& f, const TrilinearForm& tau,
                                 const AffineMap& rho_lin,
                                 const AffineMap& sigma_lin);

struct Kappa {
  PolyPhase kappa;                // sigma(x, x, x)
  std::optional<int64_t> cstar;   // alternating sum = cstar sigma, mod p
  int64_t points = 0;             // evaluation points checked
};
// Determines cstar from the first point with sigma != 0 and verifies it at
// every (x, a, b, c) in G^4; throws NumericalFault on disagreement.
Kappa kappa_from_sigma(const TrilinearForm& sigma);
// The constant the alternating sum produces, as an integer.
inline constexpr int64_t kCubicAlternatingConstant = -6;

struct U3Lower {
  double alpha = 0;  // |E d_{a,b,c} g(x) u(a,b) v(b,c) w(a,c)|
  double u3 = 0;
  bool holds = false;
};
U3Lower u3_lower(const GroupFn& g, const GridFn& u, const GridFn& v,
                 const GridFn& w);

struct QuadSearch {
  PolyPhase q;   // degree <= 2, no constant term
  cplx corr;     // E_x g(x) w^{-q(x)}
  double abs_corr = 0;
  int64_t candidates = 0;
};
// Exhaustive over quadratic parts; the linear part comes from one transform
// per quadratic part. Ties keep the earliest candidate.
QuadSearch quad_phase_search(const GroupFn& g, int64_t budget = 400'000'000);

}  // namespace ulab

#endif  // ULAB_TRILINEAR_HPP_
