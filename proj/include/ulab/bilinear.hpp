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

// Bi-affine maps G x G -> F_p^k, their ranks, and high-rank bilinear Bohr
// decompositions.

#ifndef ULAB_BILINEAR_HPP_
#define ULAB_BILINEAR_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ulab/fp.hpp"
#include "ulab/galg.hpp"
#include "ulab/gridfn.hpp"

namespace ulab {

inline constexpr int kInfiniteRank = std::numeric_limits<int>::max();

// x . T y + a . y + x . b + lambda
struct AffineForm {
  FpMat T;
  FpVec a, b;
  int64_t lambda = 0;

  static AffineForm zero(int n);
  static AffineForm bilinear(FpMat T);
};

class BiAffineMap {
 public:
  BiAffineMap() = default;
  explicit BiAffineMap(const GroupParams& g) : g_(g) {}
  BiAffineMap(const GroupParams& g, std::vector<AffineForm> coords);

  static BiAffineMap random(const GroupParams& g, int k, Rng& rng,
                            bool bilinear_only = false);

  const GroupParams& group() const { return g_; }
  int k() const { return int(c_.size()); }
  const std::vector<AffineForm>& coords() const { return c_; }
  void push_back(AffineForm f);

  int64_t eval(int i, int64_t x, int64_t y) const;
  FpVec eval(int64_t x, int64_t y) const;
  // Value as an index of F_p^k; requires p^k to fit.
  int64_t eval_index(int64_t x, int64_t y) const;
  bool is_bilinear() const;
  // sum_i u_i T_i
  FpMat combination(const FpVec& u) const;

 private:
  GroupParams g_;
  std::vector<AffineForm> c_;
};

// beta(x, y) = gamma(x, y) + A x + B y + z, read off by evaluation.
struct BiAffineParts {
  BiAffineMap gamma;  // bilinear part
  FpMat A;            // k x n
  FpMat B;            // k x n
  FpVec z;
};
BiAffineParts biaffine_parts(const BiAffineMap& beta);

int algebraic_rank(const FpMat& T, int p);

// E_{x,y} w^{x . T y} as an exact rational, from counts of each phase.
Rational bilinear_character_mean(const FpMat& T, int p);
// -log_p E_{x,y} w^{x . T y}. Throws NumericalFault if the mean is not a
// power of p.
double analytic_rank_bilinear(const FpMat& T, int p);

struct RankScan {
  int rank = kInfiniteRank;   // min over nonzero u of rank(u . beta)
  FpVec argmin;               // first minimizing u in index order
  std::vector<int> ranks;     // ranks[i] for u = digits(i), i >= 1; ranks[0] unused
};

// Exhaustive scan over u in F_p^k \ {0}; kInfiniteRank when k = 0.
RankScan map_rank_scan(const BiAffineMap& beta);
int map_rank(const BiAffineMap& beta);

enum class Axis { kX, kY };

// x-normal: the fraction of y with beta(x_i, y) = 0 for all i is exactly
// p^{-rk}. y-normal likewise in x.
bool normality(const std::vector<int64_t>& points, const BiAffineMap& beta,
               Axis axis);

struct IndStep {
  bool high_rank = false;  // map_rank >= t, nothing returned
  FpVec u;
  Subspace V, W;           // ker T^T and ker T for T = sum u_i T_i
  RankScan scan;
};
IndStep indstep(const BiAffineMap& beta, int t);

struct BohrDecomposition {
  GroupParams g;
  BiAffineMap beta;
  int t = 0;
  Subspace X0, X1, Y0, Y1;
  FpMat BX1, BY1;               // basis columns of X1 and Y1
  std::vector<FpVec> peeled;    // the combinations u removed, in order
  FpMat L;                      // rows: complement of span(peeled) in F_p^k
  RankScan certificate;         // scan of the L-part restricted to X1 x Y1
  int rounds = 0;
  FpMat x_inverse, y_inverse;   // inverses of [X0 | X1] and [Y0 | Y1]

  BohrDecomposition() : X0(g), X1(g), Y0(g), Y1(g) {}
  explicit BohrDecomposition(const GroupParams& g)
      : g(g), X0(g), X1(g), Y0(g), Y1(g) {}

  // Components along X0 (resp. Y0) of the direct sums.
  int64_t x0(int64_t x) const;
  int64_t y0(int64_t y) const;
};

struct Cell {
  int64_t v = 0, w = 0, z = 0;  // z indexes F_p^k
  bool operator<(const Cell& o) const {
    return std::tie(v, w, z) < std::tie(o.v, o.w, o.z);
  }
  bool operator==(const Cell& o) const { return v == o.v && w == o.w && z == o.z; }
};

// Iterates indstep on the quotient of beta by the peeled combinations,
// restricted to the current subspaces, until the restriction has rank >= t.
BohrDecomposition bohr_decompose(const BiAffineMap& beta, int t);
Cell cell_of(const BohrDecomposition& d, int64_t x, int64_t y);
// Nonempty cells in sorted order with their points.
std::vector<std::pair<Cell, std::vector<int64_t>>> bohr_cells(
    const BohrDecomposition& d);
// beta restricted to (v + X1) x (w + Y1) in the coordinates of the bases of
// X1 and Y1, composed with the functionals in L; built by evaluation.
BiAffineMap restrict_to_cell(const BohrDecomposition& d, int64_t v, int64_t w);

struct CellVerification {
  int64_t cells = 0;
  int64_t failures = 0;
  int min_rank = kInfiniteRank;
};
// map_rank of restrict_to_cell on every nonempty cell.
CellVerification verify_cells(const BohrDecomposition& d);

// Replaces F on each level set of beta by its mean there.
GridFn avg_projection(const GridFn& F, const BiAffineMap& beta);

// Fraction of x in U for which y -> beta(x, y) maps V onto F_p^k.
double surjective_fraction(const BiAffineMap& beta, const Subspace& U,
                           const Subspace& V);

// Characteristic function of a cell on G x G.
GridFn cell_indicator(const BohrDecomposition& d, const Cell& c);
// [b_1, ..., b_8]: probability that the i-th vertex of a random 4-arrangement
// lies in the i-th set.
double cell_gen_inner(const BohrDecomposition& d, const std::array<Cell, 8>& c);

struct QrSample {
  double alpha = 0, eps1 = 0, eps2 = 0;
  int64_t exceptions = 0;
  double bound = 0;   // (2 alpha eps1 + eps2) m / theta^2
  bool holds = false;
};
// Sets are membership vectors over X; f takes values in [0, 1]. alpha is the
// mean density of B_x = {i : x in A_i} unless given.
QrSample qr_sample_check(const std::vector<std::vector<uint8_t>>& sets,
                         const std::vector<double>& f, double theta,
                         std::optional<double> alpha = std::nullopt);

struct OneSet {
  Cell cell;
  double defect = 1;     // bihom_defect of phi on the cell
  double mu_value = 0;
  double xi_value = 0;
  bool found = false;
};
// Among nonempty cells with mu >= ||mixed(mu)||^2 / 2 and xi <= zeta / gamma
// (zeta = E xi), the one on which phi has the smallest defect; ties go to
// the first cell in sorted order.
OneSet restrict_to_one_set(const BohrDecomposition& d, const GridFn& mu,
                           const DistFn& phi, const GridFn& xi, double gamma);

}  // namespace ulab

#endif  // ULAB_BILINEAR_HPP_
