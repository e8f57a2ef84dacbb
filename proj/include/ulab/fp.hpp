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

// Exact linear algebra over F_p on integer Eigen matrices, and subspaces of G.

#ifndef ULAB_FP_HPP_
#define ULAB_FP_HPP_

#include <optional>
#include <vector>

#include "ulab/core.hpp"

namespace ulab {

FpMat fp_reduce(FpMat a, int p);
FpMat fp_mul(const FpMat& a, const FpMat& b, int p);
FpVec fp_mul(const FpMat& a, const FpVec& x, int p);

struct Rref {
  FpMat m;                  // reduced row echelon form
  std::vector<int> pivots;  // pivot column of each nonzero row
};

Rref fp_rref(FpMat a, int p);
int fp_rank(const FpMat& a, int p);
// Columns form a basis of {x : a x = 0}.
FpMat fp_kernel(const FpMat& a, int p);
std::optional<FpMat> fp_inverse(const FpMat& a, int p);
std::optional<FpVec> fp_solve(const FpMat& a, const FpVec& b, int p);
// Rows e_j for the non-pivot columns j of rows; together with rows they span
// F_p^n.
FpMat fp_complement(const FpMat& rows, int n, int p);
// Random matrix with the given rank, as U diag(1..1,0..0) V for invertible U, V.
FpMat fp_random_of_rank(int rows, int cols, int rank, int p, Rng& rng);
FpMat fp_random(int rows, int cols, int p, Rng& rng);

class Subspace {
 public:
  explicit Subspace(const GroupParams& g);  // the zero subspace
  static Subspace span(const GroupParams& g, const FpMat& rows);
  static Subspace span_points(const GroupParams& g,
                              const std::vector<int64_t>& points);
  static Subspace whole(const GroupParams& g);

  const GroupParams& group() const { return g_; }
  // Rows are an echelon-reduced basis.
  const FpMat& basis() const { return basis_; }
  int dim() const { return int(basis_.rows()); }
  int codim() const { return g_.n - dim(); }

  bool contains(const FpVec& x) const;
  bool contains(int64_t x) const { return contains(g_.digits(x)); }
  // {r : r.v = 0 for all v in the subspace}
  Subspace annihilator() const;
  Subspace operator+(const Subspace& o) const;
  Subspace intersect(const Subspace& o) const;
  bool operator==(const Subspace& o) const;

  // Sorted element indices, enumerated from the basis.
  std::vector<int64_t> elements() const;
  GroupFn indicator() const;

 private:
  GroupParams g_;
  FpMat basis_;
  std::vector<int> pivots_;
};

}  // namespace ulab

#endif  // ULAB_FP_HPP_
