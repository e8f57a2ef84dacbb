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

#include "ulab/fp.hpp"

#include <algorithm>

namespace ulab {

FpMat fp_reduce(FpMat a, int p) {
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = mod(a.data()[i], p);
  return a;
}

FpMat fp_mul(const FpMat& a, const FpMat& b, int p) {
  return fp_reduce(a * b, p);
}

FpVec fp_mul(const FpMat& a, const FpVec& x, int p) {
  FpVec r = a * x;
  for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = mod(r[i], p);
  return r;
}

Rref fp_rref(FpMat a, int p) {
  a = fp_reduce(std::move(a), p);
  Rref out;
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (a(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    a.row(r).swap(a.row(piv));
    const int64_t inv = inv_mod(a(r, c), p);
    for (Eigen::Index j = 0; j < cols; ++j) a(r, j) = a(r, j) * inv % p;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || a(i, c) == 0) continue;
      const int64_t f = a(i, c);
      for (Eigen::Index j = 0; j < cols; ++j)
        a(i, j) = mod(a(i, j) - f * a(r, j), p);
    }
    out.pivots.push_back(int(c));
    ++r;
  }
  out.m = std::move(a);
  return out;
}

int fp_rank(const FpMat& a, int p) {
  if (a.size() == 0) return 0;
  return int(fp_rref(a, p).pivots.size());
}

FpMat fp_kernel(const FpMat& a, int p) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return FpMat::Identity(cols, cols);
  Rref r = fp_rref(a, p);
  std::vector<char> is_pivot(cols, 0);
  for (int c : r.pivots) is_pivot[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  FpMat k = FpMat::Zero(cols, Eigen::Index(free_cols.size()));
  for (size_t f = 0; f < free_cols.size(); ++f) {
    k(free_cols[f], f) = 1;
    for (size_t i = 0; i < r.pivots.size(); ++i)
      k(r.pivots[i], f) = mod(-r.m(i, free_cols[f]), p);
  }
  return k;
}

std::optional<FpMat> fp_inverse(const FpMat& a, int p) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) return std::nullopt;
  FpMat aug(n, 2 * n);
  aug << a, FpMat::Identity(n, n);
  Rref r = fp_rref(aug, p);
  if (int(r.pivots.size()) < n || (n > 0 && r.pivots[n - 1] >= n))
    return std::nullopt;
  return FpMat(r.m.rightCols(n));
}

std::optional<FpVec> fp_solve(const FpMat& a, const FpVec& b, int p) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  FpMat aug(rows, cols + 1);
  aug << a, b;
  Rref r = fp_rref(aug, p);
  FpVec x = FpVec::Zero(cols);
  for (size_t i = 0; i < r.pivots.size(); ++i) {
    if (r.pivots[i] == cols) return std::nullopt;
    x[r.pivots[i]] = r.m(i, cols);
  }
  return x;
}

FpMat fp_complement(const FpMat& rows, int n, int p) {
  std::vector<char> is_pivot(n, 0);
  if (rows.rows() > 0)
    for (int c : fp_rref(rows, p).pivots) is_pivot[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  FpMat out = FpMat::Zero(Eigen::Index(free_cols.size()), n);
  for (size_t i = 0; i < free_cols.size(); ++i) out(i, free_cols[i]) = 1;
  return out;
}

FpMat fp_random(int rows, int cols, int p, Rng& rng) {
  FpMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform_int(0, p - 1);
  return m;
}

namespace {

FpMat random_invertible(int n, int p, Rng& rng) {
  for (;;) {
    FpMat m = fp_random(n, n, p, rng);
    if (fp_rank(m, p) == n) return m;
  }
}

}  // namespace

FpMat fp_random_of_rank(int rows, int cols, int rank, int p, Rng& rng) {
  FpMat d = FpMat::Zero(rows, cols);
  for (int i = 0; i < rank; ++i) d(i, i) = 1;
  return fp_mul(fp_mul(random_invertible(rows, p, rng), d, p),
                random_invertible(cols, p, rng), p);
}

Subspace::Subspace(const GroupParams& g) : g_(g), basis_(0, g.n) {}

Subspace Subspace::span(const GroupParams& g, const FpMat& rows) {
  if (rows.cols() != g.n) throw Error("Subspace: basis width must equal n");
  Subspace s(g);
  if (rows.rows() == 0) return s;
  Rref r = fp_rref(rows, g.p);
  s.pivots_ = r.pivots;
  s.basis_ = r.m.topRows(Eigen::Index(r.pivots.size()));
  return s;
}

Subspace Subspace::span_points(const GroupParams& g,
                               const std::vector<int64_t>& points) {
  FpMat rows(Eigen::Index(points.size()), g.n);
  for (size_t i = 0; i < points.size(); ++i)
    rows.row(Eigen::Index(i)) = g.digits(points[i]).transpose();
  return span(g, rows);
}

Subspace Subspace::whole(const GroupParams& g) {
  return span(g, FpMat::Identity(g.n, g.n));
}

bool Subspace::contains(const FpVec& x) const {
  FpVec v = x;
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = mod(v[i], g_.p);
  for (size_t i = 0; i < pivots_.size(); ++i) {
    const int64_t c = v[pivots_[i]];
    if (c == 0) continue;
    for (int j = 0; j < g_.n; ++j)
      v[j] = mod(v[j] - c * basis_(Eigen::Index(i), j), g_.p);
  }
  return v.isZero();
}

Subspace Subspace::annihilator() const {
  if (dim() == 0) return whole(g_);
  return span(g_, fp_kernel(basis_, g_.p).transpose());
}

Subspace Subspace::operator+(const Subspace& o) const {
  require_same(g_, o.g_);
  FpMat rows(basis_.rows() + o.basis_.rows(), g_.n);
  rows << basis_, o.basis_;
  return span(g_, rows);
}

Subspace Subspace::intersect(const Subspace& o) const {
  return (annihilator() + o.annihilator()).annihilator();
}

bool Subspace::operator==(const Subspace& o) const {
  return g_ == o.g_ && basis_ == o.basis_;
}

std::vector<int64_t> Subspace::elements() const {
  const int d = dim();
  const int64_t count = ipow(g_.p, d);
  std::vector<int64_t> out;
  out.reserve(count);
  FpVec coeff = FpVec::Zero(d);
  for (int64_t c = 0; c < count; ++c) {
    int64_t t = c;
    for (int i = 0; i < d; ++i) {
      coeff[i] = t % g_.p;
      t /= g_.p;
    }
    FpVec v = d == 0 ? FpVec(FpVec::Zero(g_.n))
                     : FpVec(basis_.transpose() * coeff);
    out.push_back(g_.index(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

GroupFn Subspace::indicator() const {
  return GroupFn::indicator(g_, elements());
}

}  // namespace ulab
