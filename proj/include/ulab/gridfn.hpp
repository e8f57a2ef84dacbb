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

#ifndef ULAB_GRIDFN_HPP_
#define ULAB_GRIDFN_HPP_

#include <vector>

#include "ulab/core.hpp"

namespace ulab {

using CMatRM =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// F : G x G -> C, stored row-major so that v(x, y) = F(x, y).
struct GridFn {
  GroupParams g;
  CMatRM v;

  GridFn() = default;
  explicit GridFn(const GroupParams& g) : g(g), v(CMatRM::Zero(g.size, g.size)) {}
  GridFn(const GroupParams& g, CMatRM values);

  int64_t side() const { return g.size; }
  cplx& operator()(int64_t x, int64_t y) { return v(x, y); }
  const cplx& operator()(int64_t x, int64_t y) const { return v(x, y); }

  // Cross-sections F_{x.}(u) = F(x, u) and F_{.y}(u) = F(u, y).
  GroupFn row(int64_t x) const;
  GroupFn col(int64_t y) const;
  void set_row(int64_t x, const GroupFn& f);
  void set_col(int64_t y, const GroupFn& f);

  double l1() const;  // E |F|
  double l2() const;  // (E |F|^2)^{1/2}
  double sup_norm() const;
  double mean_real() const;

  static GridFn constant(const GroupParams& g, cplx c);
  // Indicator of the flat indices x * |G| + y.
  static GridFn indicator(const GroupParams& g, const std::vector<int64_t>& flat);
};

// F : G^3 -> C, flat index (a |G| + b) |G| + c. |G|^3 must respect the cap.
struct Grid3Fn {
  GroupParams g;
  CVec v;

  Grid3Fn() = default;
  explicit Grid3Fn(const GroupParams& g, int64_t cap = kDefaultSizeCap);
  cplx& at(int64_t a, int64_t b, int64_t c) {
    return v[(a * g.size + b) * g.size + c];
  }
  const cplx& at(int64_t a, int64_t b, int64_t c) const {
    return v[(a * g.size + b) * g.size + c];
  }
};

}  // namespace ulab

#endif  // ULAB_GRIDFN_HPP_
