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

#include "ulab/gridfn.hpp"

namespace ulab {

GridFn::GridFn(const GroupParams& g, CMatRM values) : g(g), v(std::move(values)) {
  if (v.rows() != g.size || v.cols() != g.size)
    throw Error("GridFn: shape must be |G| x |G|");
}

GroupFn GridFn::row(int64_t x) const {
  return GroupFn(g, CVec(v.row(x).transpose()));
}

GroupFn GridFn::col(int64_t y) const { return GroupFn(g, CVec(v.col(y))); }

void GridFn::set_row(int64_t x, const GroupFn& f) {
  require_same(g, f.g);
  v.row(x) = f.v.transpose();
}

void GridFn::set_col(int64_t y, const GroupFn& f) {
  require_same(g, f.g);
  v.col(y) = f.v;
}

double GridFn::l1() const { return v.cwiseAbs().sum() / double(v.size()); }

double GridFn::l2() const { return std::sqrt(v.squaredNorm() / double(v.size())); }

double GridFn::sup_norm() const { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double GridFn::mean_real() const { return v.real().sum() / double(v.size()); }

GridFn GridFn::constant(const GroupParams& g, cplx c) {
  return GridFn(g, CMatRM::Constant(g.size, g.size, c));
}

GridFn GridFn::indicator(const GroupParams& g, const std::vector<int64_t>& flat) {
  GridFn f(g);
  for (int64_t i : flat) f.v.data()[i] = 1.0;
  return f;
}

Grid3Fn::Grid3Fn(const GroupParams& g, int64_t cap) : g(g) {
  const int64_t n3 = g.size * g.size * g.size;
  if (n3 > cap) throw Error("Grid3Fn: |G|^3 exceeds the size cap");
  v = CVec::Zero(n3);
}

}  // namespace ulab
