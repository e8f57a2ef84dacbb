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

// Vertical, horizontal and mixed convolutions on G x G, and the arrangement
// functionals built from them.
//
// A vertical parallelogram of width w and height h has vertices
//   (x, y), (x, y + h), (x + w, y'), (x + w, y' + h)
// and f(P) = f(v1) conj(f(v2)) conj(f(v3)) f(v4).

#ifndef ULAB_GRID_HPP_
#define ULAB_GRID_HPP_

#include <array>
#include <cstdint>

#include "ulab/gridfn.hpp"

namespace ulab {

struct Parallelogram {
  GroupParams g;
  int64_t w = 0, h = 0, x = 0, y = 0, y2 = 0;

  // Flat indices (x |G| + y) of the four vertices.
  std::array<int64_t, 4> vertices() const;
  // Recovers (w, h, x, y, y2) from four vertices; throws if they do not form
  // a vertical parallelogram.
  static Parallelogram from_vertices(const GroupParams& g,
                                     const std::array<int64_t, 4>& v);
};

// Dense transforms of every row (along y) or every column (along x).
void dft_rows(CMatRM& m, const GroupParams& g, bool inverse);
void dft_cols(CMatRM& m, const GroupParams& g, bool inverse);

// (f v g)(x, h) = E_y f(x, y) conj(g(x, y - h))
GridFn vert_conv(const GridFn& f, const GridFn& g);
// (f h g)(w, y) = E_x f(x, y) conj(g(x - w, y))
GridFn horiz_conv(const GridFn& f, const GridFn& g);
// Horizontal convolution of (f1 v f2) with (f3 v f4).
GridFn mixed_conv(const GridFn& f1, const GridFn& f2, const GridFn& f3,
                  const GridFn& f4);
GridFn mixed_conv(const GridFn& f);

// E_{P1 ~ P2} f(P1) conj(f(P2)) = ||mixed_conv(f)||_2^2.
double arr_functional(const GridFn& f);
// The same average by enumerating all |G|^8 parameter tuples. |G| <= 9.
double arr_exhaustive(const GridFn& f);

// Flat vertex indices of the first-order 4-arrangement with parameters
// (w, h, x1, y1, y1', x2, y2, y2'); signs follow the length-8 Morse sequence.
std::array<int64_t, 8> arrangement_points(const GroupParams& g,
                                          const std::array<int64_t, 8>& t);
// Flat vertex indices of the second-order 4-arrangement with parameters
// (w, h, then a base (x, y, y') for each of the two outer parallelograms,
// then a base for each of the eight inner parallelograms). Point 4i + j is
// vertex j of inner parallelogram i; signs follow the length-32 Morse sequence.
std::array<int64_t, 32> arrangement2_points(const GroupParams& g,
                                            const std::array<int64_t, 32>& t);
std::array<int64_t, 32> random_arrangement2(const GroupParams& g, Rng& rng);
// (-1)^{popcount(i)}
inline int morse_sign(int i) { return (__builtin_popcount(i) & 1) ? -1 : 1; }

struct MonteCarlo {
  double estimate = 0;
  double stderr_ = 0;
  int64_t samples = 0;
};

// Monte Carlo estimate of E_{Q1 ~ Q2} f(Q1) conj(f(Q2)) over second-order
// 4-arrangements. Samples are drawn in fixed blocks of independent
// substreams, so the result does not depend on the thread count.
MonteCarlo arr2_estimate(const GridFn& f, int64_t samples, uint64_t seed);
// ||mixed_conv(mixed_conv(f))||_2^2, the exact value of the same average.
double arr2_exact(const GridFn& f);

inline constexpr int64_t kMcBlock = 1024;

}  // namespace ulab

#endif  // ULAB_GRID_HPP_
