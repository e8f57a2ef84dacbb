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

// Multiplicative derivatives, uniformity norms and box norms.

#ifndef ULAB_GOWERS_HPP_
#define ULAB_GOWERS_HPP_

#include <string>

#include "ulab/core.hpp"
#include "ulab/gridfn.hpp"

namespace ulab {

enum class NormMethod { kDirect, kNested, kFourier };
std::string to_string(NormMethod m);

struct NormReport {
  int k = 0;
  double value = 0;  // ||f||_{U^k}
  double power = 0;  // ||f||_{U^k}^{2^k}
  NormMethod method = NormMethod::kNested;
};

// d_a f(x) = f(x) conj(f(x - a))
GroupFn derivative(const GroupFn& f, int64_t a);
GroupFn derivative(const GroupFn& f, const GroupElem& a);

// sum_r |f^(r)|^4
double u2_pow4(const GroupFn& f);
// E_a ||d_a f||_{U^2}^4
double u3_pow8(const GroupFn& f);
// E_{a,b} ||d_{a,b} f||_{U^2}^4
double u4_pow16(const GroupFn& f);
// E_a ||d_a f||_{U^3}^8, a second route to the U^4 power.
double u4_pow16_via_u3(const GroupFn& f);
// The defining cube average, evaluated vertex by vertex. |G| <= 32.
double uk_pow_direct(const GroupFn& f, int k);

// k = 1: |E f| (kFourier); k = 2: ||f^||_4 (kFourier); k = 3, 4: kNested.
NormReport uk_norm(const GroupFn& f, int k);
NormReport uk_norm(const GroupFn& f, int k, NormMethod method);

// Fourth power of the two-variable box norm:
//   E_{x,x'} |E_y F(x,y) conj(F(x',y))|^2.
double box_norm2_pow4(const GridFn& F);
double box_norm2(const GridFn& F);
// Eighth power of the three-variable box norm.
double box_norm3_pow8(const Grid3Fn& F);
double box_norm3(const Grid3Fn& F);

}  // namespace ulab

#endif  // ULAB_GOWERS_HPP_
