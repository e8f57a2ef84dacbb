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

// L2 approximation of mixed convolutions by averaging projections onto the
// level sets of a bi-affine map, and the linear analogue.

#ifndef ULAB_BOGOLYUBOV_HPP_
#define ULAB_BOGOLYUBOV_HPP_

#include <string>
#include <vector>

#include "ulab/bilinear.hpp"

namespace ulab {

// h -> L h + c
struct AffineMap {
  FpMat L;
  FpVec c;

  int64_t apply(const GroupParams& g, int64_t h) const;
  bool operator<(const AffineMap& o) const;
};

// spectrum[h] lists the frequencies u with (h, u) in the set to cover.
// Greedily adds the affine map covering the most uncovered points until at
// most max_bad_rows values of h keep an uncovered frequency. Exhaustive over
// all p^{n^2 + n} maps when that fits the budget, otherwise maps are fitted
// through uncovered points. Result is sorted.
struct AffineCover {
  std::vector<AffineMap> maps;
  int64_t bad_rows = 0;
  bool exhaustive = true;
};
AffineCover affine_cover(const GroupParams& g,
                         const std::vector<std::vector<int64_t>>& spectrum,
                         int64_t max_bad_rows,
                         int64_t exhaustive_budget = 50'000'000);

// max_x sum_u |(F_{x.})^(u)|
double column_decay_max(const GridFn& F);

struct BogOptions {
  int max_halvings = 6;
  int64_t exhaustive_budget = 50'000'000;
  // Drop coordinates that are linear combinations of earlier ones; the level
  // sets do not change.
  bool prune = true;
};

struct BogReport {
  double zeta = 0;
  double gamma = 0;      // spectrum threshold on |g^_{.h}(u)|^2
  double eps = 0;        // allowed fraction of uncovered rows
  double delta = 0;      // truncation at delta^2 / m^2
  int64_t spectrum_size = 0;
  int64_t bad_rows = 0;
  int m = 0;
  int k_raw = 0;
  int k = 0;
  double error = 0;      // ||F - P_beta F||_2
  std::vector<double> u_l1;  // ||u_i^||_1, to compare with 2^m
  double column_decay = 0;
  int halvings = 0;
  bool within = false;   // error <= zeta
  bool exhaustive_cover = true;
  std::vector<AffineMap> cover;
};

struct BogResult {
  BiAffineMap beta;
  BogReport report;
};

// Requires f bounded and zeta > 0.
BogResult bogolyubov_bilinear(const GridFn& f, double zeta,
                              const BogOptions& opt = {});

struct WeakBog {
  Subspace B;
  std::vector<int64_t> spectrum;
  double error = 0;  // ||f * g - mu_B * f * g||_2
};
// B is the annihilator of {r : |f^(r) g^(r)| >= eps / 4}.
WeakBog weak_bog_linear(const GroupFn& f, const GroupFn& g, double eps);

}  // namespace ulab

#endif  // ULAB_BOGOLYUBOV_HPP_
