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

// Partial maps A -> G on subsets of G x G and the 4-arrangements they
// respect.
//
// A map respects a first-order 4-arrangement (P1, P2) when phi(P1) = phi(P2),
// where phi(P) = phi(v1) - phi(v2) - phi(v3) + phi(v4). Second-order
// arrangements replace each point by a parallelogram of that width and
// height. Counts are reported as densities among all |G|^8 (first order) or
// |G|^32 (second order) parameter tuples.

#ifndef ULAB_ARRANGE_HPP_
#define ULAB_ARRANGE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ulab/galg.hpp"
#include "ulab/grid.hpp"

namespace ulab {

struct PartialMap {
  GroupParams g;
  std::vector<uint8_t> domain;  // flat x |G| + y
  std::vector<int64_t> values;  // meaningful on the domain only

  PartialMap() = default;
  explicit PartialMap(const GroupParams& g);

  int64_t side() const { return g.size; }
  bool contains(int64_t flat) const { return domain[flat] != 0; }
  int64_t at(int64_t flat) const { return values[flat]; }
  void set(int64_t flat, int64_t value);
  void erase(int64_t flat);
  int64_t size() const;
  double density() const;
  std::vector<int64_t> points() const;

  GridFn indicator() const;
  // 1_A delta_{phi}
  DistFn to_distfn() const;
};

// A = {(a, b) : max_r |(d_{a,b} f)^(r)| >= gamma} with phi(a, b) the first
// maximizing frequency.
// When magnitude is given it receives |(d_{a,b} f)^(phi(a, b))| for every
// (a, b), in flat order, whether or not the point reaches gamma.
PartialMap spectral_map(const GroupFn& f, double gamma,
                        std::vector<double>* magnitude = nullptr);

enum class RespectMode { kExact, kMonteCarlo };

struct ArrangementStats {
  int order = 1;
  double total = 0;      // density of arrangements inside A
  double respected = 0;  // density of respected arrangements inside A
  double total_stderr = 0;
  double respected_stderr = 0;
  int64_t samples = 0;   // 0 in exact mode
  bool exact = true;

  // |G|^8 or |G|^32
  double tuples(const GroupParams& g) const;
  double ratio() const { return total > 0 ? respected / total : 0.0; }
};

// Exact mode evaluates ||mixed(1_A)||^2 and ||mixed(1_A delta_phi)||^2 in the
// group algebra (twice mixed for order 2). Monte Carlo draws uniform
// parameter tuples in fixed seeded blocks.
ArrangementStats respect_stats(const PartialMap& phi, int order,
                               RespectMode mode, int64_t samples = 0,
                               uint64_t seed = 0);
// Order-1 counts by tallying phi(P) over all parallelograms of each width and
// height, with no transforms. |G| <= 9.
ArrangementStats respect_enumerate(const PartialMap& phi);

using Signs8 = std::array<int, 8>;
using Signs32 = std::array<int, 32>;

Signs8 morse8();
Signs32 morse32();
// sum_i eps_i a_i (x) b_i = 0 on every first-order 4-arrangement, decided on
// the coefficient matrix of the parameter-to-tensor map modulo p.
bool first_order_admissible(const Signs8& eps, int p);
// All of {-1, 0, 1}^8 filtered by first_order_admissible, in lexicographic
// order of the patterns read as base-3 digits.
std::vector<Signs8> morse_sign_scan(int p);
bool is_morse_multiple(const Signs32& eps);

// Fraction of second-order 4-arrangements with sum_i eps_i a_i (x) b_i = 0.
// Throws for eps a multiple of the Morse sequence.
MonteCarlo rare_zero_fraction(const GroupParams& g, const Signs32& eps,
                              int64_t samples, uint64_t seed);

struct DensifyOptions {
  double eta = 0.05;
  int k = -1;          // fixed number of Riesz factors; -1 searches 0..k_max
  int k_max = 8;
  int retries = 32;
  uint64_t seed = 0;
  RespectMode mode = RespectMode::kExact;
  int64_t samples = 20000;  // Monte Carlo mode only
};

struct DensifyResult {
  PartialMap selected;
  ArrangementStats input;
  ArrangementStats stats;   // second order, on the selected set
  int k = 0;
  int tries = 0;
  double score = 0;         // respected - unrespected / eta, as densities
  bool satisfied = false;   // score >= 0 with some arrangement inside
  double formula_k = 0;     // 2^32 (log 1/eta + log 1/delta)
};

// Dependent random selection: each point of A is kept independently with
// probability prod_i (1 + cos(2 pi / p (s_i . phi(x, y) + x . M_i y))) / 2
// for random s_i and matrices M_i. Of the retries at a given k, the
// selection maximizing X - Y / eta is kept.
DensifyResult densify(const PartialMap& phi, const DensifyOptions& opt);

// For each column y, a greedily grown subset of {x : (x, y) in A}, visited
// in index order, on which x -> phi(x, y) is a Freiman homomorphism.
PartialMap freiman_rows(const PartialMap& phi);
// Same, visiting each column in decreasing priority (flat-indexed), ties in
// index order.
PartialMap freiman_rows(const PartialMap& phi, const std::vector<double>& priority);
bool rows_are_freiman(const PartialMap& phi);

}  // namespace ulab

#endif  // ULAB_ARRANGE_HPP_
