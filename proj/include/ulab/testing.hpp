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

// Seeded random inputs shared by tests, the verification suite and the
// acceptance binary.

#ifndef ULAB_TESTING_HPP_
#define ULAB_TESTING_HPP_

#include "ulab/galg.hpp"
#include "ulab/gridfn.hpp"

namespace ulab::testing {

// Entries uniform in the unit disc.
GroupFn random_fn(const GroupParams& g, Rng& rng);
// Entries uniform on the unit circle.
GroupFn random_unimodular(const GroupParams& g, Rng& rng);
GroupFn random_sign_fn(const GroupParams& g, Rng& rng);
// Each point kept with probability density.
std::vector<int64_t> random_set(int64_t size, double density, Rng& rng);
// f with round(fraction |G|) points, drawn without replacement, replaced by
// uniform values on the unit circle.
GroupFn corrupt(const GroupFn& f, double fraction, Rng& rng);
// x^3 + 2x^2 + x for n = 1; for n >= 2 the cubic
// x0^3 + 2 x0 x1^2 + 3 x1^3 + x0 x1 + 4 x1, which has no x0^2 x1 term.
PolyPhase sample_cubic(int p, int n);

// Entries uniform in the unit disc.
GridFn random_grid(const GroupParams& g, Rng& rng);
// Weights on `support` random points, normalized to total 1.
Dist random_dist(const GroupParams& g, Rng& rng, int support = 3);
// Each point of G x G carries a random two-point distribution with
// probability density.
DistFn random_distfn(const GroupParams& g, Rng& rng, double density);
// x -> delta_{T x + c}
DistMap affine_distmap(const GroupParams& g, const FpMat& T, int64_t c);

}  // namespace ulab::testing

#endif  // ULAB_TESTING_HPP_
