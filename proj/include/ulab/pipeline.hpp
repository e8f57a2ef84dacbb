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

// The inverse pipeline: from a function with large U^4 norm to a cubic phase
// it correlates with, one measured stage at a time.

#ifndef ULAB_PIPELINE_HPP_
#define ULAB_PIPELINE_HPP_

#include <string>
#include <vector>

#include "ulab/io.hpp"

namespace ulab {

struct PipelineConfig {
  int p = 5;
  int n = 1;
  uint64_t seed = 1;
  double eta = 0.05;               // densification target; reported next to 1/1728000
  double zeta = 0.3;               // Bogolyubov L2 error
  int t = 0;                       // Bohr rank target; 0 means max(3k + 2, 7)
  double u4_threshold = 0.85;
  double spectral_gamma = 0.4;     // |d_{a,b} f^(r)| needed for (a, b) in A
  double min_density = 0.05;       // floor on the density of A after densify
  double cell_gamma = 0.5;         // xi <= E xi / cell_gamma on the chosen cell
  double min_cell_density = 0.02;  // floor on the chosen cell
  int densify_k_max = 8;
  int densify_retries = 8;
  int64_t densify_samples = 0;     // 0 selects exact arrangement counts
  int64_t fit_budget = 50'000'000;     // candidate-point pairs in the fits
  int64_t quad_budget = 400'000'000;
  int64_t point_budget = 100'000'000;  // |G|^4
  std::string input, output;

  // Throws Error on unknown keys, non-prime p or non-positive parameters.
  static PipelineConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;
};

enum class PipelineStatus { kOk = 0, kGate = 2, kVerification = 3 };

struct StageRecord {
  std::string name;
  std::string status = "ok";  // ok, halted, failed
  Json metrics = Json::object();
  double seconds = 0;
};

struct PipelineReport {
  static constexpr const char* kSchema = "ulab.pipeline/1";
  PipelineConfig config;
  std::vector<StageRecord> stages;
  PipelineStatus status = PipelineStatus::kOk;
  std::string halted_at;
  std::string message;
  PolyPhase cubic;                // kappa + q
  double correlation = 0;         // |E f w^{-(kappa + q)}|

  int exit_code() const { return int(status); }
  // Wall-clock fields go into a separate "timing" object, omitted when
  // with_timing is false.
  Json to_json(bool with_timing = true) const;
};

// f must be bounded with p, n matching cfg. Every stage records its
// measurements; a floor or gate halts the run with status kGate and a
// failed lemma check with status kVerification.
PipelineReport run_inverse_pipeline(const GroupFn& f, const PipelineConfig& cfg);

}  // namespace ulab

#endif  // ULAB_PIPELINE_HPP_
