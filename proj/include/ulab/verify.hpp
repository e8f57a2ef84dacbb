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

// Seeded property checks for every module, run as one suite.

#ifndef ULAB_VERIFY_HPP_
#define ULAB_VERIFY_HPP_

#include <functional>
#include <string>
#include <vector>

#include "ulab/io.hpp"

namespace ulab {

struct VerifyOptions {
  uint64_t seed = 1;
  std::string only;           // module name; empty runs all
  bool corrupt_dft = false;   // fixture: core checks use a perturbed transform
};

struct CheckResult {
  std::string module, name;
  bool passed = false;
  int64_t trials = 0;
  int64_t violations = 0;
  Json measured = Json::object();
  double seconds = 0;

  Json to_json(bool with_timing = true) const;
};

struct Check {
  std::string module, name;
  std::function<CheckResult(const VerifyOptions&)> run;
};

// Every registered check, grouped by module in pipeline order.
const std::vector<Check>& verify_checks();
const std::vector<std::string>& verify_modules();
// Throws Error for an unknown name ("module.check").
CheckResult run_check(const std::string& name, const VerifyOptions& opt);

struct VerifyReport {
  static constexpr const char* kSchema = "ulab.verify/1";
  VerifyOptions options;
  std::vector<CheckResult> checks;

  bool passed() const;
  int exit_code() const { return passed() ? 0 : 3; }
  Json to_json(bool with_timing = true) const;
};

// Throws Error when opt.only names no module.
VerifyReport verify_suite(const VerifyOptions& opt);

}  // namespace ulab

#endif  // ULAB_VERIFY_HPP_
