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

// Command-line front end: the inverse pipeline, the verification suite and a
// few helpers for producing inputs.
//
// Exit codes: 0 ok, 1 usage or I/O error, 2 precondition gate, 3 failed
// verification.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ulab/gowers.hpp"
#include "ulab/io.hpp"
#include "ulab/pipeline.hpp"
#include "ulab/testing.hpp"
#include "ulab/verify.hpp"

namespace {

using ulab::Json;

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << "\n";
  else
    ulab::write_json_file(out, j);
}

struct PipelineArgs {
  std::string input, config, out;
  std::optional<uint64_t> seed;
  bool no_timing = false;
};

int run_pipeline(const PipelineArgs& a) {
  ulab::PipelineConfig cfg;
  const Json cj = a.config.empty() ? Json::object() : ulab::read_json_file(a.config);
  cfg = ulab::PipelineConfig::from_json(cj);
  const ulab::GroupFn f = ulab::group_fn_from_json(ulab::read_json_file(a.input));
  // The group comes from the input unless the config names one.
  if (!cj.contains("p")) {
    cfg.p = f.g.p;
    cfg.n = f.g.n;
  }
  if (a.seed) cfg.seed = *a.seed;
  cfg.input = a.input;
  cfg.output = a.out;
  cfg.validate();
  const ulab::PipelineReport rep = ulab::run_inverse_pipeline(f, cfg);
  emit(rep.to_json(!a.no_timing), a.out);
  if (rep.status != ulab::PipelineStatus::kOk)
    std::cerr << "halted at " << rep.halted_at << ": " << rep.message << "\n";
  return rep.exit_code();
}

struct VerifyArgs {
  std::string only, fault, out;
  uint64_t seed = 1;
  bool no_timing = false;
};

int run_verify(const VerifyArgs& a) {
  ulab::VerifyOptions opt;
  opt.seed = a.seed;
  opt.only = a.only;
  opt.corrupt_dft = a.fault == "corrupt-dft";
  const ulab::VerifyReport rep = ulab::verify_suite(opt);
  emit(rep.to_json(!a.no_timing), a.out);
  for (const auto& c : rep.checks)
    if (!c.passed) std::cerr << "FAIL " << c.module << "." << c.name << "\n";
  return rep.exit_code();
}

struct SampleArgs {
  int p = 5, n = 1;
  uint64_t seed = 1;
  double corrupt = 0;
  bool random = false;
  std::string out;
};

int run_sample(const SampleArgs& a) {
  const ulab::GroupParams g(a.p, a.n);
  ulab::Rng rng(a.seed);
  ulab::GroupFn f = a.random ? ulab::testing::random_unimodular(g, rng)
                             : ulab::poly_phase_fn(ulab::testing::sample_cubic(a.p, a.n), g);
  if (a.corrupt > 0) f = ulab::testing::corrupt(f, a.corrupt, rng);
  emit(ulab::to_json(f), a.out);
  return 0;
}

int run_norms(const std::string& input) {
  const ulab::GroupFn f = ulab::group_fn_from_json(ulab::read_json_file(input));
  Json j{{"group", f.g.to_string()}};
  for (int k = 1; k <= 4; ++k) j["U" + std::to_string(k)] = ulab::uk_norm(f, k).value;
  emit(j, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ulab: inverse theorem pipeline and verification suite"};
  app.require_subcommand(1);

  PipelineArgs pa;
  auto* pipe = app.add_subcommand("pipeline", "run the inverse pipeline on a function");
  pipe->add_option("--input", pa.input, "function JSON")->required()->check(CLI::ExistingFile);
  pipe->add_option("--config", pa.config, "PipelineConfig JSON")->check(CLI::ExistingFile);
  pipe->add_option("--out", pa.out, "report path (stdout if omitted)");
  pipe->add_option("--seed", pa.seed, "overrides the config seed");
  pipe->add_flag("--no-timing", pa.no_timing, "omit wall-clock fields");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run the property checks");
  ver->add_option("--only", va.only, "restrict to one module")
      ->check(CLI::IsMember(ulab::verify_modules()));
  ver->add_option("--seed", va.seed, "suite seed");
  ver->add_option("--inject-fault", va.fault, "test fixture")
      ->check(CLI::IsMember({"corrupt-dft"}));
  ver->add_option("--out", va.out, "report path (stdout if omitted)");
  ver->add_flag("--no-timing", va.no_timing, "omit wall-clock fields");

  SampleArgs sa;
  auto* smp = app.add_subcommand("sample", "write a cubic phase or random input");
  smp->add_option("--p", sa.p, "prime");
  smp->add_option("--n", sa.n, "dimension")->check(CLI::Range(1, 6));
  smp->add_option("--seed", sa.seed, "seed");
  smp->add_option("--corrupt", sa.corrupt, "fraction of points replaced")
      ->check(CLI::Range(0.0, 1.0));
  smp->add_flag("--random", sa.random, "uniform random unimodular values");
  smp->add_option("--out", sa.out, "output path (stdout if omitted)");

  std::string norms_input;
  auto* nrm = app.add_subcommand("norms", "print U^1..U^4 of a function");
  nrm->add_option("--input", norms_input, "function JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*pipe) return run_pipeline(pa);
    if (*ver) return run_verify(va);
    if (*smp) return run_sample(sa);
    if (*nrm) return run_norms(norms_input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
