// Copyright 2026 The Fairwatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// fairwatch: run one experiment described by a key = value config file.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fairwatch/harness.h"

int main(int argc, char** argv) {
  namespace h = fairwatch::harness;
  CLI::App app{"Runtime fairness monitoring and enforcement experiments"};

  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 0;
  if (const char* env = std::getenv("FAIRWATCH_JOBS")) {
    try {
      jobs = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error=config FAIRWATCH_JOBS must be an integer\n";
      return h::kExitConfig;
    }
  }
  app.add_option("--config", config, "experiment config file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* out_opt = app.add_option("--out", out, "output CSV path");
  app.add_option("--jobs", jobs, "worker threads (default FAIRWATCH_JOBS)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error=config " << e.what() << '\n';
    return h::kExitConfig;
  }

  h::CliOptions options;
  options.config = config;
  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.out = out;
  options.jobs = jobs;
  return h::run_cli(options, std::cout, std::cerr);
}
