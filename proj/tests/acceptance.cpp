/* Copyright 2026 The kramers-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */


// Runs the twelve acceptance criteria on the default configuration (or the
// JSON file given as the first argument) and prints one line per criterion.
// Exit status is nonzero iff any criterion fails.

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <exception>

#include "kramers/config.hpp"
#include "kramers/experiment.hpp"

using namespace kramers;

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  try {
    const ExperimentConfig cfg = argc > 1 ? load_config(argv[1]) : ExperimentConfig{};
    std::vector<int> ids;
    for (int id = 1; id <= 12; ++id) ids.push_back(id);
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = run_criteria(cfg, ids);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& v : report.verdicts) {
      double secs = 0;
      for (const auto& [k, s] : report.runtimes)
        if (k == fmt::format("criterion_{}", v.id)) secs = s;
      fmt::print("{} criterion {:>2} ({}): measured {} | threshold {} | {:.1f} s\n", v.pass ? "PASS" : "FAIL", v.id,
                 v.name, v.measured, v.threshold, secs);
    }
    fmt::print("config {} | total {:.1f} s | {}\n", report.config_hash, total,
               report.all_passed() ? "all criteria pass" : "some criteria FAIL");
    std::fflush(stdout);
    return report.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "acceptance aborted: {}\n", e.what());
    return 2;
  }
}
