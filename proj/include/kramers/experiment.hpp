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

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "kramers/config.hpp"
#include "kramers/io.hpp"
#include "kramers/limit.hpp"
#include "kramers/measures.hpp"
#include "kramers/transform.hpp"

namespace kramers {

const char* code_version();

enum class Suite { measures, fp, recovery, gamma, stochastic, all };
Suite parse_suite(const std::string& name);  // throws ConfigError
const char* suite_name(Suite s);
// Acceptance criteria evaluated by a suite, in ascending order.
std::vector<int> suite_criteria(Suite s);

// A module error raised while running a suite, tagged with where it happened.
class SuiteError : public Error {
 public:
  SuiteError(const std::string& suite, double eps, const std::string& what);
};

struct Verdict {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string threshold;
};

struct PlotRecord {
  std::string experiment;
  double eps = 0;
  std::string quantity;
  double value = 0;
};

struct ExperimentReport {
  std::string suite;
  std::string config_hash;
  std::string code_version;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;
  std::vector<PlotRecord> records;
  std::vector<std::pair<std::string, double>> runtimes;  // seconds; sidecar only

  bool all_passed() const;
  const Table* table(const std::string& name) const;
};

ExperimentReport run(const ExperimentConfig& config, Suite suite);
// Runs only the listed criteria (ids 1..12).
ExperimentReport run_criteria(const ExperimentConfig& config, const std::vector<int>& ids);

// Writes <table>.csv (with config_hash and code_version columns), verdicts.json,
// plotdata.csv and the timestamped sidecar run_meta.json.
void write_report(const ExperimentReport& report, const std::string& dir);
nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);
ExperimentReport load_report(const std::string& path);

// Long CSV with columns experiment, eps, quantity, value.
void emit_plotdata(const ExperimentReport& report, const std::string& path);

// Building blocks shared with the CLI.
PotentialSpec config_potential(const ExperimentConfig& c, LandmarkReport& report);
Table measures_table(const PotentialSpec& spec, const LandmarkReport& report, const std::vector<double>& ladder);
Table transform_dump(const TransformTable& table);
std::vector<NamedProfile> configured_profiles(const ExperimentConfig& c);

}  // namespace kramers
