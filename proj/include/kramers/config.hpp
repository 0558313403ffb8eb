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

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "kramers/interval.hpp"
#include "kramers/potential.hpp"

namespace kramers {

constexpr int kConfigSchemaVersion = 1;

struct PotentialConfig {
  std::string name = "reference";  // reference | quartic | polynomial
  double depth = 1.0;
  double tilt = 1.2;
  std::vector<double> coefficients;  // polynomial only, ascending powers
  Interval domain{-2.5, 2.5};        // polynomial only
};

struct GridConfig {
  int fp_cells = 1024;
  int y_strip_cells = 1024;
  int transform_nodes = 4096;
  double dt = 1e-3;
};

struct ZProfileConfig {
  std::string kind = "corpus";  // corpus | inline | file
  std::vector<double> t, z;     // inline
  std::string path;             // file, CSV with columns t,z
};

struct StochasticConfig {
  double mfpt_eps = 0.25;
  int mfpt_samples = 2000;
  int sde_particles = 500;
  double sde_horizon = 1.5;
  int jump_particles = 100000;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  PotentialConfig potential;
  std::vector<double> eps_ladder{0.5, 0.35, 0.25, 0.18, 0.125};
  GridConfig grids;
  double horizon = 3.0;
  ZProfileConfig z_profile;
  std::vector<std::uint64_t> seeds{20261014};
  std::string output_dir = "results";
  StochasticConfig stochastic;
  int inequality_instances = 100;
};

// Parses and validates; ConfigError messages name the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

// Field checks that need no potential, then the floor check against the
// validated potential. Both throw ConfigError.
void check_config(const ExperimentConfig& c);
void check_ladder_floor(const ExperimentConfig& c, const LandmarkReport& report);

PotentialSpec make_potential(const PotentialConfig& p);

// FNV-1a over the canonical JSON dump without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace kramers
