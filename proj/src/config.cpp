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

#include "kramers/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

#include "kramers/errors.hpp"
#include "kramers/measures.hpp"

namespace kramers {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError(fmt::format("{}{}: unknown field", where.empty() ? "" : where + ".", it.key()));
}

template <class T>
void read(const json& j, const char* key, const std::string& field, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", field, e.what()));
  }
}

bool power_of_two_in_range(int n) { return n >= 256 && n <= 16384 && (n & (n - 1)) == 0; }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j, "", {"schema_version", "potential", "eps_ladder", "grids", "horizon", "z_profile", "seeds",
                         "output_dir", "stochastic", "inequality_instances"});
  ExperimentConfig c;
  read(j, "schema_version", "schema_version", c.schema_version);
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    if (!p.is_object()) throw ConfigError("potential: must be an object");
    reject_unknown(p, "potential", {"name", "depth", "tilt", "coefficients", "domain"});
    read(p, "name", "potential.name", c.potential.name);
    read(p, "depth", "potential.depth", c.potential.depth);
    read(p, "tilt", "potential.tilt", c.potential.tilt);
    read(p, "coefficients", "potential.coefficients", c.potential.coefficients);
    if (p.contains("domain")) {
      std::vector<double> d;
      read(p, "domain", "potential.domain", d);
      if (d.size() != 2) throw ConfigError("potential.domain: expected [lo, hi]");
      c.potential.domain = {d[0], d[1]};
    }
  }
  read(j, "eps_ladder", "eps_ladder", c.eps_ladder);
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    reject_unknown(g, "grids", {"fp_cells", "y_strip_cells", "transform_nodes", "dt"});
    read(g, "fp_cells", "grids.fp_cells", c.grids.fp_cells);
    read(g, "y_strip_cells", "grids.y_strip_cells", c.grids.y_strip_cells);
    read(g, "transform_nodes", "grids.transform_nodes", c.grids.transform_nodes);
    read(g, "dt", "grids.dt", c.grids.dt);
  }
  read(j, "horizon", "horizon", c.horizon);
  if (j.contains("z_profile")) {
    const auto& z = j.at("z_profile");
    reject_unknown(z, "z_profile", {"kind", "t", "z", "path"});
    read(z, "kind", "z_profile.kind", c.z_profile.kind);
    read(z, "t", "z_profile.t", c.z_profile.t);
    read(z, "z", "z_profile.z", c.z_profile.z);
    read(z, "path", "z_profile.path", c.z_profile.path);
  }
  read(j, "seeds", "seeds", c.seeds);
  read(j, "output_dir", "output_dir", c.output_dir);
  if (j.contains("stochastic")) {
    const auto& s = j.at("stochastic");
    reject_unknown(s, "stochastic", {"mfpt_eps", "mfpt_samples", "sde_particles", "sde_horizon", "jump_particles"});
    read(s, "mfpt_eps", "stochastic.mfpt_eps", c.stochastic.mfpt_eps);
    read(s, "mfpt_samples", "stochastic.mfpt_samples", c.stochastic.mfpt_samples);
    read(s, "sde_particles", "stochastic.sde_particles", c.stochastic.sde_particles);
    read(s, "sde_horizon", "stochastic.sde_horizon", c.stochastic.sde_horizon);
    read(s, "jump_particles", "stochastic.jump_particles", c.stochastic.jump_particles);
  }
  read(j, "inequality_instances", "inequality_instances", c.inequality_instances);
  check_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json p = {{"name", c.potential.name}};
  if (c.potential.name == "polynomial") {
    p["coefficients"] = c.potential.coefficients;
    p["domain"] = {c.potential.domain.lo, c.potential.domain.hi};
  } else {
    p["depth"] = c.potential.depth;
    p["tilt"] = c.potential.tilt;
  }
  json z = {{"kind", c.z_profile.kind}};
  if (c.z_profile.kind == "inline") {
    z["t"] = c.z_profile.t;
    z["z"] = c.z_profile.z;
  } else if (c.z_profile.kind == "file") {
    z["path"] = c.z_profile.path;
  }
  return {
      {"schema_version", c.schema_version},
      {"potential", p},
      {"eps_ladder", c.eps_ladder},
      {"grids",
       {{"fp_cells", c.grids.fp_cells},
        {"y_strip_cells", c.grids.y_strip_cells},
        {"transform_nodes", c.grids.transform_nodes},
        {"dt", c.grids.dt}}},
      {"horizon", c.horizon},
      {"z_profile", z},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
      {"stochastic",
       {{"mfpt_eps", c.stochastic.mfpt_eps},
        {"mfpt_samples", c.stochastic.mfpt_samples},
        {"sde_particles", c.stochastic.sde_particles},
        {"sde_horizon", c.stochastic.sde_horizon},
        {"jump_particles", c.stochastic.jump_particles}}},
      {"inequality_instances", c.inequality_instances},
  };
}

void check_config(const ExperimentConfig& c) {
  if (c.schema_version != kConfigSchemaVersion)
    throw ConfigError(fmt::format("schema_version: expected {}, got {}", kConfigSchemaVersion, c.schema_version));
  const auto& p = c.potential;
  if (p.name != "reference" && p.name != "quartic" && p.name != "polynomial")
    throw ConfigError("potential.name: expected reference, quartic or polynomial, got " + p.name);
  if (p.name == "polynomial" && p.coefficients.size() < 3)
    throw ConfigError("potential.coefficients: polynomial needs at least three coefficients");
  if (p.name == "polynomial" && !(p.domain.hi > p.domain.lo)) throw ConfigError("potential.domain: need lo < hi");
  if (c.eps_ladder.empty()) throw ConfigError("eps_ladder: must not be empty");
  for (size_t i = 0; i < c.eps_ladder.size(); ++i) {
    if (!(c.eps_ladder[i] > 0)) throw ConfigError(fmt::format("eps_ladder[{}]: must be positive", i));
    if (i > 0 && !(c.eps_ladder[i] < c.eps_ladder[i - 1]))
      throw ConfigError(fmt::format("eps_ladder[{}]: ladder must decrease strictly", i));
  }
  auto grid = [](const char* name, int n) {
    if (!power_of_two_in_range(n))
      throw ConfigError(fmt::format("grids.{}: {} is not a power of two in [256, 16384]", name, n));
  };
  grid("fp_cells", c.grids.fp_cells);
  grid("y_strip_cells", c.grids.y_strip_cells);
  grid("transform_nodes", c.grids.transform_nodes);
  if (!(c.grids.dt > 0 && c.grids.dt <= 0.1)) throw ConfigError("grids.dt: must lie in (0, 0.1]");
  if (!(c.horizon > 0)) throw ConfigError("horizon: must be positive");
  const auto& z = c.z_profile;
  if (z.kind == "inline") {
    if (z.t.size() < 2 || z.t.size() != z.z.size())
      throw ConfigError("z_profile: inline t and z need equal lengths of at least 2");
  } else if (z.kind == "file") {
    if (z.path.empty()) throw ConfigError("z_profile.path: required for kind=file");
  } else if (z.kind != "corpus") {
    throw ConfigError("z_profile.kind: expected corpus, inline or file, got " + z.kind);
  }
  if (c.seeds.empty()) throw ConfigError("seeds: need at least one seed");
  if (c.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  const auto& s = c.stochastic;
  if (!(s.mfpt_eps > 0)) throw ConfigError("stochastic.mfpt_eps: must be positive");
  if (s.mfpt_samples < 2) throw ConfigError("stochastic.mfpt_samples: need at least 2");
  if (s.sde_particles < 1) throw ConfigError("stochastic.sde_particles: need at least 1");
  if (!(s.sde_horizon > 0)) throw ConfigError("stochastic.sde_horizon: must be positive");
  if (s.jump_particles < 1) throw ConfigError("stochastic.jump_particles: need at least 1");
  if (c.inequality_instances < 1) throw ConfigError("inequality_instances: need at least 1");
}

void check_ladder_floor(const ExperimentConfig& c, const LandmarkReport& report) {
  const double floor = certified_eps_floor(report);
  for (size_t i = 0; i < c.eps_ladder.size(); ++i)
    if (!(c.eps_ladder[i] > floor))
      throw ConfigError(fmt::format("eps_ladder[{}]: {} is not above the double-precision floor barrier/745 = {}", i,
                                    c.eps_ladder[i], floor));
  if (!(c.stochastic.mfpt_eps > floor))
    throw ConfigError(fmt::format("stochastic.mfpt_eps: {} is not above the floor {}", c.stochastic.mfpt_eps, floor));
}

PotentialSpec make_potential(const PotentialConfig& p) {
  if (p.name == "reference") return reference_potential(p.depth, p.tilt);
  if (p.name == "quartic") return quartic_potential(p.depth, p.tilt);
  if (p.name == "polynomial") return polynomial_potential(p.coefficients, p.domain);
  throw ConfigError("potential.name: unknown family " + p.name);
}

std::string config_hash(const ExperimentConfig& c) {
  // output_dir says where results go, not what they are.
  nlohmann::json j = to_json(c);
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace kramers
