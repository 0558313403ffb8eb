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

#include <doctest.h>

#include <cmath>
#include <map>

#include "kramers/functionals.hpp"
#include "kramers/recovery.hpp"
#include "kramers/transform.hpp"

using namespace kramers;

namespace {

constexpr double kLadder[] = {0.5, 0.25, 0.125};

struct Level {
  TransformTable table;
  YGrid yg;
};

const Level& level(double eps) {
  static std::map<double, Level> cache;
  auto it = cache.find(eps);
  if (it == cache.end()) {
    auto s = reference_potential();
    auto t = build_transform(build_context(s, validate(s), eps), 4096);
    auto yg = build_y_grid(t, 512);
    it = cache.emplace(eps, Level{std::move(t), std::move(yg)}).first;
  }
  return it->second;
}

TwoStatePath relaxation() {
  return TwoStatePath::sample([](double t) { return 0.8 * std::exp(-t); }, 1.0, 2e-3);
}

TwoStatePath linear_decay() {
  return TwoStatePath::sample([](double t) { return 0.8 - 0.4 * t; }, 1.0, 2e-3);
}

const RecoveryBundle& bundle(const char* which, double eps) {
  static std::map<std::pair<std::string, double>, RecoveryBundle> cache;
  auto key = std::make_pair(std::string(which), eps);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const auto& l = level(eps);
    auto z = std::string(which) == "relaxation" ? relaxation() : linear_decay();
    it = cache.emplace(key, recovery_pair(l.table.ctx, l.table, l.yg, z, SolverConfig{})).first;
  }
  return it->second;
}

}  // namespace

TEST_CASE("initial data: unit mass, bounded values, a_eps and energy") {
  const auto& r = level(0.5).table.ctx.landmarks;
  double prev_a = INFINITY, prev_left = INFINITY;
  for (double eps : kLadder) {
    CAPTURE(eps);
    const auto& l = level(eps);
    auto d = build_initial_data(l.table.ctx, l.yg, 0.8);
    CHECK(std::abs(d.mass - 1) <= 1e-12);
    for (double u : d.u) REQUIRE((u > 0 && u <= 1));
    CHECK(std::abs(d.a_eps) < prev_a);
    prev_a = std::abs(d.a_eps);
    CHECK(d.initial_energy <= std::abs(r.v_b) + 1);
    CHECK(std::abs(d.left_mass - 0.8) < prev_left);
    prev_left = std::abs(d.left_mass - 0.8);
  }
  CHECK(prev_left < 0.05);
}

TEST_CASE("initial data rejects z0 outside (0, 1)") {
  const auto& l = level(0.5);
  CHECK_THROWS_AS(build_initial_data(l.table.ctx, l.yg, 1.0), RangeError);
  CHECK_THROWS_AS(build_initial_data(l.table.ctx, l.yg, 0.0), RangeError);
}

TEST_CASE("recovery requires a regularised path") {
  const auto& l = level(0.5);
  auto flat = TwoStatePath::sample([](double) { return 0.8; }, 1.0, 2e-3);
  CHECK_THROWS_AS(recovery_pair(l.table.ctx, l.table, l.yg, flat, SolverConfig{}), StructureError);
}

TEST_CASE("the two rate evaluations coincide") {
  for (const char* which : {"relaxation", "linear"})
    for (double eps : kLadder) {
      const auto& b = bundle(which, eps);
      CAPTURE(which);
      CAPTURE(eps);
      CHECK(rate_transformed(b.u_path) == doctest::Approx(b.rate_value).epsilon(1e-6));
    }
}

TEST_CASE("recovery rate of the relaxation path vanishes along the ladder") {
  double prev = INFINITY;
  for (double eps : kLadder) {
    double r = bundle("relaxation", eps).rate_value;
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("recovery rate of a linear path approaches the limit rate") {
  const double target = rate_limit(linear_decay());
  double prev = INFINITY;
  for (double eps : kLadder) {
    double gap = std::abs(bundle("linear", eps).rate_value - target);
    CAPTURE(eps);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(bundle("linear", 0.125).rate_value <= 1.1 * target);
}

TEST_CASE("boundary traces and strip profile converge along the ladder") {
  for (const char* which : {"relaxation", "linear"}) {
    CAPTURE(which);
    TraceReport prev{INFINITY, INFINITY, INFINITY, INFINITY, INFINITY};
    for (double eps : kLadder) {
      auto tr = verify_boundary_traces(bundle(which, eps));
      CAPTURE(eps);
      CHECK(tr.left_late < prev.left_late);
      CHECK(tr.right_late < prev.right_late);
      CHECK(tr.l2_strip < prev.l2_strip);
      prev = tr;
    }
  }
}

TEST_CASE("back-transformed pair satisfies the continuity equation") {
  const auto& b = bundle("linear", 0.25);
  CHECK(b.x_path.continuity_defect() < 1e-10);
  for (int k = 0; k <= b.x_path.steps(); k += 100) CHECK(b.x_path.mass(k) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b.energy_bound.lhs <= b.energy_bound.rhs);
}
