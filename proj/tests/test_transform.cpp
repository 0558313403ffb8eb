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
#include <numeric>

#include "kramers/pde.hpp"
#include "kramers/transform.hpp"

using namespace kramers;

namespace {

const TransformTable& table_at(double eps) {
  static std::map<double, TransformTable> cache;
  auto it = cache.find(eps);
  if (it == cache.end()) {
    auto s = reference_potential();
    auto ctx = build_context(s, validate(s), eps);
    it = cache.emplace(eps, build_transform(ctx, 2048)).first;
  }
  return it->second;
}

DensityFluxPath sample_path(const TransformTable& t) {
  const auto& r = t.ctx.landmarks;
  DensityFluxPath p;
  p.t = {0.0, 0.5, 1.0};
  p.grid = Grid1D::uniform(r.x_a - 0.3, r.x_b + 0.3, 48);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> rho(p.grid.cells()), j(p.grid.cells() + 1, 0.0);
    for (int i = 0; i < p.grid.cells(); ++i) rho[i] = 1.0 + 0.5 * std::sin(i + k);
    for (int f = 1; f < p.grid.cells(); ++f) j[f] = 0.1 * std::cos(f * 0.3 + k);
    p.rho.push_back(rho);
    p.flux.push_back(j);
  }
  return p;
}

}  // namespace

TEST_CASE("mollifier profile") {
  CHECK(mollifier_profile(0.0) == 1.0);
  CHECK(mollifier_profile(1.0) == 0.0);
  CHECK(mollifier_profile(-1.5) == 0.0);
  CHECK(mollifier_profile(0.5) == doctest::Approx(std::exp(1.0 - 4.0 / 3.0)).epsilon(1e-15));
  CHECK(mollifier_profile(0.3) == mollifier_profile(-0.3));
}

TEST_CASE("bumps sit inside the basins") {
  auto r = validate(reference_potential());
  auto b = bump_pair(r);
  CHECK(r.B_a.contains(b.support_a));
  CHECK(r.B_b.contains(b.support_b));
  CHECK(b.chi_a(r.x_a) == doctest::Approx(1.0));
  CHECK(b.chi_b(r.x_b) == doctest::Approx(1.0));
  CHECK(b.chi_a(r.x_0) == 0.0);
}

TEST_CASE("y is increasing and vanishes at the saddle") {
  const auto& t = table_at(0.25);
  const auto& r = t.ctx.landmarks;
  for (size_t k = 1; k < t.y_values.size(); ++k) REQUIRE(t.y_values[k] > t.y_values[k - 1]);
  CHECK(std::abs(t.y_at(r.x_0)) < 1e-14);
  CHECK(invert_y(t, 0.0) == doctest::Approx(r.x_0).epsilon(1e-10));
  CHECK(t.dy_dx(r.x_0) > t.dy_dx(r.x_a));
}

TEST_CASE("the wells map towards the ends of the strip") {
  auto ends = [](double eps) {
    const auto& t = table_at(eps);
    const auto& r = t.ctx.landmarks;
    return std::pair{std::abs(t.y_at(r.x_a) + 0.5), std::abs(t.y_at(r.x_b) - 0.5)};
  };
  auto [a1, b1] = ends(0.25);
  auto [a2, b2] = ends(0.125);
  CHECK(a2 < 0.6 * a1);
  CHECK(b2 < 0.6 * b1);
  CHECK(a2 < 0.1);
  CHECK(b2 < 0.1);
}

TEST_CASE("invert_y is the inverse of y") {
  const auto& t = table_at(0.25);
  const auto& r = t.ctx.landmarks;
  for (double x = r.x_a - 0.2; x <= r.x_b + 0.2; x += 0.07) {
    CAPTURE(x);
    CHECK(invert_y(t, t.y_at(x)) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK_THROWS_AS(invert_y(t, 2 * t.y_values.back()), RangeError);
}

TEST_CASE("the bump measure has zero total mass") {
  const auto& t = table_at(0.25);
  const auto& r = t.ctx.landmarks;
  CHECK(t.m_values.front() == 0.0);
  CHECK(t.m_values.back() == 0.0);
  CHECK(t.m_at(r.x_0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.m_at(t.bumps.support_b.hi) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("phi approaches the clamped identity as eps decreases") {
  double d1 = phi_identity_defect(table_at(0.5));
  double d2 = phi_identity_defect(table_at(0.25));
  double d3 = phi_identity_defect(table_at(0.125));
  CHECK(d2 < d1);
  CHECK(d3 < d2);
  const auto& t = table_at(0.25);
  CHECK(t.phi_at(t.ctx.landmarks.x_0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gamma-left masses of y-cells add up to Z / Z^l") {
  const auto& t = table_at(0.25);
  std::vector<double> faces;
  for (int i = 0; i <= 40; ++i) faces.push_back(-1.0 + 2.0 * i / 40);
  auto g = gamma_left_cell_masses(t, faces);
  double sum = std::accumulate(g.begin(), g.end(), 0.0);
  CHECK(sum == doctest::Approx(std::exp(t.ctx.log_z - t.ctx.log_z_left)).epsilon(1e-8));
  for (double m : g) CHECK(m >= 0);
}

TEST_CASE("push-forward keeps cell masses and fluxes; pull-back undoes it") {
  const auto& t = table_at(0.25);
  auto p = sample_path(t);
  auto q = pushforward_pair(t, p);
  for (int k = 0; k <= p.steps(); ++k) {
    auto a = p.cell_masses(k), b = q.cell_masses(k);
    for (size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
    CHECK(q.flux[k] == p.flux[k]);
  }
  CHECK(q.continuity_defect() == doctest::Approx(p.continuity_defect()).epsilon(1e-10));
  auto back = pullback_pair(t, q);
  for (size_t f = 0; f < p.grid.faces.size(); ++f)
    CHECK(back.grid.faces[f] == doctest::Approx(p.grid.faces[f]).epsilon(1e-9));
  for (int i = 0; i < p.grid.cells(); ++i) CHECK(back.rho[1][i] == doctest::Approx(p.rho[1][i]).epsilon(1e-7));
}

TEST_CASE("push-forward refuses grids outside the table") {
  const auto& t = table_at(0.25);
  auto p = sample_path(t);
  p.grid = Grid1D::uniform(t.x_range().lo - 1.0, t.x_range().hi, 48);
  CHECK_THROWS_AS(pushforward_pair(t, p), GridMismatch);
}

TEST_CASE("transform nodes must cover the bump supports") {
  auto s = reference_potential();
  auto ctx = build_context(s, validate(s), 0.25);
  std::vector<double> nodes;
  for (int i = 0; i < 40; ++i) nodes.push_back(-0.5 + 0.01 * i);
  CHECK_THROWS_AS(build_transform(ctx, nodes), GridMismatch);
}
