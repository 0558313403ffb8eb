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

#include <algorithm>
#include <cmath>

#include "kramers/functionals.hpp"
#include "kramers/limit.hpp"
#include "kramers/pde.hpp"
#include "kramers/quadrature.hpp"
#include "kramers/sg.hpp"
#include "kramers/transform.hpp"

using namespace kramers;

namespace {

const LandmarkReport& report() {
  static const LandmarkReport r = validate(reference_potential());
  return r;
}

EpsilonContext context(double eps) { return build_context(reference_potential(), report(), eps); }

struct YFixture {
  TransformTable table;
  YGrid yg;
  YFixture() : table(build_transform(context(0.25), 4096)), yg(build_y_grid(table, 512)) {}
};

const YFixture& yfix() {
  static const YFixture f;
  return f;
}

double weighted_mass(const std::vector<double>& w, const std::vector<double>& u) {
  KahanSum s;
  for (size_t i = 0; i < u.size(); ++i) s.add(w[i] * u[i]);
  return s.value();
}

}  // namespace

TEST_CASE("solver configuration is checked") {
  SolverConfig c;
  c.grid = Grid1D::uniform(0, 1, 8);
  CHECK_NOTHROW(c.check());
  c.theta = 0.4;
  CHECK_THROWS_AS(c.check(), ConfigError);
  c.theta = 1.0;
  c.dt = 0;
  CHECK_THROWS_AS(c.check(), ConfigError);
  c.dt = 1e-3;
  c.tol = -1;
  CHECK_THROWS_AS(c.check(), ConfigError);
}

TEST_CASE("discrete equilibrium is stationary") {
  auto c = context(0.25);
  SolverConfig cfg;
  cfg.grid = fp_grid(c, 512);
  cfg.dt = 1e-2;
  auto rho = discrete_gamma_density(c, cfg.grid);
  auto p = solve_fp_x(c, rho, cfg, 0.5);
  for (int k = 0; k <= p.steps(); ++k)
    for (int i = 0; i < cfg.grid.cells(); ++i) REQUIRE(std::abs(p.rho[k][i] - rho[i]) <= 1e-9 * (1 + rho[i]));
}

TEST_CASE("mass is conserved, entropy decays, densities stay nonnegative") {
  auto c = context(0.25);
  SolverConfig cfg;
  cfg.grid = fp_grid(c, 512);
  cfg.dt = 2e-3;
  for (double theta : {1.0, 0.5}) {
    cfg.theta = theta;
    CAPTURE(theta);
    auto p = solve_fp_x(c, tilted_equilibrium(c, cfg.grid), cfg, 0.5);
    double prev = energy(c, cfg.grid, p.rho[0]);
    for (int k = 1; k <= p.steps(); ++k) {
      REQUIRE(std::abs(p.mass(k) - p.mass(k - 1)) <= 1e-10);
      double e = energy(c, cfg.grid, p.rho[k]);
      REQUIRE(e <= prev + 1e-10);
      prev = e;
      REQUIRE(*std::min_element(p.rho[k].begin(), p.rho[k].end()) >= 0);
    }
    CHECK(p.continuity_defect() < 1e-10);
  }
}

TEST_CASE("left-basin mass follows the two-state relaxation") {
  std::vector<double> err;
  for (double eps : {0.5, 0.35, 0.25}) {
    auto c = context(eps);
    SolverConfig cfg;
    cfg.grid = fp_grid(c, 512);
    cfg.dt = 5e-3;
    auto p = solve_fp_x(c, local_equilibrium_mixture(c, cfg.grid, 0.8), cfg, 3.0);
    double worst = 0;
    for (int k = 0; k <= p.steps(); ++k)
      worst = std::max(worst, std::abs(mass_left_of(p, k, c.landmarks.x_0) - 0.8 * std::exp(-p.t[k])));
    err.push_back(worst);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("rate of solver paths vanishes under refinement") {
  auto c = context(0.5);
  std::vector<double> rates;
  for (auto [cells, dt] : {std::pair{128, 8e-3}, {256, 2e-3}, {512, 5e-4}}) {
    SolverConfig cfg;
    cfg.grid = fp_grid(c, cells);
    cfg.dt = dt;
    rates.push_back(rate_primal(c, solve_fp_x(c, tilted_equilibrium(c, cfg.grid), cfg, 0.25)));
  }
  CHECK(rates[1] < rates[0] / 2.5);
  CHECK(rates[2] < rates[1] / 2.5);
}

TEST_CASE("bad initial data is refused") {
  auto c = context(0.5);
  SolverConfig cfg;
  cfg.grid = fp_grid(c, 64);
  CHECK_THROWS_AS(solve_fp_x(c, std::vector<double>(63, 1.0), cfg, 0.1), GridMismatch);
  CHECK_THROWS_AS(tilted_equilibrium(c, cfg.grid, 1.5), ConfigError);
}

TEST_CASE("y-grid covers the strip with tapered faces") {
  const auto& yg = yfix().yg;
  CHECK(yg.grid.faces[yg.strip_lo] == doctest::Approx(-0.5));
  CHECK(yg.grid.faces[yg.strip_hi] == doctest::Approx(0.5));
  CHECK(yg.taper[yg.strip_lo] == 0.5);
  CHECK(yg.taper[yg.strip_lo + 1] == 1.0);
  CHECK(yg.taper.front() == 0.0);
  for (double m : yg.g_mass) CHECK(m >= 0);
}

TEST_CASE("constants are stationary for the weighted heat equation") {
  const auto& yg = yfix().yg;
  SolverConfig cfg;
  cfg.dt = 1e-2;
  std::vector<double> u0(yg.grid.cells(), 0.7);
  auto p = solve_weighted_heat_y(yg, u0, [](double, double) { return 0.0; }, cfg, 0.2);
  for (const auto& slice : p.rho)
    for (double v : slice) REQUIRE(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("weighted heat equation conserves mass with a drift") {
  const auto& yg = yfix().yg;
  SolverConfig cfg;
  cfg.dt = 1e-3;
  std::vector<double> u0(yg.grid.cells());
  for (int i = 0; i < yg.grid.cells(); ++i) u0[i] = 1.0 + 0.5 * std::tanh(-4 * yg.grid.center(i));
  auto drift = [](double t, double y) { return limit_profile(0.8 * std::exp(-2 * t), 1.6 * std::exp(-2 * t), y).b0; };
  for (auto form : {YFlux::centered, YFlux::fitted}) {
    auto p = solve_weighted_heat_y(yg, u0, drift, cfg, 0.2, form);
    double m0 = weighted_mass(yg.g_mass, p.rho[0]);
    for (int k = 1; k <= p.steps(); ++k) {
      REQUIRE(std::abs(weighted_mass(yg.g_mass, p.rho[k]) - m0) <= 1e-10 * m0);
      REQUIRE(*std::min_element(p.rho[k].begin(), p.rho[k].end()) >= 0);
    }
  }
}

TEST_CASE("a priori energy bound holds at grid level") {
  const auto& yg = yfix().yg;
  SolverConfig cfg;
  cfg.dt = 1e-3;
  auto z = [](double t) { return 0.8 - 0.4 * t; };
  auto drift = [z](double t, double y) { return limit_profile(z(t), 0.4, y).b0; };
  auto prim = [z](double t, double y) { return limit_profile_primitive(z(t), 0.4, y); };
  std::vector<double> u0(yg.grid.cells());
  for (int i = 0; i < yg.grid.cells(); ++i) u0[i] = yg.grid.center(i) < 0 ? 0.8 : 0.2;
  auto p = solve_weighted_heat_y(yg, u0, drift, cfg, 1.0);
  auto eb = weighted_energy_bound(yg, p, prim);
  CHECK(eb.lhs > 0);
  CHECK(eb.lhs <= eb.rhs);
}

TEST_CASE("solving for v = exp(-B) u reproduces the direct solve") {
  // Time-independent drift; B is its primitive, frozen outside the strip.
  const auto& yg = yfix().yg;
  const auto& g = yg.grid;
  const int n = g.cells();
  const double zc = 1.0, jc = 0.5;
  auto B = [&](double y) { return limit_profile_primitive(zc, jc, std::clamp(y, -0.5, 0.5)); };
  // face drift equal to the difference quotient of B so both forms see the same increments
  std::vector<double> bf(n + 1, 0.0);
  for (int f = 1; f < n; ++f) bf[f] = (B(g.center(f)) - B(g.center(f - 1))) / g.center_gap(f);
  auto drift = [&](double, double y) {
    auto it = std::lower_bound(g.faces.begin(), g.faces.end(), y);
    int f = static_cast<int>(it - g.faces.begin());
    return yg.taper[f] == 0.0 ? 0.0 : bf[f] / yg.taper[f];
  };
  SolverConfig cfg;
  cfg.dt = 2e-3;
  const double horizon = 0.2;
  std::vector<double> u0(n);
  for (int i = 0; i < n; ++i) u0[i] = 0.5 + 0.4 * std::tanh(-5 * g.center(i));
  auto direct = solve_weighted_heat_y(yg, u0, drift, cfg, horizon, YFlux::fitted);

  std::vector<double> eb(n), w(n + 1, 0.0), v(n);
  for (int i = 0; i < n; ++i) {
    eb[i] = std::exp(B(g.center(i)));
    v[i] = u0[i] / eb[i];
  }
  for (int f = 1; f < n; ++f) {
    double d = g.center_gap(f), inc = B(g.center(f)) - B(g.center(f - 1));
    w[f] = bernoulli_fn(inc) * eb[f] / d;
  }
  const int steps = direct.steps();
  for (int k = 0; k < steps; ++k) {
    double dt = direct.t[k + 1] - direct.t[k];
    std::vector<double> sub(n, 0.0), diag(n), sup(n, 0.0), rhs(n);
    for (int i = 0; i < n; ++i) {
      double m = yg.g_mass[i] * eb[i] / dt;
      diag[i] = m + w[i] + w[i + 1];
      if (i > 0) sub[i] = -w[i];
      if (i + 1 < n) sup[i] = -w[i + 1];
      rhs[i] = m * v[i];
    }
    solve_tridiagonal(sub, diag, sup, rhs);
    v = rhs;
  }
  double worst = 0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(eb[i] * v[i] - direct.rho.back()[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("transformed equilibrium flow commutes with the push-forward") {
  const auto& fx = yfix();
  const auto& c = fx.table.ctx;
  SolverConfig xcfg;
  xcfg.grid = fp_grid(c, 1024);
  xcfg.dt = 2e-3;
  const double horizon = 0.5;
  auto xp = solve_fp_x(c, tilted_equilibrium(c, xcfg.grid), xcfg, horizon);
  auto pushed = pushforward_pair(fx.table, xp);
  const auto& yg = fx.yg;
  const auto& yf = yg.grid.faces;

  // cell masses of a pushed slice on the y-grid, from its piecewise-linear CDF
  auto rebin = [&](int k) {
    std::vector<double> cdf_faces{pushed.grid.faces.front()}, cdf{0.0};
    auto m = pushed.cell_masses(k);
    for (int i = 0; i < pushed.grid.cells(); ++i) {
      cdf_faces.push_back(pushed.grid.faces[i + 1]);
      cdf.push_back(cdf.back() + m[i]);
    }
    auto at = [&](double y) {
      if (y <= cdf_faces.front()) return 0.0;
      if (y >= cdf_faces.back()) return cdf.back();
      auto it = std::upper_bound(cdf_faces.begin(), cdf_faces.end(), y);
      size_t i = static_cast<size_t>(it - cdf_faces.begin());
      double s = (y - cdf_faces[i - 1]) / (cdf_faces[i] - cdf_faces[i - 1]);
      return cdf[i - 1] + s * (cdf[i] - cdf[i - 1]);
    };
    std::vector<double> out(yg.grid.cells());
    for (int i = 0; i < yg.grid.cells(); ++i) out[i] = at(yf[i + 1]) - at(yf[i]);
    out.front() += at(yf.front());
    out.back() += cdf.back() - at(yf.back());
    return out;
  };
  auto m0 = rebin(0);
  std::vector<double> u0(yg.grid.cells());
  for (int i = 0; i < yg.grid.cells(); ++i) u0[i] = yg.g_mass[i] > 0 ? m0[i] / yg.g_mass[i] : 0.0;
  SolverConfig ycfg;
  ycfg.dt = xcfg.dt;
  auto yp = solve_weighted_heat_y(yg, u0, [](double, double) { return 0.0; }, ycfg, horizon);
  for (int k : {xp.steps() / 2, xp.steps()}) {
    auto mx = rebin(k);
    double tv = 0;
    for (int i = 0; i < yg.grid.cells(); ++i) tv += std::abs(mx[i] - yg.g_mass[i] * yp.rho[k][i]);
    CAPTURE(k);
    CHECK(0.5 * tv <= 0.02);
  }
}
