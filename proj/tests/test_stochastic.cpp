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

#include <omp.h>

#include <cmath>
#include <numeric>

#include "kramers/limit.hpp"
#include "kramers/pde.hpp"
#include "kramers/stochastic.hpp"

using namespace kramers;

namespace {

const LandmarkReport& report() {
  static const LandmarkReport r = validate(reference_potential());
  return r;
}

EpsilonContext context(double eps) { return build_context(reference_potential(), report(), eps); }

double stable_dt(const EpsilonContext& c) { return 0.0999 / sde_stability_number(c, 1.0); }

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vector") {
  Philox g(0, 0);
  auto b = g.next_block();
  CHECK(b[0] == 0x6627e8d5u);
  CHECK(b[1] == 0xe169c58du);
  CHECK(b[2] == 0xbc57ac4cu);
  CHECK(b[3] == 0x9b00dbd8u);
}

TEST_CASE("Philox streams are independent and uniforms lie in (0, 1)") {
  Philox a(42, 0), b(42, 1);
  CHECK(a.next_block() != b.next_block());
  Philox u(7, 3);
  double s = 0;
  for (int i = 0; i < 100000; ++i) {
    double x = u.uniform();
    REQUIRE((x > 0 && x < 1));
    s += x;
  }
  CHECK(s / 100000 == doctest::Approx(0.5).epsilon(0.01));
  Philox n(7, 4);
  double m = 0, q = 0;
  for (int i = 0; i < 100000; ++i) {
    double x = n.normal();
    m += x;
    q += x * x;
  }
  CHECK(std::abs(m / 100000) < 0.02);
  CHECK(q / 100000 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("ensembles are deterministic and thread-count independent") {
  auto c = context(0.5);
  const double dt = stable_dt(c);
  omp_set_num_threads(3);
  auto par = simulate_sde(c, c.landmarks.x_a, dt, 0.3, 300, 99);
  omp_set_num_threads(1);
  auto ser = simulate_sde_serial(c, c.landmarks.x_a, dt, 0.3, 300, 99);
  auto again = simulate_sde(c, c.landmarks.x_a, dt, 0.3, 300, 99);
  CHECK(par.density == ser.density);
  CHECK(par.flux == ser.flux);
  CHECK(par.left_fraction == ser.left_fraction);
  CHECK(again.density == ser.density);
  auto other = simulate_sde(c, c.landmarks.x_a, dt, 0.3, 300, 100);
  CHECK(other.density != ser.density);
}

TEST_CASE("binned densities sum to one and the empirical pair is conservative") {
  auto c = context(0.5);
  auto r = simulate_sde(c, c.landmarks.x_a, stable_dt(c), 0.5, 500, 5);
  const double window = r.t[1] - r.t[0];
  for (size_t s = 0; s < r.t.size(); ++s) {
    CHECK(std::accumulate(r.density[s].begin(), r.density[s].end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    if (s == 0) continue;
    for (int k = 0; k < r.bins.cells(); ++k) {
      double change = r.density[s][k] - r.density[s - 1][k];
      REQUIRE(std::abs(change + window * (r.flux[s][k + 1] - r.flux[s][k])) <= 1e-12);
    }
  }
}

TEST_CASE("too large a step is refused") {
  auto c = context(0.5);
  CHECK_THROWS_AS(simulate_sde(c, c.landmarks.x_a, 10 * stable_dt(c), 0.1, 10, 1), StabilityError);
}

TEST_CASE("free particles spread with variance 2 eps tau T") {
  auto c = context(0.5);
  c.spec.dv = [](double) { return 0.0; };
  c.spec.ddv = [](double) { return 0.0; };
  SdeOptions opt;
  opt.bins = Grid1D::uniform(-20, 20, 4000);
  opt.snapshots = 5;
  const int n = 10000;
  const double horizon = 0.5;
  auto r = simulate_sde(c, 0.0, 1e-3, horizon, n, 17, opt);
  const auto& d = r.density.back();
  double m = 0, q = 0;
  for (int k = 0; k < opt.bins.cells(); ++k) {
    m += d[k] * opt.bins.center(k);
    q += d[k] * opt.bins.center(k) * opt.bins.center(k);
  }
  double var = q - m * m;
  double expected = 2 * c.eps * c.tau() * horizon;
  CHECK(std::abs(var - expected) <= 3 * expected * std::sqrt(2.0 / n));
}

TEST_CASE("ensemble at eps = 0.25 concentrates in the two wells") {
  auto c = context(0.25);
  const auto& lm = c.landmarks;
  const int n = 10000;
  auto r = simulate_sde(c, lm.x_a, stable_dt(c), 3.0, n, 2026);
  const auto& d = r.density.back();
  double outside = 0, middle = 0;
  for (int k = 0; k < r.bins.cells(); ++k) {
    double x = r.bins.center(k);
    if (!lm.B_a.contains(x) && !lm.B_b.contains(x)) outside += d[k];
    if (x > lm.x_a + 0.5 && x < lm.x_b - 0.5) middle += d[k];
  }
  CHECK(outside < 0.02);
  // Fokker-Planck mass on (x_a + 1/2, x_b - 1/2) at t = 3, 2048 cells
  const double fp = 0.0268643;
  CHECK(std::abs(middle - fp) <= 3 * std::sqrt(fp * (1 - fp) / n));
}

TEST_CASE("left-basin fraction agrees with the Fokker-Planck solution at the same eps") {
  auto c = context(0.5);
  const auto& lm = c.landmarks;
  const int n = 4000;
  SdeOptions opt;
  opt.snapshots = 20;
  auto r = simulate_sde(c, lm.x_a, stable_dt(c), 1.0, n, 31, opt);
  SolverConfig cfg;
  cfg.grid = fp_grid(c, 2048);
  cfg.dt = 2.5e-4;
  std::vector<double> rho0(cfg.grid.cells());
  double s = 0;
  for (int i = 0; i < cfg.grid.cells(); ++i) {
    double u = (cfg.grid.center(i) - lm.x_a) / 0.01;
    rho0[i] = std::exp(-0.5 * u * u);
    s += rho0[i] * cfg.grid.width(i);
  }
  for (double& v : rho0) v /= s;
  auto p = solve_fp_x(c, rho0, cfg, 1.0);
  for (int snap : {5, 10, 20}) {
    int k = static_cast<int>(std::lround(r.t[snap] / cfg.dt));
    double z = mass_left_of(p, k, lm.x_0);
    CAPTURE(snap);
    CHECK(std::abs(r.left_fraction[snap] - z) <= 3 * std::sqrt(z * (1 - z) / n));
  }
}

TEST_CASE("MFPT quadrature matches the high-precision oracle") {
  const auto& r = report();
  // mpmath double integral at eps = 0.25
  CHECK(mfpt_quadrature(reference_potential(), 0.25, r.x_a, r.x_b) ==
        doctest::Approx(43.144474821533120837).epsilon(1e-7));
  CHECK_THROWS_AS(mfpt_quadrature(reference_potential(), 0.25, r.x_b, r.x_a), QuadratureError);
}

TEST_CASE("MFPT over the Kramers time heads to one") {
  const auto& r = report();
  auto s = reference_potential();
  double prev = INFINITY;
  for (double eps : {0.5, 0.3, 0.2, 0.15, 0.125}) {
    double gap = std::abs(mfpt_quadrature(s, eps, r.x_a, r.x_b) / std::exp(kramers_log_tau(r, eps)) - 1);
    CAPTURE(eps);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("doubling the barrier multiplies the MFPT by exp(barrier / eps)") {
  const double eps = 0.15;
  auto s1 = reference_potential(1.0, 1.2), s2 = reference_potential(2.0, 2.4);
  auto r1 = validate(s1), r2 = validate(s2);
  double lr = std::log(mfpt_quadrature(s2, eps, r2.x_a, r2.x_b) / mfpt_quadrature(s1, eps, r1.x_a, r1.x_b));
  double pred = (r2.barrier - r1.barrier) / eps;
  CHECK(std::abs(lr - pred) <= 0.15 * pred);
}

TEST_CASE("MFPT in a single quadratic well grows with the stiffness") {
  double prev = 0;
  for (double k : {0.5, 1.0, 2.0}) {
    PotentialSpec s;
    s.v = [k](double x) { return 0.5 * k * x * x; };
    s.dv = [k](double x) { return k * x; };
    s.ddv = [k](double) { return k; };
    double t = mfpt_quadrature(s, 0.25, 0.0, 1.0);
    CHECK(std::isfinite(t));
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("Monte-Carlo MFPT at eps = 0.2 is within the Kramers window") {
  const auto& r = report();
  auto e = mfpt_monte_carlo(reference_potential(), r, 0.2, 2000, 20261014);
  double ratio = e.mean / std::exp(kramers_log_tau(r, 0.2));
  CHECK(e.censored == 0);
  CHECK(ratio >= 0.7);
  CHECK(ratio <= 1.4);
  for (double t : e.samples) REQUIRE(t > 0);
  double q = mfpt_quadrature(reference_potential(), 0.2, r.x_a, r.x_b);
  CHECK(std::abs(e.mean - q) <= 3 * e.stderr_);
}

TEST_CASE("jump process: LLN bands and single paths") {
  const int n = 100000;
  std::vector<double> times{0.5, 1.0, 2.0};
  auto z = simulate_jump(0.8, n, times, 13);
  for (size_t k = 0; k < times.size(); ++k) {
    double m = 0.8 * std::exp(-times[k]);
    CHECK(std::abs(z[k] - m) <= 3 * std::sqrt(m * (1 - m) / n));
  }
  std::vector<double> fine;
  for (int k = 0; k <= 400; ++k) fine.push_back(0.01 * k);
  int found = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto one = simulate_jump(1.0, 1, fine, seed);
    int jumps = 0;
    for (size_t k = 1; k < one.size(); ++k) {
      REQUIRE(one[k] <= one[k - 1]);
      jumps += one[k] != one[k - 1];
      REQUIRE((one[k] == 0.0 || one[k] == 1.0));
    }
    REQUIRE(jumps <= 1);
    found += jumps;
  }
  CHECK(found >= 15);
  CHECK(simulate_jump(0.8, n, times, 13) == z);
}

TEST_CASE("rate of the empirical jump path shrinks as n grows") {
  std::vector<double> t;
  for (int k = 0; k <= 40; ++k) t.push_back(0.05 * k);
  double prev = INFINITY;
  for (int n : {1000, 10000, 100000}) {
    auto z = simulate_jump(0.8, n, t, 21);
    double r = rate_limit(TwoStatePath::from_z(t, z));
    CAPTURE(n);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-2);
}
