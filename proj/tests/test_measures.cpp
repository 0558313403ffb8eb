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
#include <numbers>

#include "kramers/measures.hpp"
#include "kramers/quadrature.hpp"

using namespace kramers;

namespace {

struct Oracle {
  double eps, log_z, log_z_left, log_tau;
};

// mpmath at 30 digits on the reference potential, depth 1, tilt 1.2.
constexpr Oracle kOracle[] = {
    {0.5, 2.393463144014586884, -0.131911677777162932, 1.572884306559564594},
    {0.25, 4.357251595138569866, -0.443084896656051163, 3.579187303111454975},
    {0.125, 8.794181403879731596, -0.771697955400700156, 7.591793296215235737},
};

const LandmarkReport& reference_report() {
  static const LandmarkReport r = validate(reference_potential());
  return r;
}

}  // namespace

TEST_CASE("partition functions match the high-precision oracle") {
  auto s = reference_potential();
  for (const auto& o : kOracle) {
    CAPTURE(o.eps);
    auto c = build_context(s, reference_report(), o.eps);
    CHECK(c.log_z == doctest::Approx(o.log_z).epsilon(1e-8));
    CHECK(c.log_z_left == doctest::Approx(o.log_z_left).epsilon(1e-8));
    CHECK(c.log_tau == doctest::Approx(o.log_tau).epsilon(1e-9));
  }
}

TEST_CASE("Gaussian sanity potential integrates exactly") {
  PotentialSpec s;
  s.v = [](double x) { return x * x / 2; };
  s.dv = [](double x) { return x; };
  s.ddv = [](double) { return 1.0; };
  for (double eps : {1.0, 0.1, 0.01}) {
    auto c = build_context_unchecked(s, eps, {-1, 1});
    CHECK(c.log_z == doctest::Approx(0.5 * std::log(2 * std::numbers::pi * eps)).epsilon(1e-10));
  }
}

TEST_CASE("Laplace estimate of a quadratic well") {
  CHECK(laplace_estimate(2.0, 0.0, MinLocation::interior, 10.0) ==
        doctest::Approx(std::sqrt(std::numbers::pi / 10)).epsilon(1e-14));
  CHECK(laplace_estimate(2.0, 0.0, MinLocation::boundary, 10.0) ==
        doctest::Approx(0.5 * std::sqrt(std::numbers::pi / 10)).epsilon(1e-14));
  CHECK(laplace_estimate(2.0, 1.0, MinLocation::interior, 10.0) ==
        doctest::Approx(std::exp(-10.0) * std::sqrt(std::numbers::pi / 10)).epsilon(1e-14));
}

TEST_CASE("Laplace errors shrink as eps decreases") {
  auto s = reference_potential();
  double prev_full = INFINITY, prev_left = INFINITY;
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    auto c = build_context(s, reference_report(), eps);
    double ef = std::abs(laplace_error_full(c)), el = std::abs(laplace_error_left(c));
    CHECK(ef < prev_full);
    CHECK(el < prev_left);
    prev_full = ef;
    prev_left = el;
  }
}

TEST_CASE("normalised measures have unit mass") {
  auto s = reference_potential();
  const auto& r = reference_report();
  auto c = build_context(s, r, 0.25);
  CHECK(mass_on(c, {c.x_lo, c.x_hi}, Norm::full) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mass_on(c, {c.x_lo, r.x_0}, Norm::left) == doctest::Approx(1.0).epsilon(1e-9));
  double left = mass_on(c, {c.x_lo, r.x_0}, Norm::full);
  CHECK(left == doctest::Approx(std::exp(c.log_z_left - c.log_z)).epsilon(1e-9));
  CHECK(mass_on(c, {40.0, 41.0}, Norm::full) == 0.0);
  CHECK(gamma_log_density(c, r.x_a, Norm::left) == doctest::Approx(-c.log_z_left).epsilon(1e-12));
}

TEST_CASE("the escape time grows like exp(barrier/eps)") {
  const auto& r = reference_report();
  double d = kramers_log_tau(r, 0.1) - kramers_log_tau(r, 0.2);
  CHECK(d == doctest::Approx(r.barrier * (1 / 0.1 - 1 / 0.2)).epsilon(1e-12));
}

TEST_CASE("the certified floor refuses underflowing eps") {
  const auto& r = reference_report();
  double floor = certified_eps_floor(r);
  CHECK(floor == doctest::Approx(r.barrier / 745.0));
  CHECK_THROWS_AS(build_context(reference_potential(), r, floor * 0.99), Error);
  CHECK_THROWS_AS(build_context(reference_potential(), r, -1.0), Error);
}

TEST_CASE("log-sum-exp is stable at large exponents") {
  LogSum s;
  s.add(1000.0);
  s.add(1000.0);
  CHECK(s.value() == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
  CHECK(log_add(-1e308, 0.0) == doctest::Approx(0.0));
  double li = log_integrate([](double x) { return -x; }, {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0});
  CHECK(li == doctest::Approx(std::log1p(-std::exp(-40.0))).epsilon(1e-10));
}
