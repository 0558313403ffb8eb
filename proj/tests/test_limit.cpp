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
#include <random>

#include "kramers/limit.hpp"
#include "kramers/quadrature.hpp"

using namespace kramers;

namespace {

TwoStatePath exp_decay(double rate, double dt, double z0 = 0.8) {
  return TwoStatePath::sample([=](double t) { return z0 * std::exp(-rate * t); }, 1.0, dt);
}

}  // namespace

TEST_CASE("S function branches") {
  CHECK(s_function(1, 1) == 0.0);
  CHECK(s_function(0, 2) == 2.0);
  CHECK(s_function(2, 1) == doctest::Approx(2 * std::log(2.0) - 1).epsilon(1e-15));
  CHECK(s_function(2, 1) == doctest::Approx(0.38629).epsilon(1e-5));
  CHECK(s_function(1, 0) == INFINITY);
  CHECK(s_function(-1, 1) == INFINITY);
}

TEST_CASE("S is jointly convex") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    double a1 = u(rng), b1 = u(rng) + 1e-9, a2 = u(rng), b2 = u(rng) + 1e-9;
    double mid = s_function(0.5 * (a1 + a2), 0.5 * (b1 + b2));
    REQUIRE(mid <= 0.5 * (s_function(a1, b1) + s_function(a2, b2)) + 1e-12);
  }
}

TEST_CASE("rate vanishes on the relaxation path under refinement") {
  double coarse = rate_limit(exp_decay(1.0, 1e-2));
  double fine = rate_limit(exp_decay(1.0, 1e-3));
  CHECK(fine < coarse);
  CHECK(fine < 1e-5);
  CHECK(coarse / fine == doctest::Approx(100.0).epsilon(0.05));
}

TEST_CASE("rate of constant and linear paths") {
  auto flat = TwoStatePath::sample([](double) { return 0.6; }, 2.0, 1e-3);
  CHECK(rate_limit(flat) == doctest::Approx(2 * 0.6 * 2.0).epsilon(1e-12));
  // 2 int_0^1 S(1/2 | 1 - t/2) dt by mpmath quadrature
  auto lin = TwoStatePath::sample([](double t) { return 1 - 0.5 * t; }, 1.0, 1e-3);
  CHECK(rate_limit(lin) == doctest::Approx(0.113705638880109).epsilon(1e-3));
}

TEST_CASE("decay at twice the rate costs a definite amount") {
  // 2 int_0^1 0.8 e^{-2t} (2 log 2 - 1) dt
  double r = rate_limit(exp_decay(2.0, 1e-3));
  CHECK(r > 0.01);
  CHECK(r == doctest::Approx(0.267212083476019).epsilon(5e-3));
}

TEST_CASE("path invariants") {
  auto up = TwoStatePath::sample([](double t) { return 0.2 + 0.1 * t; }, 1.0, 1e-2);
  CHECK_THROWS_AS(rate_limit(up), StructureError);
  auto p = exp_decay(1.0, 1e-2);
  p.z0 = 0.5;
  CHECK_THROWS_AS(p.check_invariants(), StructureError);
  auto q = exp_decay(1.0, 1e-2);
  q.j[3] += 0.1;
  CHECK_THROWS_AS(q.check_invariants(), StructureError);
}

TEST_CASE("dual form: zero family, first-order family, relaxation path") {
  auto p = TwoStatePath::sample([](double t) { return 0.8 - 0.5 * t + 0.1 * t * t; }, 1.0, 1e-3);
  CHECK(rate_limit_dual(p, {[](double) { return 0.0; }}) == 0.0);
  double primal = rate_limit(p);
  double dual = rate_limit_dual(p, first_order_family(p));
  CHECK(dual <= primal + 1e-12);
  CHECK((primal - dual) / primal <= 1e-3);
  auto relax = exp_decay(1.0, 1e-3);
  CHECK(rate_limit_dual(relax, first_order_family(relax)) <= 1e-5);
  std::vector<TimeFunction> fam{[](double t) { return 1 - t; }, [](double t) { return -0.5 * (1 - t); }};
  CHECK(rate_limit_dual(relax, fam) <= 1e-5);
}

TEST_CASE("dual and primal agree across the corpus") {
  for (const auto& np : profile_corpus()) {
    CAPTURE(np.name);
    CHECK(np.path.z0 > 0.75);
    CHECK(np.path.z0 <= 0.8);
    REQUIRE_NOTHROW(np.path.check_invariants());
    for (double j : np.path.j) CHECK(j > 0);
    double primal = rate_limit(np.path);
    double dual = rate_limit_dual(np.path, first_order_family(np.path));
    CHECK(std::abs(primal - dual) <= 1e-3 * primal);
  }
}

TEST_CASE("optimal profile") {
  for (double j : {0.0, 0.5, 2.0})
    for (double z : {0.3, 1.0}) {
      CHECK(optimal_u(j, z, 0.5) == 0.0);
      CHECK(optimal_u(j, z, -0.5) == doctest::Approx(z));
    }
  for (double y = -0.5; y <= 0.5; y += 0.1) CHECK(optimal_u(0.7, 0.7, y) == doctest::Approx(0.7 * (0.5 - y)));
  CHECK(s_integral_closed_form(2, 1) == doctest::Approx(s_function(2, 1)).epsilon(1e-8));
}

TEST_CASE("variational characterisation of S") {
  CHECK(s_variational(1, 1).value <= 1e-4);
  CHECK(s_variational(0, 1).value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(s_variational(2, 1).value == doctest::Approx(s_function(2, 1)).epsilon(1e-3));
  CHECK_THROWS_AS(s_variational(-1, 1), InfiniteCost);
  CHECK_THROWS_AS(s_variational(1, 0), InfiniteCost);
  auto r = s_variational(0.5, 1.5, 400);
  for (size_t i = 1; i < r.u.size(); ++i) CHECK(r.u[i] <= r.u[i - 1]);
}

TEST_CASE("limit profile carries the rate") {
  for (double y : {-0.4, 0.0, 0.3}) CHECK(limit_profile(0.9, 0.9, y).b0 == 0.0);
  CHECK_THROWS_AS(limit_profile(0, 0, 0.1), DegenerateDenominator);
  std::vector<double> breaks;
  for (int i = 0; i <= 64; ++i) breaks.push_back(-0.5 + i / 64.0);
  double half = 0.5 * integrate(
                          [](double y) {
                            auto p = limit_profile(1.0, 2.0, y);
                            return p.b0 * p.b0 * p.u0;
                          },
                          breaks);
  CHECK(half == doctest::Approx(2 * s_function(2, 1)).epsilon(1e-6));
  // the primitive differentiates back to b0
  const double h = 1e-6;
  for (double y : {-0.3, 0.1, 0.4}) {
    double d = (limit_profile_primitive(0.7, 1.3, y + h) - limit_profile_primitive(0.7, 1.3, y - h)) / (2 * h);
    CHECK(d == doctest::Approx(limit_profile(0.7, 1.3, y).b0).epsilon(1e-7));
  }
  CHECK(limit_profile_primitive(0.7, 1.3, -0.5) == doctest::Approx(0.0));
}

TEST_CASE("energy-dense regularisation") {
  auto p = exp_decay(1.0, 1e-3);
  double base = rate_limit(p);
  std::vector<double> excess, gap;
  for (double eta : {0.1, 0.01}) {
    auto q = regularize_z(p, eta);
    REQUIRE_NOTHROW(q.check_invariants());
    double zmin = 1, jmin = 1;
    for (double v : q.z) zmin = std::min(zmin, v);
    for (double v : q.j) jmin = std::min(jmin, v);
    CHECK(zmin > 0);
    CHECK(jmin > 0);
    excess.push_back((rate_limit(q) - (1 - eta) * base) / eta);
    double d = 0;
    for (size_t k = 0; k < q.z.size(); ++k) d = std::max(d, std::abs(q.z[k] - p.z[k]));
    gap.push_back(d);
  }
  // one constant C serves both scales
  CHECK(excess[1] <= 1.5 * excess[0] + 1e-9);
  CHECK(gap[1] < 0.2 * gap[0]);
}

TEST_CASE("regularisation smooths a kink") {
  auto kink = TwoStatePath::sample([](double t) { return t < 0.5 ? 0.8 - 0.6 * t : 0.5 - 0.2 * (t - 0.5); }, 1.0, 1e-3);
  auto q = regularize_z(kink, 0.05);
  double worst_raw = 0, worst = 0;
  for (size_t k = 1; k < kink.j.size(); ++k) {
    worst_raw = std::max(worst_raw, std::abs(kink.j[k] - kink.j[k - 1]));
    worst = std::max(worst, std::abs(q.j[k] - q.j[k - 1]));
  }
  CHECK(worst < 0.2 * worst_raw);
  CHECK(worst < 2 * 0.4 * 1e-3 / 0.05);
}
