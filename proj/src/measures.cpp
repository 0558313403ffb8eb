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

#include "kramers/measures.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "kramers/quadrature.hpp"

namespace kramers {

namespace {

double find_truncation(const PotentialSpec& s, double from, double dir, double eps) {
  const double level = kUnderflowExponent * eps;
  double a = from, step = 0.05;
  for (int k = 0; k < 100000; ++k) {
    double b = a + dir * step;
    if (s.v(b) >= level) return bisect_root([&](double x) { return s.v(x) - level; }, a, b, 1e-10);
    a = b;
    step *= 1.1;
  }
  throw QuadratureError("truncation point not found; V does not grow");
}

void fill_integrals(EpsilonContext& c, double x_split) {
  const double eps = c.eps;
  auto logf = [&](double x) { return -c.spec.v(x) / eps; };
  // Tails beyond the truncation points, bounded via the linear lower bound on V.
  auto tail = [&](double x) {
    double slope = std::abs(c.spec.dv(x));
    return -c.spec.v(x) / eps + std::log(eps / std::max(slope, 1e-300));
  };
  auto whole = log_integrate_adaptive(logf, c.quad_grid, c.quad_order, 1e-9);
  auto left = log_integrate_adaptive(logf, clip_breaks(c.quad_grid, c.x_lo, x_split), c.quad_order, 1e-9);
  c.log_z = log_add(log_add(whole.log_value, tail(c.x_lo)), tail(c.x_hi));
  c.log_z_left = log_add(left.log_value, tail(c.x_lo));
}

}  // namespace

double EpsilonContext::tau() const { return std::exp(log_tau); }

double EpsilonContext::log_integral(const std::function<double(double)>& g, double a, double b) const {
  if (!(b > a)) return -INFINITY;
  return log_integrate(g, clip_breaks(quad_grid, a, b), quad_order);
}

double kramers_log_tau(const LandmarkReport& r, double eps) {
  return std::log(2 * std::numbers::pi) - 0.5 * std::log(r.ddv_a * std::abs(r.ddv_0)) +
         (r.v_0 - r.v_a) / eps;
}

double certified_eps_floor(const LandmarkReport& r) { return r.barrier / kUnderflowExponent; }

EpsilonContext build_context(const PotentialSpec& spec, const LandmarkReport& report, double eps,
                             int quad_points) {
  if (!(eps > 0)) throw Error("build_context: eps must be positive");
  if (eps <= certified_eps_floor(report))
    throw Error(fmt::format("build_context: eps={} below certified floor {}", eps, certified_eps_floor(report)));
  EpsilonContext c;
  c.eps = eps;
  c.spec = spec;
  c.landmarks = report;
  c.quad_order = quad_points;
  c.x_lo = find_truncation(spec, report.x_a, -1, eps);
  c.x_hi = find_truncation(spec, report.x_b, +1, eps);
  const double se = std::sqrt(eps);
  c.quad_grid = refined_breaks(c.x_lo, c.x_hi, {report.x_a, report.x_0, report.x_b}, 5 * se, se / 8, 0.25);
  // x_0 must be a panel boundary so the left integral is panel-exact.
  c.quad_grid.push_back(report.x_0);
  std::sort(c.quad_grid.begin(), c.quad_grid.end());
  c.quad_grid.erase(std::unique(c.quad_grid.begin(), c.quad_grid.end()), c.quad_grid.end());
  fill_integrals(c, report.x_0);
  c.log_tau = kramers_log_tau(report, eps);
  return c;
}

EpsilonContext build_context_unchecked(const PotentialSpec& spec, double eps, Interval core, int quad_points) {
  EpsilonContext c;
  c.eps = eps;
  c.spec = spec;
  c.quad_order = quad_points;
  double mid = 0.5 * (core.lo + core.hi);
  c.x_lo = find_truncation(spec, mid, -1, eps);
  c.x_hi = find_truncation(spec, mid, +1, eps);
  const double se = std::sqrt(eps);
  c.quad_grid = refined_breaks(c.x_lo, c.x_hi, {core.lo, mid, core.hi}, 5 * se, se / 8, 0.25);
  fill_integrals(c, mid);
  c.log_tau = 0;
  return c;
}

double laplace_log_estimate(double fdd, double fmin, MinLocation loc, double n) {
  double v = 0.5 * std::log(2 * std::numbers::pi / (n * fdd)) - n * fmin;
  return loc == MinLocation::boundary ? v - std::log(2.0) : v;
}

double laplace_estimate(double fdd, double fmin, MinLocation loc, double n) {
  return std::exp(laplace_log_estimate(fdd, fmin, loc, n));
}

double laplace_estimate(const std::function<double(double)>&, double fdd, double fmin, MinLocation loc,
                        double n) {
  return laplace_estimate(fdd, fmin, loc, n);
}

double laplace_error_full(const EpsilonContext& c) {
  const auto& r = c.landmarks;
  return std::expm1(c.log_z - laplace_log_estimate(r.ddv_b, r.v_b, MinLocation::interior, 1.0 / c.eps));
}

double laplace_error_left(const EpsilonContext& c) {
  const auto& r = c.landmarks;
  return std::expm1(c.log_z_left - laplace_log_estimate(r.ddv_a, r.v_a, MinLocation::interior, 1.0 / c.eps));
}

double gamma_log_density(const EpsilonContext& c, double x, Norm norm) {
  return -c.spec.v(x) / c.eps - (norm == Norm::full ? c.log_z : c.log_z_left);
}

double mass_on(const EpsilonContext& c, Interval iv, Norm norm) {
  const double norm_log = norm == Norm::full ? c.log_z : c.log_z_left;
  Interval clipped = iv.intersect({c.x_lo, c.x_hi});
  if (clipped.empty()) return 0.0;
  auto logf = [&](double x) { return -c.spec.v(x) / c.eps; };
  auto r = log_integrate_adaptive(logf, clip_breaks(c.quad_grid, clipped.lo, clipped.hi), c.quad_order, 1e-8);
  return std::exp(r.log_value - norm_log);
}

}  // namespace kramers
