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

#include <functional>
#include <vector>

#include "kramers/interval.hpp"
#include "kramers/potential.hpp"

namespace kramers {

enum class Norm { full, left };
enum class MinLocation { interior, boundary };

// One noise level. All partition functions are kept as logs.
struct EpsilonContext {
  double eps = 0;
  double log_z = 0;
  double log_z_left = 0;
  double log_tau = 0;
  LandmarkReport landmarks;
  PotentialSpec spec;
  std::vector<double> quad_grid;  // panel breakpoints on [x_lo, x_hi]
  int quad_order = 16;
  double x_lo = 0, x_hi = 0;  // truncation where V/eps reaches 745

  double v(double x) const { return spec.v(x); }
  double dv(double x) const { return spec.dv(x); }
  double tau() const;
  // log int_a^b exp(g(x)) dx on the panels of this context.
  double log_integral(const std::function<double(double)>& g, double a, double b) const;
};

constexpr double kUnderflowExponent = 745.0;

// log tau_eps from the landmarks.
double kramers_log_tau(const LandmarkReport& r, double eps);

EpsilonContext build_context(const PotentialSpec& spec, const LandmarkReport& report, double eps,
                             int quad_points = 16);

// Skips validate(); used for single-well sanity potentials.
EpsilonContext build_context_unchecked(const PotentialSpec& spec, double eps, Interval core,
                                       int quad_points = 16);

double laplace_estimate(double fdd_at_min, double f_min, MinLocation loc, double n);
double laplace_log_estimate(double fdd_at_min, double f_min, MinLocation loc, double n);
double laplace_estimate(const std::function<double(double)>& f, double fdd_at_min, double f_min,
                        MinLocation loc, double n);

// Z / laplace - 1 for the full and the left partition functions.
double laplace_error_full(const EpsilonContext& ctx);
double laplace_error_left(const EpsilonContext& ctx);

double gamma_log_density(const EpsilonContext& ctx, double x, Norm norm);
double mass_on(const EpsilonContext& ctx, Interval interval, Norm norm);

// Smallest eps for which e^{barrier/eps} stays representable.
double certified_eps_floor(const LandmarkReport& r);

}  // namespace kramers
