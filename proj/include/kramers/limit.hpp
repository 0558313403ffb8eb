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
#include <string>
#include <vector>

#include "kramers/errors.hpp"

namespace kramers {

// Left-well mass z on a time grid with the forward-difference flux j.
struct TwoStatePath {
  std::vector<double> t;
  std::vector<double> z;  // per node
  std::vector<double> j;  // per interval, j_k = -(z_{k+1} - z_k) / dt_k
  double z0 = 0;

  static TwoStatePath from_z(std::vector<double> t, std::vector<double> z);
  static TwoStatePath sample(const std::function<double(double)>& z, double horizon, double dt);
  int steps() const { return static_cast<int>(t.size()) - 1; }
  double horizon() const { return t.back(); }
  // Throws StructureError unless z0 = z(0), z in [0, 1] nonincreasing and j consistent.
  void check_invariants() const;
};

double s_function(double a, double b);

double rate_limit(const TwoStatePath& path);

using TimeFunction = std::function<double(double)>;

// 2 sum_k dt_k [j_k f(t_k) - z_k (e^{f(t_k)} - 1)], the summed-by-parts form
// of 2 int z(f' - e^f + 1) dt + 2 z0 f(0) for f(T) = 0. Returns the max over
// the family; throws ViolationError if it exceeds rate_limit.
double rate_limit_dual(const TwoStatePath& path, const std::vector<TimeFunction>& family);

// {0, log(j/z) on the time grid, and scaled copies of it}.
std::vector<TimeFunction> first_order_family(const TwoStatePath& path);

struct VariationalResult {
  double value = 0;
  std::vector<double> y;
  std::vector<double> u;
};

// Minimises (1/4) int (j + u')^2 / u over grid profiles with u(-1/2) = z and
// u(1/2) = 0, the last interior node fixed at optimal_u.
VariationalResult s_variational(double j, double z, int cells = 2000);

double optimal_u(double j, double z, double y);

// (1/4) int (j + u')^2 / u for u = optimal_u, by Gauss-Legendre quadrature.
double s_integral_closed_form(double j, double z);

// Constant extension, time mollification at scale eta, then the convex
// combination eta * (1/2 - t/4T) + (1 - eta) * mollified.
TwoStatePath regularize_z(const TwoStatePath& path, double eta);

struct LimitProfile {
  double u0 = 0;
  double b0 = 0;
};

LimitProfile limit_profile(double z, double j, double y);
// Primitive of b0 in y, zero at y = -1/2.
double limit_profile_primitive(double z, double j, double y);

struct NamedProfile {
  std::string name;
  TwoStatePath path;
};

// Smooth strictly-decreasing profiles on [0, 1]; z0 = 0.8 except for the
// regularised kink, whose convex combination lowers it slightly.
std::vector<NamedProfile> profile_corpus(double dt = 1e-3);

}  // namespace kramers
