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
#include "kramers/interval.hpp"

namespace kramers {

// Smooth landscape V on the real line. The domain hint is the region probed
// by validate(); quadratic growth outside of it is the caller's promise.
struct PotentialSpec {
  std::function<double(double)> v;
  std::function<double(double)> dv;
  std::function<double(double)> ddv;
  Interval domain_hint{-2.5, 2.5};
  std::string name = "custom";
};

struct LandmarkReport {
  double x_a = 0, x_cl = 0, x_0 = 0, x_cr = 0, x_bminus = 0, x_b = 0, x_bplus = 0;
  double alpha = 0;    // min V'' on (-inf, x_cl] and [x_cr, inf), probe grid
  double a_upper = 0;  // max V'' on the same outer regions
  double barrier = 0;  // V(x_0) - V(x_a)
  Interval B_a, B_b, B_0;

  double v_a = 0, v_0 = 0, v_b = 0;
  double ddv_a = 0, ddv_0 = 0, ddv_b = 0;
};

enum class Clause {
  DerivativeConsistency,
  CriticalPoints,
  LeftWellLevel,
  DeepWell,
  IntermediateRange,
  SublevelStructure,
  SaddleCurvature,
  OuterConvexity,
  Ordering,
};

const char* clause_name(Clause c);

class ValidationFailure : public Error {
 public:
  ValidationFailure(Clause clause, const std::string& what)
      : Error(std::string(clause_name(clause)) + ": " + what), clause_(clause) {}
  Clause clause() const { return clause_; }

 private:
  Clause clause_;
};

LandmarkReport validate(const PotentialSpec& spec, int probe_count = 10000);

// Soft minimum of a stiffening left well depth (7/4 u^2 + u^4), u = x + 1,
// and a softening right well depth (u^2/2 + 3 (sqrt(1 + u^2) - 1)) - tilt,
// u = x - 1, at softness depth / 2; shifted so that V(x_a) = 0. Scaling both
// parameters by c scales V by c.
PotentialSpec reference_potential(double depth = 1.0, double tilt = 1.2);

struct ReferenceBox {
  static constexpr double depth_min = 0.5;
  static constexpr double depth_max = 3.0;
  static constexpr double tilt_min_ratio = 0.2;
  static constexpr double tilt_max_ratio = 1.5;
};

// depth (x^2-1)^2 - tilt (x - x^3/3), shifted so that V(-1) = 0. Satisfies the
// landmark conditions only for small tilt / depth.
PotentialSpec quartic_potential(double depth, double tilt);

// Ascending coefficients c_0 + c_1 x + ... ; when shift_to_left_well is set the
// constant is adjusted so that the leftmost local minimum sits at level 0.
PotentialSpec polynomial_potential(std::vector<double> coefficients, Interval domain_hint,
                                   bool shift_to_left_well = true);

// Bracketed bisection for a sign change of f on [a, b].
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12);

}  // namespace kramers
