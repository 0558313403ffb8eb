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

#include "kramers/grid.hpp"
#include "kramers/measures.hpp"

namespace kramers {

// Mollifier bumps exp(1 - 1/(1-s^2)) centred in the two wells.
struct BumpPair {
  Interval support_a, support_b;
  double center_a = 0, center_b = 0;
  double chi_a(double x) const;
  double chi_b(double x) const;
};

double mollifier_profile(double s);  // equals 1 at s = 0, 0 for |s| >= 1

BumpPair bump_pair(const LandmarkReport& report);

struct TransformTable {
  EpsilonContext ctx;
  BumpPair bumps;
  std::vector<double> x_nodes;
  std::vector<double> y_values;
  std::vector<double> phi_values;
  std::vector<double> m_values;
  std::vector<double> g_ell_hat;  // at y_values

  double log_c = 0;     // log(Z^l / (eps tau))
  double log_na = 0;    // log int chi_a e^{-(V - V_a)/eps}
  double log_nb = 0;    // log int chi_b e^{-(V - V_b)/eps}

  double y_at(double x) const;
  double dy_dx(double x) const;
  double mu_at(double x) const;
  double m_at(double x) const;
  double phi_at(double x) const;
  double dphi_dx(double x) const;
  double log_g_hat_at_x(double x) const;  // log g_hat(y(x))
  Interval x_range() const { return {x_nodes.front(), x_nodes.back()}; }
  Interval y_range() const { return {y_values.front(), y_values.back()}; }

 private:
  int node_below(double x) const;
};

// Nodes on the region where (V - V(x_b))/eps <= level, refined near the landmarks.
std::vector<double> default_transform_nodes(const EpsilonContext& ctx, int count = 4096,
                                            double level = 60.0);

TransformTable build_transform(const EpsilonContext& ctx, std::vector<double> x_nodes);
TransformTable build_transform(const EpsilonContext& ctx, int count = 4096);

double invert_y(const TransformTable& table, double y);

// max over nodes of |phi - clamp(y, -1/2, 1/2)|
double phi_identity_defect(const TransformTable& table);

// gamma^l masses of the x-preimages of the given y-cells; tails beyond the
// table range are folded into the end cells.
std::vector<double> gamma_left_cell_masses(const TransformTable& table, const std::vector<double>& y_faces);

// Push-forward onto the image grid y(faces); rho becomes a density in y.
DensityFluxPath pushforward_pair(const TransformTable& table, const DensityFluxPath& path);
// Inverse of pushforward_pair.
DensityFluxPath pullback_pair(const TransformTable& table, const DensityFluxPath& path);

}  // namespace kramers
