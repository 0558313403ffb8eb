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

struct TransformTable;

struct SolverConfig {
  double dt = 1e-3;
  double theta = 1.0;
  Grid1D grid;
  double tol = 1e-12;
  int max_newton = 50;
  void check() const;  // throws ConfigError
};

// Uniform x-grid on the region where (V - V(x_b))/eps <= level.
Grid1D fp_grid(const EpsilonContext& ctx, int cells, double level = 40.0);

// Exponentially fitted finite volumes with zero-flux ends. rho0 is a cell
// density of unit mass; flux[k] is the theta-weighted flux of step k.
DensityFluxPath solve_fp_x(const EpsilonContext& ctx, const std::vector<double>& rho0, const SolverConfig& cfg,
                           double horizon);

// Positive mixture z0 * gamma^l restricted left of x_0 plus the
// complementary multiple of gamma right of x_0, as a density.
std::vector<double> local_equilibrium_mixture(const EpsilonContext& ctx, const Grid1D& grid, double z0);

// Mass of a path slice on cells with centre below x.
// Smooth start e^{-(V - V_a)/eps} (1 + amplitude tanh((x_0 - x) / width)),
// normalised; used where refinement orders assume smooth data.
std::vector<double> tilted_equilibrium(const EpsilonContext& ctx, const Grid1D& grid, double amplitude = 0.9,
                                       double width = 0.3);
double mass_left_of(const DensityFluxPath& path, int k, double x);

// y-grid for the weighted heat equation: uniform cells on the strip plus a
// pad, geometric cells out to the ends of the transform table.
struct YGrid {
  Grid1D grid;
  std::vector<double> g_mass;  // gamma^l masses of the x-preimages of the cells
  std::vector<double> taper;   // per face: 1 inside the strip, 1/2 on its edges, 0 outside
  int strip_lo = 0;            // first cell inside (-1/2, 1/2)
  int strip_hi = 0;            // one past the last
};

YGrid build_y_grid(const TransformTable& table, int strip_cells = 1024, double pad = 0.25, double growth = 1.1);

enum class YFlux { centered, fitted };

// Drift b(t, y); the solver evaluates it at the start of each step and
// multiplies by the face taper.
using DriftField = std::function<double(double t, double y)>;

// g dt u = d_yy u - d_y(b u) in conservative form; rho holds u_hat and flux
// the face fluxes -d_y u + b u (zero at the ends).
DensityFluxPath solve_weighted_heat_y(const YGrid& yg, const std::vector<double>& u0, const DriftField& drift,
                                      const SolverConfig& cfg, double horizon, YFlux form = YFlux::centered);

// Both sides of the a priori estimate for v = e^{-B} u with B the primitive
// of the drift, zero at y = -1/2.
struct EnergyBound {
  double lhs = 0;
  double rhs = 0;
};
EnergyBound weighted_energy_bound(const YGrid& yg, const DensityFluxPath& u_path,
                                  const std::function<double(double t, double y)>& primitive);

}  // namespace kramers
