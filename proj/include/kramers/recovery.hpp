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

#include <vector>

#include "kramers/grid.hpp"
#include "kramers/limit.hpp"
#include "kramers/measures.hpp"
#include "kramers/pde.hpp"

namespace kramers {

struct TransformTable;

struct InitialData {
  std::vector<double> u;  // u_hat per y-cell
  double a_eps = 0;
  double mass = 0;         // sum of g masses times u
  double left_mass = 0;    // the same restricted to y < 0
  double initial_energy = 0;  // eps * relative entropy of u g_hat w.r.t. gamma
};

// z0 on y <= -1/4, (1 - z0 + a) Z^l / Z on y >= 1/4 and a mollified linear
// ramp between; a is tuned for unit mass.
InitialData build_initial_data(const EpsilonContext& ctx, const YGrid& yg, double z0);

struct RecoveryBundle {
  double eps = 0;
  TwoStatePath z_path;
  YGrid ygrid;
  InitialData initial;
  DensityFluxPath u_path;  // u_hat and j_hat on the y-grid
  DensityFluxPath x_path;  // back-transformed density and flux
  double rate_value = 0;
  EnergyBound energy_bound;
};

RecoveryBundle recovery_pair(const EpsilonContext& ctx, const TransformTable& table, const YGrid& yg,
                             const TwoStatePath& z_path, const SolverConfig& cfg);

struct TraceReport {
  double left = 0;   // sup_t |u(t, -1/2-) - z(t)|
  double right = 0;  // sup_t |u(t, +1/2+)|
  double l2_strip = 0;  // L2 distance to the limit profile on the strip
  // the same sups restricted to the final quarter t >= 3T/4 of the horizon,
  // past the initial layer
  double left_late = 0;
  double right_late = 0;
};

TraceReport verify_boundary_traces(const RecoveryBundle& bundle);

}  // namespace kramers
