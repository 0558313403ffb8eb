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

#include "kramers/interval.hpp"

namespace kramers {

// Cell-centred 1D grid described by its faces.
struct Grid1D {
  std::vector<double> faces;

  static Grid1D uniform(double lo, double hi, int cells);
  static Grid1D from_faces(std::vector<double> faces);
  // Faces reconstructed as midpoints of centres (exact for uniform grids).
  static Grid1D from_centers(const std::vector<double>& centers);

  int cells() const { return static_cast<int>(faces.size()) - 1; }
  double center(int i) const { return 0.5 * (faces[i] + faces[i + 1]); }
  double width(int i) const { return faces[i + 1] - faces[i]; }
  // Distance between the centres adjacent to interior face f (1..cells-1).
  double center_gap(int f) const { return center(f) - center(f - 1); }
  std::vector<double> centers() const;
  std::vector<double> widths() const;
  Interval span() const { return {faces.front(), faces.back()}; }
};

// (rho, j) on a time grid. rho[k] are cell densities at t[k]; flux[k] holds
// face fluxes (boundary faces included) acting on (t[k-1], t[k]]; flux[0]
// is the instantaneous flux of the initial slice.
struct DensityFluxPath {
  std::vector<double> t;
  Grid1D grid;
  std::vector<std::vector<double>> rho;
  std::vector<std::vector<double>> flux;

  int steps() const { return static_cast<int>(t.size()) - 1; }
  double mass(int k) const;
  std::vector<double> cell_masses(int k) const;
  // max over steps and cells of |d/dt m_i + (j_{i+1/2} - j_{i-1/2})|, scaled by dt.
  double continuity_defect() const;
  void check_shape() const;
};

// Solves a tridiagonal system in place (Thomas algorithm); sub[0] and sup[n-1] unused.
void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                       std::vector<double>& rhs);

}  // namespace kramers
