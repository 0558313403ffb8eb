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

#include "kramers/grid.hpp"

#include <algorithm>
#include <cmath>

#include "kramers/errors.hpp"

namespace kramers {

Grid1D Grid1D::uniform(double lo, double hi, int cells) {
  if (cells < 1 || !(hi > lo)) throw GridMismatch("Grid1D::uniform: bad extent");
  Grid1D g;
  g.faces.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) g.faces[i] = lo + (hi - lo) * i / cells;
  g.faces[cells] = hi;
  return g;
}

Grid1D Grid1D::from_faces(std::vector<double> faces) {
  for (size_t i = 1; i < faces.size(); ++i)
    if (!(faces[i] > faces[i - 1])) throw GridMismatch("Grid1D: faces must increase strictly");
  if (faces.size() < 2) throw GridMismatch("Grid1D: need at least one cell");
  Grid1D g;
  g.faces = std::move(faces);
  return g;
}

Grid1D Grid1D::from_centers(const std::vector<double>& c) {
  if (c.size() < 2) throw GridMismatch("Grid1D::from_centers: need two centres");
  std::vector<double> f(c.size() + 1);
  for (size_t i = 1; i < c.size(); ++i) f[i] = 0.5 * (c[i - 1] + c[i]);
  f[0] = c[0] - (f[1] - c[0]);
  f[c.size()] = c.back() + (c.back() - f[c.size() - 1]);
  return from_faces(std::move(f));
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> c(cells());
  for (int i = 0; i < cells(); ++i) c[i] = center(i);
  return c;
}

std::vector<double> Grid1D::widths() const {
  std::vector<double> w(cells());
  for (int i = 0; i < cells(); ++i) w[i] = width(i);
  return w;
}

double DensityFluxPath::mass(int k) const {
  double s = 0;
  for (int i = 0; i < grid.cells(); ++i) s += rho[k][i] * grid.width(i);
  return s;
}

std::vector<double> DensityFluxPath::cell_masses(int k) const {
  std::vector<double> m(grid.cells());
  for (int i = 0; i < grid.cells(); ++i) m[i] = rho[k][i] * grid.width(i);
  return m;
}

double DensityFluxPath::continuity_defect() const {
  double worst = 0;
  for (int k = 1; k <= steps(); ++k) {
    double dt = t[k] - t[k - 1];
    for (int i = 0; i < grid.cells(); ++i) {
      double dm = (rho[k][i] - rho[k - 1][i]) * grid.width(i);
      worst = std::max(worst, std::abs(dm + dt * (flux[k][i + 1] - flux[k][i])));
    }
  }
  return worst;
}

void DensityFluxPath::check_shape() const {
  const size_t n = grid.cells();
  if (t.size() < 2 || rho.size() != t.size() || flux.size() != t.size())
    throw GridMismatch("DensityFluxPath: slice count mismatch");
  for (size_t k = 0; k < t.size(); ++k) {
    if (rho[k].size() != n || flux[k].size() != n + 1) throw GridMismatch("DensityFluxPath: slice size mismatch");
    if (k > 0 && !(t[k] > t[k - 1])) throw GridMismatch("DensityFluxPath: time grid must increase");
  }
}

void solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                       std::vector<double>& d) {
  const size_t n = b.size();
  for (size_t i = 1; i < n; ++i) {
    double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(d[i])) throw StabilityError("solve_tridiagonal: non-finite solution");
}

}  // namespace kramers
