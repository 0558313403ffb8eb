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

// Cell masses below this are exact zeros.
constexpr double kZeroDensity = 1e-300;

// Localized entropy of mu with respect to nu over the cells whose centres lie
// in region. +inf when mu charges a cell where nu vanishes.
double relative_entropy(const Grid1D& grid, const std::vector<double>& mu, const std::vector<double>& nu,
                        Interval region);
double fisher_information(const Grid1D& grid, const std::vector<double>& mu, const std::vector<double>& nu,
                          Interval region);

// Cell masses of the nodal reference measure h_i exp(-V(c_i)/eps), as logs.
std::vector<double> log_gamma_cell_masses(const EpsilonContext& ctx, const Grid1D& grid);
// Discrete gamma_eps restricted to the grid, unit mass, as a density.
std::vector<double> discrete_gamma_density(const EpsilonContext& ctx, const Grid1D& grid);

double energy(const EpsilonContext& ctx, const Grid1D& grid, const std::vector<double>& rho_slice);

struct EdpSplit {
  double delta_e = 0;
  double kinetic = 0;
  double slope = 0;
  double total = 0;
};

double rate_primal(const EpsilonContext& ctx, const DensityFluxPath& path);
EdpSplit rate_edp_split(const EpsilonContext& ctx, const DensityFluxPath& path);

// b(t, x), evaluated at interval midpoints and faces.
using TestFunction = std::function<double(double t, double x)>;

double rate_dual(const EpsilonContext& ctx, const DensityFluxPath& path, const std::vector<TestFunction>& family);
double rate_dual_single(const EpsilonContext& ctx, const DensityFluxPath& path, const TestFunction& b);

// Pointwise maximiser (j - J)/(eps tau rho) on the (interval, face) lattice,
// exposed as a test function that reproduces it on that lattice.
TestFunction optimal_test_function(const EpsilonContext& ctx, const DensityFluxPath& path);

// 2 psi(t) phi~'(x) / (1 + psi(t) phi~(x)) with phi~ = 1/2 - phi_eps.
TestFunction committor_test_function(const TransformTable& table, std::function<double(double)> psi);

// Products p_k(x) * q(t) * bump on an interval.
std::vector<TestFunction> polynomial_bump_family(Interval support, int degree, double horizon);

// (1/2) sum over intervals of |j_hat + d_y u_hat|^2 / u_hat, each flux slice
// paired with the density at the end of its interval.
double rate_transformed(const DensityFluxPath& y_path);

struct LsiResult {
  double entropy = 0;
  double fisher = 0;
  double ratio = 0;  // alpha * entropy / fisher
};

LsiResult lsi_check(const Grid1D& grid, const std::vector<double>& mu, const std::function<double(double)>& w,
                    Interval region, double alpha);

double concentration_bound(const Grid1D& grid, const std::vector<double>& mu, const std::vector<double>& nu,
                           Interval a1, Interval a2);

// Piecewise-linear function through (x, f) and a finite atomic measure.
struct GridFunction {
  std::vector<double> x, f;
  double at(double s) const;
};
struct AtomicMeasure {
  std::vector<double> x, w;
};

struct PoincareResult {
  double lhs = 0;
  double rhs = 0;
};

PoincareResult poincare_check(const GridFunction& f, const AtomicMeasure& mu, Interval interval);
double poincare_constant(Interval interval);

}  // namespace kramers
