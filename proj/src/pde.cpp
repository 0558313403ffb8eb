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

#include "kramers/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kramers/errors.hpp"
#include "kramers/potential.hpp"
#include "kramers/quadrature.hpp"
#include "kramers/sg.hpp"
#include "kramers/transform.hpp"

namespace kramers {

namespace {

// Two-point face fluxes F_f = alpha_f r_{f-1} - beta_f r_f on interior faces;
// the boundary faces carry no flux.
struct TwoPointFlux {
  std::vector<double> alpha, beta;

  std::vector<double> apply(const std::vector<double>& r) const {
    const size_t n = r.size();
    std::vector<double> f(n + 1, 0.0);
    for (size_t i = 1; i < n; ++i) f[i] = alpha[i] * r[i - 1] - beta[i] * r[i];
    return f;
  }
};

// One theta step of w_i dr_i/dt + F_{i+1} - F_i = 0. Returns the new slice
// and writes the theta-weighted fluxes into flux_out.
std::vector<double> theta_step(const std::vector<double>& w, const TwoPointFlux& fl, double dt, double theta,
                               const std::vector<double>& r, std::vector<double>& flux_out) {
  const size_t n = r.size();
  std::vector<double> sub(n, 0.0), diag(n), sup(n, 0.0), rhs(n);
  const auto old_flux = fl.apply(r);
  for (size_t i = 0; i < n; ++i) {
    diag[i] = w[i] / dt;
    rhs[i] = w[i] / dt * r[i] - (1 - theta) * (old_flux[i + 1] - old_flux[i]);
    if (i + 1 < n) {  // right face i+1
      diag[i] += theta * fl.alpha[i + 1];
      sup[i] = -theta * fl.beta[i + 1];
    }
    if (i > 0) {  // left face i
      diag[i] += theta * fl.beta[i];
      sub[i] = -theta * fl.alpha[i];
    }
  }
  solve_tridiagonal(sub, diag, sup, rhs);
  const auto new_flux = fl.apply(rhs);
  flux_out.resize(n + 1);
  for (size_t f = 0; f <= n; ++f) flux_out[f] = theta * new_flux[f] + (1 - theta) * old_flux[f];
  return rhs;
}

// Clips round-off negatives and restores the weighted mass.
void enforce_positivity(std::vector<double>& r, const std::vector<double>& w, double t) {
  double lo = *std::min_element(r.begin(), r.end());
  if (lo >= 0) return;
  if (lo < -1e-12) throw NegativityError(fmt::format("negative density {:.3e} at t = {}", lo, t));
  double before = 0, after = 0;
  for (size_t i = 0; i < r.size(); ++i) before += w[i] * r[i];
  for (auto& v : r) v = std::max(v, 0.0);
  for (size_t i = 0; i < r.size(); ++i) after += w[i] * r[i];
  for (auto& v : r) v *= before / after;
  spdlog::debug("clipped negative density {:.3e} at t = {}", lo, t);
}

std::vector<double> time_grid(double dt, double horizon) {
  int n = std::max(1, static_cast<int>(std::lround(horizon / dt)));
  std::vector<double> t(n + 1);
  for (int k = 0; k <= n; ++k) t[k] = horizon * k / n;
  return t;
}

}  // namespace

void SolverConfig::check() const {
  if (!(dt > 0)) throw ConfigError("SolverConfig: dt must be positive");
  if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("SolverConfig: theta must lie in [1/2, 1]");
  if (!(tol > 0)) throw ConfigError("SolverConfig: tol must be positive");
  if (grid.cells() < 2) throw ConfigError("SolverConfig: grid needs at least two cells");
}

Grid1D fp_grid(const EpsilonContext& ctx, int cells, double level) {
  const auto& r = ctx.landmarks;
  auto excess = [&](double x) { return (ctx.v(x) - r.v_b) / ctx.eps - level; };
  double lo = r.x_a, hi = r.x_b;
  while (excess(lo) < 0 && lo > ctx.x_lo) lo -= 0.05;
  while (excess(hi) < 0 && hi < ctx.x_hi) hi += 0.05;
  lo = excess(lo) > 0 ? bisect_root(excess, lo, r.x_a) : std::max(lo, ctx.x_lo);
  hi = excess(hi) > 0 ? bisect_root(excess, r.x_b, hi) : std::min(hi, ctx.x_hi);
  return Grid1D::uniform(lo, hi, cells);
}

DensityFluxPath solve_fp_x(const EpsilonContext& ctx, const std::vector<double>& rho0, const SolverConfig& cfg,
                           double horizon) {
  cfg.check();
  const Grid1D& g = cfg.grid;
  const int n = g.cells();
  if (static_cast<int>(rho0.size()) != n) throw GridMismatch("solve_fp_x: initial density does not match grid");
  const auto s = SgStencil::build(ctx, g);
  TwoPointFlux fl{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  for (int f = 1; f < n; ++f) {
    fl.alpha[f] = s.coeff / s.d[f] * s.bp[f];
    fl.beta[f] = s.coeff / s.d[f] * s.bm[f];
  }
  const auto w = g.widths();

  DensityFluxPath p;
  p.t = time_grid(cfg.dt, horizon);
  p.grid = g;
  p.rho.push_back(rho0);
  p.flux.push_back(fl.apply(rho0));
  for (int k = 0; k + 1 < static_cast<int>(p.t.size()); ++k) {
    std::vector<double> j;
    auto r = theta_step(w, fl, p.t[k + 1] - p.t[k], cfg.theta, p.rho.back(), j);
    enforce_positivity(r, w, p.t[k + 1]);
    p.rho.push_back(std::move(r));
    p.flux.push_back(std::move(j));
  }
  return p;
}

std::vector<double> local_equilibrium_mixture(const EpsilonContext& ctx, const Grid1D& g, double z0) {
  const double x0 = ctx.landmarks.x_0;
  std::vector<double> lm(g.cells()), rho(g.cells());
  LogSum left, right;
  for (int i = 0; i < g.cells(); ++i) {
    lm[i] = std::log(g.width(i)) - ctx.v(g.center(i)) / ctx.eps;
    (g.center(i) < x0 ? left : right).add(lm[i]);
  }
  for (int i = 0; i < g.cells(); ++i) {
    double m = g.center(i) < x0 ? z0 * std::exp(lm[i] - left.value()) : (1 - z0) * std::exp(lm[i] - right.value());
    rho[i] = m / g.width(i);
  }
  return rho;
}

std::vector<double> tilted_equilibrium(const EpsilonContext& ctx, const Grid1D& g, double amplitude, double width) {
  if (!(std::abs(amplitude) < 1 && width > 0)) throw ConfigError("tilted_equilibrium: need |amplitude| < 1, width > 0");
  const auto& lm = ctx.landmarks;
  std::vector<double> rho(g.cells());
  KahanSum mass;
  for (int i = 0; i < g.cells(); ++i) {
    double x = g.center(i);
    rho[i] = std::exp(-(ctx.v(x) - lm.v_a) / ctx.eps) * (1 + amplitude * std::tanh((lm.x_0 - x) / width));
    mass.add(rho[i] * g.width(i));
  }
  for (auto& r : rho) r /= mass.value();
  return rho;
}

double mass_left_of(const DensityFluxPath& p, int k, double x) {
  double s = 0;
  for (int i = 0; i < p.grid.cells(); ++i)
    if (p.grid.center(i) < x) s += p.rho[k][i] * p.grid.width(i);
  return s;
}

YGrid build_y_grid(const TransformTable& table, int strip_cells, double pad, double growth) {
  const double h = 1.0 / strip_cells;
  const int pad_cells = static_cast<int>(std::lround(pad * strip_cells));
  const Interval yr = table.y_range();
  const double core_lo = -0.5 - pad_cells * h, core_hi = 0.5 + pad_cells * h;
  if (!(yr.lo < core_lo && yr.hi > core_hi)) throw GridMismatch("build_y_grid: transform table does not cover the pad");
  std::vector<double> left, core, right;
  for (int i = 0; i <= strip_cells + 2 * pad_cells; ++i) core.push_back(core_lo + i * h);
  for (double y = core_lo, d = h * growth; y > yr.lo; d *= growth) {
    y = std::max(y - d, yr.lo);
    // merge a sliver at the table end into the previous cell
    if (y - yr.lo < 0.5 * d * growth) y = yr.lo;
    left.push_back(y);
  }
  for (double y = core_hi, d = h * growth; y < yr.hi; d *= growth) {
    y = std::min(y + d, yr.hi);
    if (yr.hi - y < 0.5 * d * growth) y = yr.hi;
    right.push_back(y);
  }
  std::vector<double> faces(left.rbegin(), left.rend());
  faces.insert(faces.end(), core.begin(), core.end());
  faces.insert(faces.end(), right.begin(), right.end());

  YGrid yg;
  yg.grid = Grid1D::from_faces(std::move(faces));
  yg.g_mass = gamma_left_cell_masses(table, yg.grid.faces);
  yg.taper.resize(yg.grid.faces.size());
  for (size_t f = 0; f < yg.taper.size(); ++f) {
    double a = std::abs(yg.grid.faces[f]);
    yg.taper[f] = a < 0.5 ? 1.0 : (a == 0.5 ? 0.5 : 0.0);
  }
  const int off = static_cast<int>(left.size());
  yg.strip_lo = off + pad_cells;
  yg.strip_hi = off + pad_cells + strip_cells;
  return yg;
}

DensityFluxPath solve_weighted_heat_y(const YGrid& yg, const std::vector<double>& u0, const DriftField& drift,
                                      const SolverConfig& cfg, double horizon, YFlux form) {
  const Grid1D& g = yg.grid;
  const int n = g.cells();
  if (static_cast<int>(u0.size()) != n) throw GridMismatch("solve_weighted_heat_y: initial data does not match grid");
  for (double v : u0)
    if (!(v >= 0)) throw NegativityError("solve_weighted_heat_y: initial data must be nonnegative");
  SolverConfig c = cfg;
  c.grid = g;
  c.check();

  DensityFluxPath p;
  p.t = time_grid(cfg.dt, horizon);
  p.grid = g;
  auto fluxes_at = [&](double t) {
    TwoPointFlux fl{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
    for (int f = 1; f < n; ++f) {
      double d = g.center_gap(f);
      double b = yg.taper[f] == 0.0 ? 0.0 : yg.taper[f] * drift(t, g.faces[f]);
      if (form == YFlux::centered) {
        fl.alpha[f] = 1 / d + 0.5 * b;
        fl.beta[f] = 1 / d - 0.5 * b;
      } else {
        fl.alpha[f] = bernoulli_fn(-b * d) / d;
        fl.beta[f] = bernoulli_fn(b * d) / d;
      }
    }
    return fl;
  };
  p.rho.push_back(u0);
  p.flux.push_back(fluxes_at(0.0).apply(u0));
  for (int k = 0; k + 1 < static_cast<int>(p.t.size()); ++k) {
    std::vector<double> j;
    auto u = theta_step(yg.g_mass, fluxes_at(p.t[k]), p.t[k + 1] - p.t[k], cfg.theta, p.rho.back(), j);
    enforce_positivity(u, yg.g_mass, p.t[k + 1]);
    p.rho.push_back(std::move(u));
    p.flux.push_back(std::move(j));
  }
  return p;
}

EnergyBound weighted_energy_bound(const YGrid& yg, const DensityFluxPath& p,
                                  const std::function<double(double t, double y)>& primitive) {
  const Grid1D& g = yg.grid;
  const int n = g.cells();
  // B is constant outside the strip, frozen at its edge values
  auto B = [&](double t, double y) { return primitive(t, std::clamp(y, -0.5, 0.5)); };
  EnergyBound eb;
  double sup = 0, gronwall = 0;
  for (int k = 0; k <= p.steps(); ++k) {
    const double t = p.t[std::max(k - 1, 0)];  // drift of the step that produced slice k
    double s = 0;
    for (int i = 0; i < n; ++i) {
      double bi = B(t, g.center(i));
      double v = std::exp(-bi) * p.rho[k][i];
      s += yg.g_mass[i] * std::exp(bi) * v * v;
    }
    if (k == 0) eb.rhs = s;
    sup = std::max(sup, s);
    if (k == 0) continue;
    double dt = p.t[k] - p.t[k - 1];
    double diss = 0, dtb = 0;
    for (int f = 1; f < n; ++f) {
      double b0 = B(t, g.center(f - 1)), b1 = B(t, g.center(f));
      double v0 = std::exp(-b0) * p.rho[k][f - 1], v1 = std::exp(-b1) * p.rho[k][f];
      double d = g.center_gap(f);
      diss += d * std::exp(0.5 * (b0 + b1)) * (v1 - v0) * (v1 - v0) / (d * d);
    }
    for (int i = yg.strip_lo; i < yg.strip_hi; ++i)
      dtb = std::max(dtb, std::abs(B(p.t[k], g.center(i)) - B(t, g.center(i))));
    gronwall += dtb;
    eb.lhs += dt * diss;
  }
  eb.lhs += 0.5 * sup;
  eb.rhs *= std::exp(gronwall);
  return eb;
}

}  // namespace kramers
