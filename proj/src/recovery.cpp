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

#include "kramers/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "kramers/errors.hpp"
#include "kramers/quadrature.hpp"
#include "kramers/transform.hpp"

namespace kramers {

namespace {

constexpr double kRampHalfWidth = 3.0 / 16.0;
constexpr double kMollifierScale = 1.0 / 16.0;

// Linear ramp from 0 at -3/16 to 1 at 3/16, mollified at scale 1/16; exactly
// 0 below -1/4 and 1 above 1/4.
double smoothed_ramp(double y) {
  if (y <= -kRampHalfWidth - kMollifierScale) return 0.0;
  if (y >= kRampHalfWidth + kMollifierScale) return 1.0;
  static const double norm = integrate(mollifier_profile, {-1.0, -0.5, 0.0, 0.5, 1.0}, 16);
  auto ramp = [](double s) { return std::clamp((s + kRampHalfWidth) / (2 * kRampHalfWidth), 0.0, 1.0); };
  auto f = [&](double s) { return ramp(y - kMollifierScale * s) * mollifier_profile(s); };
  return integrate(f, {-1.0, -0.5, 0.0, 0.5, 1.0}, 16) / norm;
}

struct StepData {
  double z, j;
};

StepData step_data(const TwoStatePath& p, double t) {
  const double dt = p.t[1] - p.t[0];
  int k = std::clamp(static_cast<int>(std::floor(t / dt + 1e-9)), 0, p.steps() - 1);
  return {p.z[k], p.j[k]};
}

}  // namespace

InitialData build_initial_data(const EpsilonContext& ctx, const YGrid& yg, double z0) {
  if (!(z0 > 0 && z0 < 1)) throw RangeError("build_initial_data: z0 must lie in (0, 1)");
  const Grid1D& g = yg.grid;
  const int n = g.cells();
  const double ratio = std::exp(ctx.log_z_left - ctx.log_z);  // Z^l / Z
  std::vector<double> ramp(n);
  KahanSum total_g, ramp_g;
  for (int i = 0; i < n; ++i) {
    ramp[i] = smoothed_ramp(g.center(i));
    total_g.add(yg.g_mass[i]);
    ramp_g.add(yg.g_mass[i] * ramp[i]);
  }
  // mass(r0) = z0 sum G + (r0 - z0) sum G R is affine; the closed form loses
  // digits to cancellation when Z / Z^l is large, so Newton-correct it.
  double r0 = z0 + (1 - z0 * total_g.value()) / ramp_g.value();
  InitialData d;
  d.u.resize(n);
  KahanSum mass, left, ent;
  for (int pass = 0; pass < 4; ++pass) {
    mass = KahanSum();
    for (int i = 0; i < n; ++i) {
      d.u[i] = z0 + (r0 - z0) * ramp[i];
      mass.add(yg.g_mass[i] * d.u[i]);
    }
    if (std::abs(mass.value() - 1) <= 1e-14) break;
    r0 += (1 - mass.value()) / ramp_g.value();
  }
  d.a_eps = r0 / ratio - 1 + z0;
  if (!(std::abs(d.a_eps) <= 0.5))
    throw TuningFailure(fmt::format("build_initial_data: a_eps = {:.4f} outside [-1/2, 1/2] at eps = {}", d.a_eps, ctx.eps));
  for (int i = 0; i < n; ++i) {
    double m = yg.g_mass[i] * d.u[i];
    if (g.center(i) < 0) left.add(m);
    if (m > 0) ent.add(m * std::log(d.u[i] / ratio));
  }
  d.mass = mass.value();
  d.left_mass = left.value();
  d.initial_energy = ctx.eps * ent.value();
  for (double v : d.u)
    if (!(v > 0 && v <= 1)) throw ViolationError(fmt::format("build_initial_data: value {} outside (0, 1]", v));
  if (std::abs(d.mass - 1) > 1e-12) throw ViolationError(fmt::format("build_initial_data: mass {:.15f}", d.mass));
  return d;
}

RecoveryBundle recovery_pair(const EpsilonContext& ctx, const TransformTable& table, const YGrid& yg,
                             const TwoStatePath& z_path, const SolverConfig& cfg) {
  z_path.check_invariants();
  RecoveryBundle b;
  b.eps = ctx.eps;
  b.z_path = z_path;
  b.ygrid = yg;
  b.initial = build_initial_data(ctx, yg, z_path.z0);
  for (int k = 0; k < z_path.steps(); ++k)
    if (!(z_path.z[k] > 0 && z_path.j[k] > 0))
      throw StructureError("recovery_pair: z path must be regularized (z > 0, -z' > 0)");

  DriftField drift = [&z_path](double t, double y) {
    auto s = step_data(z_path, t);
    return limit_profile(s.z, s.j, y).b0;
  };
  SolverConfig c = cfg;
  c.dt = z_path.t[1] - z_path.t[0];
  c.grid = yg.grid;
  b.u_path = solve_weighted_heat_y(yg, b.initial.u, drift, c, z_path.horizon());

  const Grid1D& g = yg.grid;
  KahanSum rate;
  for (int k = 1; k <= b.u_path.steps(); ++k) {
    const double t = b.u_path.t[k - 1], dt = b.u_path.t[k] - t;
    const auto& u = b.u_path.rho[k];
    double acc = 0;
    for (int f = 1; f < g.cells(); ++f) {
      if (yg.taper[f] == 0.0) continue;
      double bf = yg.taper[f] * drift(t, g.faces[f]);
      acc += g.center_gap(f) * bf * bf * 0.5 * (u[f - 1] + u[f]);
    }
    rate.add(0.5 * dt * acc);
  }
  b.rate_value = rate.value();

  DensityFluxPath mass_path = b.u_path;
  for (auto& slice : mass_path.rho)
    for (int i = 0; i < g.cells(); ++i) slice[i] *= yg.g_mass[i] / g.width(i);
  b.x_path = pullback_pair(table, mass_path);

  b.energy_bound = weighted_energy_bound(yg, b.u_path, [&z_path](double t, double y) {
    auto s = step_data(z_path, t);
    return limit_profile_primitive(s.z, s.j, y);
  });
  return b;
}

TraceReport verify_boundary_traces(const RecoveryBundle& b) {
  TraceReport r;
  const auto& yg = b.ygrid;
  const Grid1D& g = yg.grid;
  for (int k = 1; k <= b.u_path.steps(); ++k) {
    const auto& u = b.u_path.rho[k];
    auto s = step_data(b.z_path, b.u_path.t[k - 1]);
    const double el = std::abs(u[yg.strip_lo - 1] - b.z_path.z[k]), er = std::abs(u[yg.strip_hi]);
    r.left = std::max(r.left, el);
    r.right = std::max(r.right, er);
    if (b.u_path.t[k] >= 0.75 * b.u_path.t.back() - 1e-12) {
      r.left_late = std::max(r.left_late, el);
      r.right_late = std::max(r.right_late, er);
    }
    double acc = 0;
    for (int i = yg.strip_lo; i < yg.strip_hi; ++i) {
      double e = u[i] - limit_profile(s.z, s.j, g.center(i)).u0;
      acc += g.width(i) * e * e;
    }
    r.l2_strip += (b.u_path.t[k] - b.u_path.t[k - 1]) * acc;
  }
  r.l2_strip = std::sqrt(r.l2_strip);
  return r;
}

}  // namespace kramers
