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

#include "kramers/limit.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <memory>

#include "kramers/errors.hpp"
#include "kramers/grid.hpp"
#include "kramers/quadrature.hpp"
#include "kramers/transform.hpp"

namespace kramers {

TwoStatePath TwoStatePath::from_z(std::vector<double> t, std::vector<double> z) {
  if (t.size() != z.size() || t.size() < 2) throw StructureError("TwoStatePath: need matching t and z, >= 2 nodes");
  TwoStatePath p;
  p.t = std::move(t);
  p.z = std::move(z);
  p.z0 = p.z.front();
  p.j.resize(p.t.size() - 1);
  for (size_t k = 0; k + 1 < p.t.size(); ++k) p.j[k] = -(p.z[k + 1] - p.z[k]) / (p.t[k + 1] - p.t[k]);
  return p;
}

TwoStatePath TwoStatePath::sample(const std::function<double(double)>& z, double horizon, double dt) {
  int n = static_cast<int>(std::lround(horizon / dt));
  std::vector<double> t(n + 1), v(n + 1);
  for (int k = 0; k <= n; ++k) {
    t[k] = horizon * k / n;
    v[k] = z(t[k]);
  }
  return from_z(std::move(t), std::move(v));
}

void TwoStatePath::check_invariants() const {
  if (t.size() != z.size() || j.size() + 1 != t.size()) throw StructureError("TwoStatePath: shape mismatch");
  if (z.front() != z0) throw StructureError("TwoStatePath: z(0) differs from z0");
  for (size_t k = 0; k < z.size(); ++k)
    if (!(z[k] >= 0 && z[k] <= 1)) throw StructureError(fmt::format("TwoStatePath: z[{}] = {} outside [0, 1]", k, z[k]));
  for (size_t k = 0; k < j.size(); ++k) {
    double dt = t[k + 1] - t[k];
    if (!(dt > 0)) throw StructureError("TwoStatePath: time grid not increasing");
    if (j[k] < -1e-12) throw StructureError(fmt::format("TwoStatePath: z increases on interval {}", k));
    double fd = -(z[k + 1] - z[k]) / dt;
    if (std::abs(fd - j[k]) > 1e-9 * std::max(1.0, std::abs(fd)))
      throw StructureError(fmt::format("TwoStatePath: j[{}] inconsistent with z", k));
  }
}

double s_function(double a, double b) {
  if (a > 0 && b > 0) return a * std::log(a / b) - a + b;
  if (a == 0 && b >= 0) return b;
  return INFINITY;
}

double rate_limit(const TwoStatePath& p) {
  p.check_invariants();
  double s = 0;
  for (int k = 0; k < p.steps(); ++k) {
    double v = s_function(std::max(p.j[k], 0.0), p.z[k]);
    if (v == INFINITY) return INFINITY;
    s += v * (p.t[k + 1] - p.t[k]);
  }
  return 2 * s;
}

double rate_limit_dual(const TwoStatePath& p, const std::vector<TimeFunction>& family) {
  p.check_invariants();
  double best = family.empty() ? 0.0 : -INFINITY;
  for (const auto& f : family) {
    double s = 0;
    for (int k = 0; k < p.steps(); ++k) {
      double fk = f(p.t[k]);
      s += (p.t[k + 1] - p.t[k]) * (std::max(p.j[k], 0.0) * fk - p.z[k] * std::expm1(fk));
    }
    best = std::max(best, 2 * s);
  }
  double primal = rate_limit(p);
  if (best > primal + 1e-9 * std::max(1.0, primal))
    throw ViolationError(fmt::format("rate_limit_dual: {:.9e} exceeds rate_limit {:.9e}", best, primal));
  return best;
}

std::vector<TimeFunction> first_order_family(const TwoStatePath& p) {
  auto f = std::make_shared<std::vector<double>>(p.steps());
  for (int k = 0; k < p.steps(); ++k) {
    double j = std::max(p.j[k], 0.0);
    // e^{-50} stands in for the unbounded optimum when j vanishes
    (*f)[k] = (j > 0 && p.z[k] > 0) ? std::log(j / p.z[k]) : -50.0;
  }
  auto t = std::make_shared<std::vector<double>>(p.t);
  auto eval = [f, t](double s) {
    if (s >= t->back()) return 0.0;
    auto it = std::upper_bound(t->begin(), t->end(), s + 1e-12 * t->back());
    size_t k = static_cast<size_t>(std::max<std::ptrdiff_t>(it - t->begin() - 1, 0));
    return (*f)[std::min(k, f->size() - 1)];
  };
  std::vector<TimeFunction> fam{[](double) { return 0.0; }, eval};
  for (double lambda : {0.5, 0.9, 1.1})
    fam.push_back([eval, lambda](double s) { return lambda * eval(s); });
  return fam;
}

double optimal_u(double j, double z, double y) { return (0.5 - y) * (j * (y + 0.5) + z * (0.5 - y)); }

double s_integral_closed_form(double j, double z) {
  auto integrand = [&](double y) {
    double q = j * (y + 0.5) + z * (0.5 - y);
    double u = (0.5 - y) * q;
    double du = -q + (0.5 - y) * (j - z);
    if (u <= 0) return 0.0;
    return (j + du) * (j + du) / u;
  };
  std::vector<double> breaks;
  for (int i = 0; i <= 64; ++i) breaks.push_back(-0.5 + i / 64.0);
  return 0.25 * integrate(integrand, breaks, 16);
}

VariationalResult s_variational(double j, double z, int cells) {
  if (j < 0 || (j > 0 && z == 0)) throw InfiniteCost(fmt::format("s_variational: S({}|{}) is infinite", j, z));
  const int n = cells;
  const double h = 1.0 / n;
  VariationalResult r;
  r.y.resize(n + 1);
  r.u.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    r.y[i] = -0.5 + i * h;
    r.u[i] = optimal_u(j, z, r.y[i]);
  }
  r.u[0] = z;
  r.u[n] = 0;
  if (z == 0) {  // j = 0 as well: u = 0 is optimal
    std::fill(r.u.begin(), r.u.end(), 0.0);
    return r;
  }
  // cell term (h/4) a^2 / m with a = j + (u_{i+1} - u_i)/h, m = (u_i + u_{i+1})/2
  auto objective = [&](const std::vector<double>& u) -> double {
    double s = 0;
    for (int i = 0; i < n; ++i) {
      double a = j + (u[i + 1] - u[i]) / h, m = 0.5 * (u[i] + u[i + 1]);
      if (m <= 0) {
        if (a != 0) return INFINITY;
        continue;
      }
      s += 0.25 * h * a * a / m;
    }
    return s;
  };
  // free unknowns u_1..u_{n-2}; u_{n-1} stays at the closed form
  const int lo = 1, hi = n - 2;
  double val = objective(r.u);
  for (int it = 0; it < 50 && hi >= lo; ++it) {
    const int m = hi - lo + 1;
    std::vector<double> g(m, 0.0), dd(m, 0.0), sub(m, 0.0), sup(m, 0.0);
    for (int i = 0; i < n; ++i) {
      double a = j + (r.u[i + 1] - r.u[i]) / h, mm = 0.5 * (r.u[i] + r.u[i + 1]);
      // phi(a, m) = c a^2 / m with c = h/4
      double c = 0.25 * h;
      double pa = 2 * c * a / mm, pm = -c * a * a / (mm * mm);
      double paa = 2 * c / mm, pam = -2 * c * a / (mm * mm), pmm = 2 * c * a * a / (mm * mm * mm);
      // da/du_i = -1/h, da/du_{i+1} = 1/h, dm/du = 1/2
      double di[2] = {-1 / h, 1 / h};
      double e[2][2];
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          e[p][q] = paa * di[p] * di[q] + pam * 0.5 * (di[p] + di[q]) + pmm * 0.25;
      int idx[2] = {i - lo, i + 1 - lo};
      for (int p = 0; p < 2; ++p) {
        if (idx[p] < 0 || idx[p] >= m) continue;
        g[idx[p]] += pa * di[p] + pm * 0.5;
        dd[idx[p]] += e[p][p];
      }
      if (idx[0] >= 0 && idx[1] < m) {
        sup[idx[0]] += e[0][1];
        sub[idx[1]] += e[1][0];
      }
    }
    double gnorm = 0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < 1e-14) break;
    std::vector<double> step(m);
    for (int i = 0; i < m; ++i) step[i] = -g[i];
    solve_tridiagonal(sub, dd, sup, step);
    double lambda = 1;
    std::vector<double> trial = r.u;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, lambda *= 0.5) {
      bool positive = true;
      for (int i = 0; i < m; ++i) {
        trial[lo + i] = r.u[lo + i] + lambda * step[i];
        if (trial[lo + i] <= 0) positive = false;
      }
      if (!positive) continue;
      double tv = objective(trial);
      if (tv <= val) {
        accepted = tv < val;
        r.u = trial;
        val = tv;
        break;
      }
    }
    if (!accepted) break;
  }
  r.value = val;
  return r;
}

TwoStatePath regularize_z(const TwoStatePath& p, double eta) {
  const double T = p.horizon();
  const int n = p.steps();
  const double dt = T / n;
  const int r = std::max(1, static_cast<int>(std::ceil(eta / dt)));
  std::vector<double> w(2 * r + 1);
  double ws = 0;
  for (int m = -r; m <= r; ++m) ws += (w[m + r] = mollifier_profile(m * dt / eta));
  auto ext = [&](int k) { return p.z[std::clamp(k, 0, n)]; };
  std::vector<double> z(n + 1);
  for (int k = 0; k <= n; ++k) {
    double s = 0;
    for (int m = -r; m <= r; ++m) s += w[m + r] * ext(k - m);
    double zbar = 0.5 - p.t[k] / (4 * T);
    z[k] = eta * zbar + (1 - eta) * s / ws;
  }
  return TwoStatePath::from_z(p.t, std::move(z));
}

LimitProfile limit_profile(double z, double j, double y) {
  double q = j * (y + 0.5) + z * (0.5 - y);
  if (j == 0 && z == 0) throw DegenerateDenominator("limit_profile: j = z = 0");
  return {(0.5 - y) * q, 2 * (j - z) / q};
}

double limit_profile_primitive(double z, double j, double y) {
  if (j == 0 && z == 0) throw DegenerateDenominator("limit_profile_primitive: j = z = 0");
  double q = j * (y + 0.5) + z * (0.5 - y);
  return 2 * std::log(q / z);
}

std::vector<NamedProfile> profile_corpus(double dt) {
  const double z0 = 0.8, T = 1.0;
  std::vector<NamedProfile> c;
  c.push_back({"exp_rate1", TwoStatePath::sample([=](double t) { return z0 * std::exp(-t); }, T, dt)});
  c.push_back({"linear", TwoStatePath::sample([=](double t) { return z0 - 0.4 * t; }, T, dt)});
  c.push_back({"exp_rate2", TwoStatePath::sample([=](double t) { return z0 * std::exp(-2 * t); }, T, dt)});
  c.push_back({"exp_rate_half", TwoStatePath::sample([=](double t) { return z0 * std::exp(-0.5 * t); }, T, dt)});
  auto kinked = TwoStatePath::sample([=](double t) { return t < 0.5 ? z0 - 0.6 * t : 0.5 - 0.2 * (t - 0.5); }, T, dt);
  c.push_back({"kinked_regularized", regularize_z(kinked, 0.05)});
  return c;
}

}  // namespace kramers
