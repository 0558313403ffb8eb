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

#include "kramers/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <memory>
#include <unordered_map>

#include "kramers/quadrature.hpp"
#include "kramers/sg.hpp"
#include "kramers/transform.hpp"

namespace kramers {

namespace {

std::pair<int, int> region_cells(const Grid1D& g, Interval region) {
  int lo = g.cells(), hi = -1;
  for (int i = 0; i < g.cells(); ++i)
    if (region.contains(g.center(i))) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  return {lo, hi};
}

// Localized entropy from linear mu masses and log nu masses on cells [lo, hi].
double localized_entropy(const std::vector<double>& mu, const std::vector<double>& log_nu, int lo, int hi) {
  if (hi < lo) return 0.0;
  double s = 0, m = 0;
  LogSum ln;
  for (int i = lo; i <= hi; ++i) {
    ln.add(log_nu[i]);
    if (mu[i] <= kZeroDensity) continue;
    if (log_nu[i] == -INFINITY) return INFINITY;
    s += mu[i] * (std::log(mu[i]) - log_nu[i]);
    m += mu[i];
  }
  if (m <= 0) return 0.0;
  return s - m * (std::log(m) - ln.value());
}

// log-mean of a and b, zero when either vanishes
double log_mean(double a, double b) {
  if (a <= kZeroDensity || b <= kZeroDensity) return 0.0;
  double r = b / a;
  if (std::abs(r - 1) < 1e-6) return a * (1 + 0.5 * (r - 1) - (r - 1) * (r - 1) / 12.0);
  return (b - a) / std::log(r);
}

struct FaceState {
  double J;        // exponentially fitted flux of the slice
  double rho_hat;  // interface density consistent with J = -eps tau rho_hat d_x log u
  double dlog_u;   // log u_f - log u_{f-1}
};

FaceState face_state(const SgStencil& s, const std::vector<double>& rho, int f) {
  double a = s.bp[f] * rho[f - 1], b = s.bm[f] * rho[f];
  FaceState st;
  st.J = s.coeff / s.d[f] * (a - b);
  st.rho_hat = log_mean(a, b);
  st.dlog_u = (a > kZeroDensity && b > kZeroDensity) ? std::log(b / a) : 0.0;
  return st;
}

std::vector<double> midpoint_slice(const DensityFluxPath& p, int k) {
  std::vector<double> m(p.rho[k].size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (p.rho[k][i] + p.rho[k + 1][i]);
  return m;
}

double quadratic_over_density(double num, double rho_hat, double coeff, const char* what) {
  if (num == 0.0) return 0.0;
  if (rho_hat <= kZeroDensity) throw SingularDensity(fmt::format("{}: zero density meets nonzero flux", what));
  return num * num / (coeff * rho_hat);
}

}  // namespace

double relative_entropy(const Grid1D& g, const std::vector<double>& mu, const std::vector<double>& nu,
                        Interval region) {
  auto [lo, hi] = region_cells(g, region);
  std::vector<double> ln(nu.size());
  for (size_t i = 0; i < nu.size(); ++i) ln[i] = nu[i] > 0 ? std::log(nu[i]) : -INFINITY;
  return localized_entropy(mu, ln, lo, hi);
}

double fisher_information(const Grid1D& g, const std::vector<double>& mu, const std::vector<double>& nu,
                          Interval region) {
  auto [lo, hi] = region_cells(g, region);
  if (hi <= lo) return 0.0;
  std::vector<double> s(hi - lo + 1);
  for (int i = lo; i <= hi; ++i) {
    if (nu[i] <= 0) {
      if (mu[i] > kZeroDensity) return INFINITY;
      s[i - lo] = 0;
    } else {
      s[i - lo] = std::sqrt(std::max(mu[i], 0.0) / nu[i]);
    }
  }
  double r = 0;
  for (int i = lo; i <= hi; ++i) {
    int a = std::max(i - 1, lo), b = std::min(i + 1, hi);
    double ds = (s[b - lo] - s[a - lo]) / (g.center(b) - g.center(a));
    r += nu[i] * ds * ds;
  }
  return 2 * r;
}

std::vector<double> log_gamma_cell_masses(const EpsilonContext& ctx, const Grid1D& g) {
  std::vector<double> out(g.cells());
  for (int i = 0; i < g.cells(); ++i) out[i] = std::log(g.width(i)) - ctx.v(g.center(i)) / ctx.eps;
  return out;
}

std::vector<double> discrete_gamma_density(const EpsilonContext& ctx, const Grid1D& g) {
  auto lm = log_gamma_cell_masses(ctx, g);
  LogSum s;
  for (double v : lm) s.add(v);
  std::vector<double> rho(g.cells());
  for (int i = 0; i < g.cells(); ++i) rho[i] = std::exp(lm[i] - s.value()) / g.width(i);
  return rho;
}

double energy(const EpsilonContext& ctx, const Grid1D& g, const std::vector<double>& rho) {
  std::vector<double> m(g.cells());
  for (int i = 0; i < g.cells(); ++i) m[i] = rho[i] * g.width(i);
  return localized_entropy(m, log_gamma_cell_masses(ctx, g), 0, g.cells() - 1);
}

double rate_primal(const EpsilonContext& ctx, const DensityFluxPath& p) {
  p.check_shape();
  const auto s = SgStencil::build(ctx, p.grid);
  const int n = p.grid.cells();
  double total = 0;
  for (int k = 0; k < p.steps(); ++k) {
    const double dt = p.t[k + 1] - p.t[k];
    const auto rho = midpoint_slice(p, k);
    const auto& j = p.flux[k + 1];
    double acc = 0;
    for (int f = 1; f < n; ++f) {
      auto st = face_state(s, rho, f);
      acc += s.d[f] * quadratic_over_density(j[f] - st.J, st.rho_hat, s.coeff, "rate_primal");
    }
    // boundary faces carry no exponentially fitted flux
    acc += 0.5 * p.grid.width(0) * quadratic_over_density(j[0], rho[0], s.coeff, "rate_primal");
    acc += 0.5 * p.grid.width(n - 1) * quadratic_over_density(j[n], rho[n - 1], s.coeff, "rate_primal");
    total += 0.5 * dt * acc;
  }
  return total;
}

EdpSplit rate_edp_split(const EpsilonContext& ctx, const DensityFluxPath& p) {
  p.check_shape();
  const auto s = SgStencil::build(ctx, p.grid);
  const int n = p.grid.cells();
  EdpSplit out;
  const double e0 = energy(ctx, p.grid, p.rho.front());
  if (!std::isfinite(e0)) throw SingularDensity("rate_edp_split: infinite initial energy");
  out.delta_e = energy(ctx, p.grid, p.rho.back()) - e0;
  for (int k = 0; k < p.steps(); ++k) {
    const double dt = p.t[k + 1] - p.t[k];
    const auto rho = midpoint_slice(p, k);
    const auto& j = p.flux[k + 1];
    double kin = 0, slope = 0;
    for (int f = 1; f < n; ++f) {
      auto st = face_state(s, rho, f);
      kin += s.d[f] * quadratic_over_density(j[f], st.rho_hat, s.coeff, "rate_edp_split");
      slope += s.d[f] * quadratic_over_density(st.J, st.rho_hat, s.coeff, "rate_edp_split");
    }
    kin += 0.5 * p.grid.width(0) * quadratic_over_density(j[0], rho[0], s.coeff, "rate_edp_split");
    kin += 0.5 * p.grid.width(n - 1) * quadratic_over_density(j[n], rho[n - 1], s.coeff, "rate_edp_split");
    out.kinetic += 0.5 * dt * kin;
    out.slope += 0.5 * dt * slope;
  }
  out.total = out.delta_e + out.kinetic + out.slope;
  return out;
}

double rate_dual_single(const EpsilonContext& ctx, const DensityFluxPath& p, const TestFunction& b) {
  p.check_shape();
  const auto s = SgStencil::build(ctx, p.grid);
  const int n = p.grid.cells();
  double total = 0;
  for (int k = 0; k < p.steps(); ++k) {
    const double dt = p.t[k + 1] - p.t[k];
    const double tm = 0.5 * (p.t[k] + p.t[k + 1]);
    const auto rho = midpoint_slice(p, k);
    const auto& j = p.flux[k + 1];
    double acc = 0;
    for (int f = 1; f < n; ++f) {
      double bf = b(tm, p.grid.faces[f]);
      if (bf == 0.0) continue;
      auto st = face_state(s, rho, f);
      acc += s.d[f] * ((j[f] - st.J) * bf - 0.5 * s.coeff * st.rho_hat * bf * bf);
    }
    total += dt * acc;
  }
  return total;
}

double rate_dual(const EpsilonContext& ctx, const DensityFluxPath& p, const std::vector<TestFunction>& family) {
  double best = -INFINITY;
  for (const auto& b : family) best = std::max(best, rate_dual_single(ctx, p, b));
  return family.empty() ? 0.0 : best;
}

TestFunction optimal_test_function(const EpsilonContext& ctx, const DensityFluxPath& p) {
  p.check_shape();
  const auto s = SgStencil::build(ctx, p.grid);
  const int n = p.grid.cells();
  auto table = std::make_shared<std::vector<std::vector<double>>>(p.steps(), std::vector<double>(n + 1, 0.0));
  auto mids = std::make_shared<std::vector<double>>(p.steps());
  for (int k = 0; k < p.steps(); ++k) {
    (*mids)[k] = 0.5 * (p.t[k] + p.t[k + 1]);
    const auto rho = midpoint_slice(p, k);
    for (int f = 1; f < n; ++f) {
      auto st = face_state(s, rho, f);
      if (st.rho_hat > kZeroDensity) (*table)[k][f] = (p.flux[k + 1][f] - st.J) / (s.coeff * st.rho_hat);
    }
  }
  auto faces = std::make_shared<std::vector<double>>(p.grid.faces);
  return [table, mids, faces](double t, double x) {
    auto nearest = [](const std::vector<double>& v, double q) {
      auto it = std::lower_bound(v.begin(), v.end(), q);
      size_t i = static_cast<size_t>(it - v.begin());
      if (i == v.size()) return v.size() - 1;
      if (i > 0 && std::abs(v[i - 1] - q) < std::abs(v[i] - q)) return i - 1;
      return i;
    };
    return (*table)[nearest(*mids, t)][nearest(*faces, x)];
  };
}

TestFunction committor_test_function(const TransformTable& table, std::function<double(double)> psi) {
  auto cache = std::make_shared<std::unordered_map<double, std::pair<double, double>>>();
  auto tab = std::make_shared<TransformTable>(table);
  return [cache, tab, psi](double t, double x) {
    auto it = cache->find(x);
    if (it == cache->end()) {
      double pt = 0.5 - tab->phi_at(x);
      double dpt = -tab->dphi_dx(x);
      it = cache->emplace(x, std::make_pair(pt, dpt)).first;
    }
    double ps = psi(t);
    return 2 * ps * it->second.second / (1 + ps * it->second.first);
  };
}

std::vector<TestFunction> polynomial_bump_family(Interval support, int degree, double horizon) {
  std::vector<TestFunction> fam;
  const double c = 0.5 * (support.lo + support.hi), r = 0.5 * support.length();
  for (int k = 0; k <= degree; ++k)
    for (int q = 0; q < 2; ++q)
      for (double sign : {1.0, -1.0})
        fam.push_back([=](double t, double x) {
          double s = (x - c) / r;
          double time = q == 0 ? 1.0 : 1.0 - t / horizon;
          return sign * time * std::pow(s, k) * mollifier_profile(s);
        });
  return fam;
}

double rate_transformed(const DensityFluxPath& p) {
  p.check_shape();
  const int n = p.grid.cells();
  double total = 0;
  for (int k = 1; k <= p.steps(); ++k) {
    const double dt = p.t[k] - p.t[k - 1];
    const auto& u = p.rho[k];
    const auto& j = p.flux[k];
    double acc = 0;
    for (int f = 1; f < n; ++f) {
      double d = p.grid.center_gap(f);
      double num = j[f] + (u[f] - u[f - 1]) / d;
      double ub = 0.5 * (u[f] + u[f - 1]);
      acc += d * quadratic_over_density(num, ub, 1.0, "rate_transformed");
    }
    total += 0.5 * dt * acc;
  }
  return total;
}

LsiResult lsi_check(const Grid1D& g, const std::vector<double>& mu, const std::function<double(double)>& w,
                    Interval region, double alpha) {
  std::vector<double> nu(g.cells());
  for (int i = 0; i < g.cells(); ++i) nu[i] = g.width(i) * std::exp(-w(g.center(i)));
  LsiResult r;
  r.entropy = relative_entropy(g, mu, nu, region);
  r.fisher = fisher_information(g, mu, nu, region);
  if (r.fisher == INFINITY) {
    r.ratio = 0;
    return r;
  }
  r.ratio = r.fisher > 0 ? alpha * r.entropy / r.fisher : 0.0;
  if (alpha * r.entropy > r.fisher * (1 + 1e-6) + 1e-14)
    throw ViolationError(fmt::format("lsi_check: alpha*E = {:.6e} exceeds R = {:.6e}", alpha * r.entropy, r.fisher));
  return r;
}

double concentration_bound(const Grid1D& g, const std::vector<double>& mu, const std::vector<double>& nu,
                           Interval a1, Interval a2) {
  double nu1 = 0, nu2 = 0, mu1 = 0, mu2 = 0;
  for (int i = 0; i < g.cells(); ++i) {
    double c = g.center(i);
    if (a1.contains(c)) {
      nu1 += nu[i];
      mu1 += mu[i];
    }
    if (a2.contains(c)) {
      nu2 += nu[i];
      mu2 += mu[i];
    }
  }
  if (!(nu1 > 0) || !(nu2 > nu1)) throw DegenerateBound("concentration_bound: need nu(a2) > nu(a1) > 0");
  double e = relative_entropy(g, mu, nu, a2);
  double bound = (e + mu2) / std::log(nu2 / nu1);
  if (mu1 > bound + 1e-12)
    throw ViolationError(fmt::format("concentration_bound: mu(a1) = {:.6e} > bound {:.6e}", mu1, bound));
  return bound;
}

double GridFunction::at(double s) const {
  auto it = std::upper_bound(x.begin(), x.end(), s);
  size_t i = std::clamp<size_t>(static_cast<size_t>(it - x.begin()), 1, x.size() - 1);
  double t = (s - x[i - 1]) / (x[i] - x[i - 1]);
  return f[i - 1] + t * (f[i] - f[i - 1]);
}

double poincare_constant(Interval iv) {
  double l = iv.length();
  return std::max({2 * l, 2 / l, 2.0});
}

PoincareResult poincare_check(const GridFunction& f, const AtomicMeasure& mu, Interval iv) {
  double mass = 0, l2mu = 0;
  for (size_t i = 0; i < mu.x.size(); ++i)
    if (iv.contains(mu.x[i])) {
      double v = f.at(mu.x[i]);
      mass += mu.w[i];
      l2mu += mu.w[i] * v * v;
    }
  if (!(mass > 0)) throw EmptyMeasure("poincare_check: mu(I) = 0");
  double sup = 0, grad = 0;
  for (size_t i = 0; i < f.x.size(); ++i) {
    if (iv.contains(f.x[i])) sup = std::max(sup, std::abs(f.f[i]));
    if (i > 0) {
      double a = std::max(f.x[i - 1], iv.lo), b = std::min(f.x[i], iv.hi);
      if (b > a) {
        double s = (f.f[i] - f.f[i - 1]) / (f.x[i] - f.x[i - 1]);
        grad += s * s * (b - a);
      }
    }
  }
  sup = std::max({sup, std::abs(f.at(iv.lo)), std::abs(f.at(iv.hi))});
  PoincareResult r{sup * sup, poincare_constant(iv) * (grad + l2mu / mass)};
  if (r.lhs > r.rhs * (1 + 1e-12))
    throw ViolationError(fmt::format("poincare_check: {:.6e} > {:.6e}", r.lhs, r.rhs));
  return r;
}

}  // namespace kramers
