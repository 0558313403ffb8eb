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

#include "kramers/transform.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "kramers/quadrature.hpp"

namespace kramers {

namespace {

constexpr int kOrder = 16;

// Signed Gauss-Legendre integral of f over [a, b] (b may be below a).
template <class F>
double gl(F&& f, double a, double b) {
  const auto& g = GaussRule::get(kOrder);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b), s = 0;
  for (size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(mid + half * g.x[k]);
  return s * half;
}

struct Kahan {
  double s = 0, c = 0;
  void add(double v) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

}  // namespace

double mollifier_profile(double s) {
  if (std::abs(s) >= 1) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double BumpPair::chi_a(double x) const {
  return mollifier_profile((x - center_a) / (0.5 * support_a.length()));
}

double BumpPair::chi_b(double x) const {
  return mollifier_profile((x - center_b) / (0.5 * support_b.length()));
}

BumpPair bump_pair(const LandmarkReport& r) {
  BumpPair b;
  b.center_a = r.x_a;
  b.center_b = r.x_b;
  double ra = 0.9 * std::min(r.x_a - r.B_a.lo, r.B_a.hi - r.x_a);
  double rb = 0.9 * std::min(r.x_b - r.B_b.lo, r.B_b.hi - r.x_b);
  b.support_a = {r.x_a - ra, r.x_a + ra};
  b.support_b = {r.x_b - rb, r.x_b + rb};
  return b;
}

int TransformTable::node_below(double x) const {
  auto it = std::upper_bound(x_nodes.begin(), x_nodes.end(), x);
  int k = static_cast<int>(it - x_nodes.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(x_nodes.size()) - 2);
}

double TransformTable::dy_dx(double x) const { return std::exp(log_c + ctx.v(x) / ctx.eps); }

double TransformTable::y_at(double x) const {
  int k = node_below(x);
  return y_values[k] + gl([&](double s) { return dy_dx(s); }, x_nodes[k], x);
}

double TransformTable::mu_at(double x) const {
  const auto& r = ctx.landmarks;
  double v = ctx.v(x);
  double a = bumps.chi_a(x), b = bumps.chi_b(x);
  double out = 0;
  if (a > 0) out += a * std::exp(-(v - r.v_a) / ctx.eps - log_na);
  if (b > 0) out -= b * std::exp(-(v - r.v_b) / ctx.eps - log_nb);
  return out;
}

double TransformTable::m_at(double x) const {
  int k = node_below(x);
  return m_values[k] + gl([&](double s) { return mu_at(s); }, x_nodes[k], x);
}

double TransformTable::dphi_dx(double x) const { return dy_dx(x) * m_at(x); }

double TransformTable::phi_at(double x) const {
  int k = node_below(x);
  double xk = x_nodes[k], mk = m_values[k];
  return phi_values[k] + gl([&](double s) {
           double m = mk + gl([&](double q) { return mu_at(q); }, xk, s);
           return dy_dx(s) * m;
         }, xk, x);
}

double TransformTable::log_g_hat_at_x(double x) const {
  return std::log(ctx.eps) + ctx.log_tau - 2 * ctx.v(x) / ctx.eps - 2 * ctx.log_z_left;
}

std::vector<double> default_transform_nodes(const EpsilonContext& ctx, int count, double level) {
  const auto& r = ctx.landmarks;
  const double cut = r.v_b + level * ctx.eps;
  auto edge = [&](double from, double dir) {
    double a = from, step = 0.01;
    while (ctx.v(a + dir * step) < cut) {
      a += dir * step;
      step *= 1.2;
    }
    return bisect_root([&](double x) { return ctx.v(x) - cut; }, a, a + dir * step, 1e-13);
  };
  double lo = std::max(edge(r.x_a, -1), ctx.x_lo);
  double hi = std::min(edge(r.x_b, +1), ctx.x_hi);
  double fine = (hi - lo) / (2.0 * count);
  auto nodes = refined_breaks(lo, hi, {r.x_a, r.x_0, r.x_b}, 5 * std::sqrt(ctx.eps), fine, 8 * fine, 1.05);
  return nodes;
}

TransformTable build_transform(const EpsilonContext& ctx, int count) {
  return build_transform(ctx, default_transform_nodes(ctx, count));
}

TransformTable build_transform(const EpsilonContext& ctx, std::vector<double> x_nodes) {
  const auto& r = ctx.landmarks;
  TransformTable t;
  t.ctx = ctx;
  t.bumps = bump_pair(r);
  std::sort(x_nodes.begin(), x_nodes.end());
  x_nodes.erase(std::unique(x_nodes.begin(), x_nodes.end()), x_nodes.end());
  if (!std::binary_search(x_nodes.begin(), x_nodes.end(), r.x_0)) {
    x_nodes.insert(std::upper_bound(x_nodes.begin(), x_nodes.end(), r.x_0), r.x_0);
  }
  if (x_nodes.size() < 16 || x_nodes.front() > t.bumps.support_a.lo || x_nodes.back() < t.bumps.support_b.hi)
    throw GridMismatch("build_transform: nodes must cover both bump supports");
  t.x_nodes = std::move(x_nodes);
  const auto& xn = t.x_nodes;
  const int n = static_cast<int>(xn.size());
  const double eps = ctx.eps;

  t.log_c = ctx.log_z_left - std::log(eps) - ctx.log_tau;
  t.log_na = ctx.log_integral(
      [&](double x) { return std::log(t.bumps.chi_a(x)) - (ctx.v(x) - r.v_a) / eps; },
      t.bumps.support_a.lo, t.bumps.support_a.hi);
  t.log_nb = ctx.log_integral(
      [&](double x) { return std::log(t.bumps.chi_b(x)) - (ctx.v(x) - r.v_b) / eps; },
      t.bumps.support_b.lo, t.bumps.support_b.hi);

  t.m_values.assign(n, 0.0);
  {
    Kahan acc;
    for (int k = 1; k < n; ++k) {
      acc.add(gl([&](double s) { return t.mu_at(s); }, xn[k - 1], xn[k]));
      t.m_values[k] = acc.s;
    }
    // exact zero beyond the supports
    for (int k = 0; k < n; ++k)
      if (xn[k] <= t.bumps.support_a.lo || xn[k] >= t.bumps.support_b.hi) t.m_values[k] = 0.0;
  }

  const int k0 = static_cast<int>(std::lower_bound(xn.begin(), xn.end(), r.x_0) - xn.begin());
  t.y_values.assign(n, 0.0);
  t.phi_values.assign(n, 0.0);
  auto dphi = [&](int k, double s) {
    double m = t.m_values[k] + gl([&](double q) { return t.mu_at(q); }, xn[k], s);
    return t.dy_dx(s) * m;
  };
  {
    Kahan y, p;
    for (int k = k0 + 1; k < n; ++k) {
      y.add(gl([&](double s) { return t.dy_dx(s); }, xn[k - 1], xn[k]));
      p.add(gl([&](double s) { return dphi(k - 1, s); }, xn[k - 1], xn[k]));
      t.y_values[k] = y.s;
      t.phi_values[k] = p.s;
    }
  }
  {
    Kahan y, p;
    for (int k = k0 - 1; k >= 0; --k) {
      y.add(gl([&](double s) { return t.dy_dx(s); }, xn[k + 1], xn[k]));
      p.add(gl([&](double s) { return dphi(k, s); }, xn[k + 1], xn[k]));
      t.y_values[k] = y.s;
      t.phi_values[k] = p.s;
    }
  }
  for (int k = 1; k < n; ++k)
    if (!(t.y_values[k] > t.y_values[k - 1]))
      throw MonotonicityError(fmt::format("build_transform: y not increasing at node {}", k));
  t.g_ell_hat.resize(n);
  for (int k = 0; k < n; ++k) t.g_ell_hat[k] = std::exp(t.log_g_hat_at_x(xn[k]));
  return t;
}

double invert_y(const TransformTable& t, double y) {
  const auto& yv = t.y_values;
  if (!(y >= yv.front() && y <= yv.back()))
    throw RangeError(fmt::format("invert_y: y={} outside [{}, {}]", y, yv.front(), yv.back()));
  auto it = std::upper_bound(yv.begin(), yv.end(), y);
  int k = std::clamp(static_cast<int>(it - yv.begin()) - 1, 0, static_cast<int>(yv.size()) - 2);
  double lo = t.x_nodes[k], hi = t.x_nodes[k + 1];
  // Newton from the linear guess, safeguarded by the bracket.
  double x = lo + (hi - lo) * (y - yv[k]) / (yv[k + 1] - yv[k]);
  const double tol = 1e-12 * std::max(1.0, std::abs(y));
  for (int it2 = 0; it2 < 100; ++it2) {
    double r = t.y_at(x) - y;
    if (r > 0) hi = x; else lo = x;
    double nx = x - r / t.dy_dx(x);
    if (std::abs(r) <= tol) return nx > lo && nx < hi ? nx : x;  // one polishing step for flat y
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (nx == x) return x;
    x = nx;
  }
  return x;
}

double phi_identity_defect(const TransformTable& t) {
  double worst = 0;
  for (size_t k = 0; k < t.x_nodes.size(); ++k)
    worst = std::max(worst, std::abs(t.phi_values[k] - std::clamp(t.y_values[k], -0.5, 0.5)));
  return worst;
}

std::vector<double> gamma_left_cell_masses(const TransformTable& t, const std::vector<double>& y_faces) {
  const auto& c = t.ctx;
  const Interval yr = t.y_range();
  std::vector<double> xf(y_faces.size());
  for (size_t i = 0; i < y_faces.size(); ++i) {
    double y = std::clamp(y_faces[i], yr.lo, yr.hi);
    xf[i] = invert_y(t, y);
  }
  auto logf = [&](double x) { return -c.v(x) / c.eps - c.log_z_left; };
  std::vector<double> g(y_faces.size() - 1);
  for (size_t i = 0; i + 1 < xf.size(); ++i) {
    double a = xf[i], b = xf[i + 1];
    if (i == 0) a = c.x_lo;
    if (i + 2 == xf.size()) b = c.x_hi;
    g[i] = b > a ? std::exp(c.log_integral(logf, a, b)) : 0.0;
  }
  return g;
}

DensityFluxPath pushforward_pair(const TransformTable& t, const DensityFluxPath& p) {
  p.check_shape();
  const Interval xr = t.x_range();
  if (p.grid.faces.front() < xr.lo || p.grid.faces.back() > xr.hi)
    throw GridMismatch("pushforward_pair: path grid leaves the transform table");
  std::vector<double> yf(p.grid.faces.size());
  for (size_t i = 0; i < yf.size(); ++i) yf[i] = t.y_at(p.grid.faces[i]);
  DensityFluxPath q;
  q.t = p.t;
  q.grid = Grid1D::from_faces(std::move(yf));
  q.flux = p.flux;
  q.rho.resize(p.rho.size());
  for (size_t k = 0; k < p.rho.size(); ++k) {
    q.rho[k].resize(p.grid.cells());
    for (int i = 0; i < p.grid.cells(); ++i) q.rho[k][i] = p.rho[k][i] * p.grid.width(i) / q.grid.width(i);
  }
  return q;
}

DensityFluxPath pullback_pair(const TransformTable& t, const DensityFluxPath& p) {
  p.check_shape();
  std::vector<double> xf(p.grid.faces.size());
  for (size_t i = 0; i < xf.size(); ++i) xf[i] = invert_y(t, p.grid.faces[i]);
  DensityFluxPath q;
  q.t = p.t;
  q.grid = Grid1D::from_faces(std::move(xf));
  q.flux = p.flux;
  q.rho.resize(p.rho.size());
  for (size_t k = 0; k < p.rho.size(); ++k) {
    q.rho[k].resize(p.grid.cells());
    for (int i = 0; i < p.grid.cells(); ++i) q.rho[k][i] = p.rho[k][i] * p.grid.width(i) / q.grid.width(i);
  }
  return q;
}

}  // namespace kramers
