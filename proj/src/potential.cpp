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

#include "kramers/potential.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace kramers {

const char* clause_name(Clause c) {
  switch (c) {
    case Clause::DerivativeConsistency: return "derivative consistency";
    case Clause::CriticalPoints: return "two wells and a saddle";
    case Clause::LeftWellLevel: return "V(x_a) = 0";
    case Clause::DeepWell: return "V(x_b) = min V < 0";
    case Clause::IntermediateRange: return "V < V(x_0) on (x_a, x_b)";
    case Clause::SublevelStructure: return "{V <= 0} structure";
    case Clause::SaddleCurvature: return "V''(x_0) < 0";
    case Clause::OuterConvexity: return "uniform convexity on outer regions";
    case Clause::Ordering: return "landmark ordering";
  }
  return "unknown";
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a > b) std::swap(a, b);
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0) == (fb < 0)) throw Error("bisect_root: no sign change in bracket");
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::bisect(
      f, a, b, [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; }, iters);
  return 0.5 * (r.first + r.second);
}

namespace {

struct Crit {
  double x;
  bool is_min;
};

std::vector<double> probe_grid(const Interval& d, int n) {
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = d.lo + d.length() * i / (n - 1);
  return p;
}

// Zeros of f between consecutive probes, leftmost bracket first.
std::vector<double> sign_change_roots(const std::function<double(double)>& f,
                                      const std::vector<double>& p) {
  std::vector<double> roots;
  double f_prev = f(p[0]);
  for (size_t i = 1; i < p.size(); ++i) {
    double f_cur = f(p[i]);
    if (f_prev == 0.0) {
      roots.push_back(p[i - 1]);
    } else if ((f_prev < 0) != (f_cur < 0) && f_cur != 0.0) {
      roots.push_back(bisect_root(f, p[i - 1], p[i]));
    }
    f_prev = f_cur;
  }
  return roots;
}

// Walk from x in direction dir until v >= level, then bisect the crossing.
double level_crossing(const PotentialSpec& s, double x, double dir, double level, double step) {
  double a = x;
  for (int k = 0; k < 100000; ++k) {
    double b = a + dir * step;
    if (s.v(b) >= level) return bisect_root([&](double t) { return s.v(t) - level; }, a, b);
    a = b;
    step *= 1.05;
  }
  throw ValidationFailure(Clause::SublevelStructure, "sublevel set is unbounded");
}

}  // namespace

LandmarkReport validate(const PotentialSpec& spec, int probe_count) {
  if (probe_count < 1000) throw Error("validate: probe_count must be at least 1000");
  const Interval dom = spec.domain_hint;

  {
    const double h = 1e-5;
    auto p = probe_grid(dom, 1000);
    for (double x : p) {
      double d1 = (spec.v(x + h) - spec.v(x - h)) / (2 * h);
      double d2 = (spec.dv(x + h) - spec.dv(x - h)) / (2 * h);
      double g1 = spec.dv(x), g2 = spec.ddv(x);
      if (!std::isfinite(d1) || !std::isfinite(g1) || !std::isfinite(g2))
        throw ValidationFailure(Clause::DerivativeConsistency, fmt::format("non-finite at x={}", x));
      if (std::abs(d1 - g1) > 1e-6 * (1 + std::abs(g1)))
        throw ValidationFailure(Clause::DerivativeConsistency, fmt::format("dv mismatch at x={}", x));
      if (std::abs(d2 - g2) > 1e-6 * (1 + std::abs(g2)))
        throw ValidationFailure(Clause::DerivativeConsistency, fmt::format("ddv mismatch at x={}", x));
    }
  }

  const auto p = probe_grid(dom, probe_count);
  std::vector<Crit> crit;
  for (double r : sign_change_roots(spec.dv, p)) crit.push_back({r, spec.ddv(r) > 0 || spec.dv(r + 1e-7) > 0});

  LandmarkReport rep;
  auto first_min = std::find_if(crit.begin(), crit.end(), [](const Crit& c) { return c.is_min; });
  if (first_min == crit.end()) throw ValidationFailure(Clause::CriticalPoints, "no local minimum");
  auto saddle = std::find_if(first_min, crit.end(), [](const Crit& c) { return !c.is_min; });
  if (saddle == crit.end()) throw ValidationFailure(Clause::CriticalPoints, "no maximum right of x_a");
  rep.x_a = first_min->x;
  rep.x_0 = saddle->x;

  rep.v_a = spec.v(rep.x_a);
  if (std::abs(rep.v_a) > 1e-10)
    throw ValidationFailure(Clause::LeftWellLevel, fmt::format("V(x_a) = {:.3e}", rep.v_a));

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : crit)
    if (c.is_min && spec.v(c.x) < best - 1e-14) {
      best = spec.v(c.x);
      rep.x_b = c.x;
    }
  rep.v_b = spec.v(rep.x_b);
  double probe_min = rep.v_b;
  for (double x : p) probe_min = std::min(probe_min, spec.v(x));
  if (!(rep.v_b < -1e-10) || probe_min < rep.v_b - 1e-10 || rep.x_b <= rep.x_0)
    throw ValidationFailure(Clause::DeepWell, fmt::format("min V = {:.3e}", rep.v_b));

  rep.v_0 = spec.v(rep.x_0);
  for (double x : p) {
    if (x <= rep.x_a || x >= rep.x_b || std::abs(x - rep.x_0) < 1e-9) continue;
    if (spec.v(x) >= rep.v_0 + 1e-12)
      throw ValidationFailure(Clause::IntermediateRange,
                              fmt::format("V({:.4f}) = {:.4f} exceeds V(x_0) = {:.4f}", x, spec.v(x), rep.v_0));
  }
  rep.barrier = rep.v_0 - rep.v_a;

  // {V <= 0} right of x_0 must be one interval containing x_b.
  {
    std::vector<double> zeros;
    std::vector<double> right;
    for (double x : p)
      if (x > rep.x_0) right.push_back(x);
    if (right.size() < 2) throw ValidationFailure(Clause::SublevelStructure, "domain ends at saddle");
    zeros = sign_change_roots(spec.v, right);
    if (zeros.size() != 2 || !(zeros[0] < rep.x_b && zeros[1] > rep.x_b))
      throw ValidationFailure(Clause::SublevelStructure,
                              fmt::format("{} zero crossings right of x_0", zeros.size()));
    rep.x_bminus = zeros[0];
    rep.x_bplus = zeros[1];
    for (double x : p)
      if (x < rep.x_0 && std::abs(x - rep.x_a) > 1e-6 && spec.v(x) <= 0)
        throw ValidationFailure(Clause::SublevelStructure, fmt::format("V <= 0 at x={} left of x_0", x));
  }

  rep.ddv_a = spec.ddv(rep.x_a);
  rep.ddv_0 = spec.ddv(rep.x_0);
  rep.ddv_b = spec.ddv(rep.x_b);
  if (!(rep.ddv_0 < 0))
    throw ValidationFailure(Clause::SaddleCurvature, fmt::format("V''(x_0) = {:.3e}", rep.ddv_0));

  for (const auto& c : crit) {
    if (c.x == rep.x_a || c.x == rep.x_0 || c.x == rep.x_b) continue;
    if (c.x < rep.x_a || c.x > rep.x_b)
      throw ValidationFailure(Clause::OuterConvexity,
                              fmt::format("third critical point in outer region at x={:.4f}", c.x));
  }
  if (crit.size() != 3)
    throw ValidationFailure(Clause::IntermediateRange,
                            fmt::format("{} critical points, expected 3", crit.size()));

  std::vector<double> left_infl, right_infl;
  {
    auto infl = sign_change_roots(spec.ddv, p);
    for (double r : infl) {
      if (r > rep.x_a && r < rep.x_0) left_infl.push_back(r);
      if (r > rep.x_0 && r < rep.x_b) right_infl.push_back(r);
    }
  }
  if (left_infl.empty() || right_infl.empty())
    throw ValidationFailure(Clause::OuterConvexity, "no inflection between a well and the saddle");
  rep.x_cl = 0.5 * (rep.x_a + left_infl.front());
  double r_inf = right_infl.back();
  if (!(r_inf < rep.x_bminus))
    throw ValidationFailure(Clause::OuterConvexity, "convexity region does not reach x_bminus");
  rep.x_cr = 0.5 * (r_inf + rep.x_bminus);

  rep.alpha = std::numeric_limits<double>::infinity();
  rep.a_upper = -std::numeric_limits<double>::infinity();
  auto outer = [&](double x) {
    double c = spec.ddv(x);
    rep.alpha = std::min(rep.alpha, c);
    rep.a_upper = std::max(rep.a_upper, c);
  };
  for (double x : p)
    if (x <= rep.x_cl || x >= rep.x_cr) outer(x);
  outer(rep.x_cl);
  outer(rep.x_cr);
  if (!(rep.alpha > 0))
    throw ValidationFailure(Clause::OuterConvexity, fmt::format("min V'' = {:.3e} on outer regions", rep.alpha));

  const double level = rep.v_0 - 0.05 * rep.barrier;
  const double step = dom.length() / probe_count;
  rep.B_a = {level_crossing(spec, rep.x_a, -1, level, step), level_crossing(spec, rep.x_a, +1, level, step)};
  rep.B_b = {level_crossing(spec, rep.x_b, -1, level, step), level_crossing(spec, rep.x_b, +1, level, step)};
  rep.B_0 = {rep.B_a.hi, rep.B_b.lo};

  const double order[] = {rep.x_a, rep.x_cl, rep.x_0, rep.x_cr, rep.x_bminus, rep.x_b, rep.x_bplus};
  for (int i = 0; i + 1 < 7; ++i)
    if (!(order[i] < order[i + 1])) throw ValidationFailure(Clause::Ordering, fmt::format("landmark {} out of order", i));
  if (!(rep.B_a.hi < rep.x_0 && rep.B_b.lo > rep.x_0 && rep.B_b.lo < rep.x_bminus && rep.B_b.hi > rep.x_bplus))
    throw ValidationFailure(Clause::Ordering, "basin intervals do not bracket the landmarks");
  return rep;
}

PotentialSpec reference_potential(double depth, double tilt) {
  using B = ReferenceBox;
  if (!(depth >= B::depth_min && depth <= B::depth_max) ||
      !(tilt >= B::tilt_min_ratio * depth && tilt <= B::tilt_max_ratio * depth))
    throw AdmissibilityError(fmt::format(
        "reference_potential: (depth={}, tilt={}) outside the admissible box", depth, tilt));
  struct Wells {
    double depth, tilt, soft;
    // weights of the two branches, value, slope and curvature of the soft minimum
    std::array<double, 3> eval(double x) const {
      const double ua = x + 1, ub = x - 1, r = std::sqrt(1 + ub * ub);
      const double pa = depth * (1.75 * ua * ua + ua * ua * ua * ua);
      const double dpa = depth * (3.5 * ua + 4 * ua * ua * ua);
      const double ddpa = depth * (3.5 + 12 * ua * ua);
      const double pb = depth * (0.5 * ub * ub + 3 * (r - 1)) - tilt;
      const double dpb = depth * (ub + 3 * ub / r);
      const double ddpb = depth * (1 + 3 / (r * r * r));
      const double a = -pa / soft, b = -pb / soft, m = std::max(a, b);
      const double ea = std::exp(a - m), eb = std::exp(b - m), z = ea + eb;
      const double wa = ea / z, wb = eb / z;
      const double dd = dpa - dpb;
      return {-soft * (m + std::log(z)), wa * dpa + wb * dpb, wa * ddpa + wb * ddpb - wa * wb * dd * dd / soft};
    }
  };
  const Wells w{depth, tilt, 0.5 * depth};
  std::function<double(double)> dw = [w](double x) { return w.eval(x)[1]; };
  // left minimum: first upward crossing of V' on a scan from the left
  double xa = NAN;
  for (double x = -3.0; x < 0.0; x += 1e-3)
    if (dw(x) < 0 && dw(x + 1e-3) >= 0) {
      xa = bisect_root(dw, x, x + 1e-3);
      break;
    }
  if (std::isnan(xa)) throw AdmissibilityError("reference_potential: no left well");
  const double shift = w.eval(xa)[0];

  PotentialSpec s;
  s.v = [w, shift](double x) { return w.eval(x)[0] - shift; };
  s.dv = dw;
  s.ddv = [w](double x) { return w.eval(x)[2]; };
  s.domain_hint = {-2.5, 2.5};
  s.name = fmt::format("reference(depth={}, tilt={})", depth, tilt);
  return s;
}

PotentialSpec quartic_potential(double depth, double tilt) {
  if (!(depth > 0 && tilt > 0)) throw AdmissibilityError("quartic_potential: need depth, tilt > 0");
  auto w = [depth, tilt](double x) { return depth * (x * x - 1) * (x * x - 1) - tilt * (x - x * x * x / 3); };
  const double shift = w(-1.0);
  PotentialSpec s;
  s.v = [w, shift](double x) { return w(x) - shift; };
  s.dv = [depth, tilt](double x) { return (x * x - 1) * (4 * depth * x + tilt); };
  s.ddv = [depth, tilt](double x) { return 12 * depth * x * x + 2 * tilt * x - 4 * depth; };
  s.domain_hint = {-2.5, 2.5};
  s.name = fmt::format("quartic(depth={}, tilt={})", depth, tilt);
  return s;
}

PotentialSpec polynomial_potential(std::vector<double> c, Interval domain_hint, bool shift_to_left_well) {
  if (c.size() < 3) throw AdmissibilityError("polynomial_potential: need degree >= 2");
  auto eval = [](const std::vector<double>& k, double x) {
    double r = 0;
    for (size_t i = k.size(); i-- > 0;) r = r * x + k[i];
    return r;
  };
  std::vector<double> d1, d2;
  for (size_t i = 1; i < c.size(); ++i) d1.push_back(c[i] * i);
  for (size_t i = 1; i < d1.size(); ++i) d2.push_back(d1[i] * i);
  if (shift_to_left_well) {
    std::function<double(double)> f = [&](double x) { return eval(d1, x); };
    std::function<double(double)> g = [&](double x) { return eval(d2, x); };
    auto roots = sign_change_roots(f, probe_grid(domain_hint, 20000));
    for (double r : roots)
      if (g(r) > 0 || f(r + 1e-7) > 0) {
        c[0] -= eval(c, r);
        break;
      }
  }
  PotentialSpec s;
  s.v = [c, eval](double x) { return eval(c, x); };
  s.dv = [d1, eval](double x) { return eval(d1, x); };
  s.ddv = [d2, eval](double x) { return eval(d2, x); };
  s.domain_hint = domain_hint;
  s.name = "polynomial";
  return s;
}

}  // namespace kramers
