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

#include "kramers/quadrature.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "kramers/errors.hpp"

namespace kramers {

const GaussRule& GaussRule::get(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 2 || n > 64) throw Error("GaussRule: order must be in [2, 64]");
  GaussRule r;
  for (double z : boost::math::legendre_p_zeros<double>(n)) {
    double dp = boost::math::legendre_p_prime(n, z);
    double w = 2.0 / ((1 - z * z) * dp * dp);
    if (z == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(w);
    } else {
      r.x.push_back(-z);
      r.w.push_back(w);
      r.x.push_back(z);
      r.w.push_back(w);
    }
  }
  return cache.emplace(n, std::move(r)).first->second;
}

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void LogSum::add(double t) {
  if (t == -INFINITY) return;
  if (t <= m_) {
    s_ += std::exp(t - m_);
  } else {
    s_ = s_ * std::exp(m_ - t) + 1.0;
    m_ = t;
  }
}

double LogSum::value() const { return s_ > 0 ? m_ + std::log(s_) : -INFINITY; }

double log_integrate(const std::function<double(double)>& logf, const std::vector<double>& breaks,
                     int order) {
  const auto& g = GaussRule::get(order);
  LogSum acc;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    double half = 0.5 * (b - a), mid = 0.5 * (a + b), lh = std::log(half);
    for (size_t k = 0; k < g.x.size(); ++k) acc.add(logf(mid + half * g.x[k]) + std::log(g.w[k]) + lh);
  }
  return acc.value();
}

static std::vector<double> bisect_panels(const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(2 * b.size());
  for (size_t i = 0; i + 1 < b.size(); ++i) {
    out.push_back(b[i]);
    out.push_back(0.5 * (b[i] + b[i + 1]));
  }
  out.push_back(b.back());
  return out;
}

LogQuad log_integrate_adaptive(const std::function<double(double)>& logf, std::vector<double> breaks,
                               int order, double rel_tol, int max_levels) {
  double coarse = log_integrate(logf, breaks, order);
  for (int level = 0; level < max_levels; ++level) {
    breaks = bisect_panels(breaks);
    double fine = log_integrate(logf, breaks, order);
    double err = (coarse == -INFINITY && fine == -INFINITY) ? 0.0 : std::abs(std::expm1(coarse - fine));
    if (!std::isfinite(fine)) throw QuadratureError("log_integrate_adaptive: non-finite value");
    if (err <= rel_tol) return {fine, err};
    coarse = fine;
  }
  throw QuadratureError("log_integrate_adaptive: refinement did not reach tolerance");
}

double integrate(const std::function<double(double)>& f, const std::vector<double>& breaks, int order) {
  const auto& g = GaussRule::get(order);
  double s = 0, comp = 0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double panel = 0;
    for (size_t k = 0; k < g.x.size(); ++k) panel += g.w[k] * f(mid + half * g.x[k]);
    double y = panel * half - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

std::vector<double> refined_breaks(double lo, double hi, const std::vector<double>& centers, double radius,
                                   double fine, double coarse, double growth) {
  auto width_at = [&](double x) {
    double d = INFINITY;
    for (double c : centers) d = std::min(d, std::abs(x - c));
    if (d <= radius) return fine;
    // geometric growth with distance from the refined zone
    double w = fine;
    double s = radius;
    while (s < d && w < coarse) {
      s += w;
      w *= growth;
    }
    return std::min(w, coarse);
  };
  std::vector<double> b{lo};
  double x = lo;
  while (x < hi) {
    double w = width_at(x);
    double nx = x + w;
    if (nx > hi - 0.25 * w) nx = hi;
    b.push_back(nx);
    x = nx;
  }
  return b;
}

std::vector<double> clip_breaks(const std::vector<double>& breaks, double a, double b) {
  std::vector<double> out{a};
  for (double x : breaks)
    if (x > a && x < b) out.push_back(x);
  out.push_back(b);
  return out;
}

}  // namespace kramers
