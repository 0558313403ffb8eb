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

#include <cmath>
#include <functional>
#include <vector>

namespace kramers {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
  static const GaussRule& get(int n);
};

// Compensated summation.
class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0, c_ = 0;
};

double log_add(double a, double b);

// Streaming log-sum-exp.
class LogSum {
 public:
  void add(double log_term);
  double value() const;

 private:
  double m_ = -INFINITY;
  double s_ = 0.0;
};

// log of int exp(logf) over the panels [breaks[i], breaks[i+1]].
double log_integrate(const std::function<double(double)>& logf, const std::vector<double>& breaks,
                     int order = 16);

struct LogQuad {
  double log_value;
  double rel_err;
};

// Compares the panel rule against a bisected copy; refines until rel_tol.
LogQuad log_integrate_adaptive(const std::function<double(double)>& logf, std::vector<double> breaks,
                               int order = 16, double rel_tol = 1e-8, int max_levels = 8);

double integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                 int order = 16);

// Breakpoints on [lo, hi]: width `fine` within `radius` of every center,
// growing geometrically by `growth` up to `coarse` elsewhere.
std::vector<double> refined_breaks(double lo, double hi, const std::vector<double>& centers,
                                   double radius, double fine, double coarse, double growth = 1.2);

// Restriction of a break list to [a, b], endpoints included.
std::vector<double> clip_breaks(const std::vector<double>& breaks, double a, double b);

}  // namespace kramers
