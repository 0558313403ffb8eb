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
#include <vector>

#include "kramers/grid.hpp"
#include "kramers/measures.hpp"

namespace kramers {

// x / (e^x - 1)
inline double bernoulli_fn(double x) {
  if (std::abs(x) < 1e-5) return 1.0 - 0.5 * x + x * x / 12.0;
  if (x > 700) return x * std::exp(-x);
  return x / std::expm1(x);
}

// Exponentially fitted interior-face flux J_f = (tau eps / d_f)(bp_f rho_{f-1} - bm_f rho_f).
struct SgStencil {
  std::vector<double> bp, bm, d;  // indexed by face, interior faces 1..n-1
  double coeff = 0;              // tau * eps

  static SgStencil build(const EpsilonContext& ctx, const Grid1D& grid) {
    SgStencil s;
    const int n = grid.cells();
    s.bp.assign(n + 1, 0.0);
    s.bm.assign(n + 1, 0.0);
    s.d.assign(n + 1, 0.0);
    s.coeff = ctx.tau() * ctx.eps;
    for (int f = 1; f < n; ++f) {
      double delta = (ctx.v(grid.center(f)) - ctx.v(grid.center(f - 1))) / ctx.eps;
      s.bp[f] = bernoulli_fn(delta);
      s.bm[f] = bernoulli_fn(-delta);
      s.d[f] = grid.center_gap(f);
    }
    return s;
  }

  double flux(const std::vector<double>& rho, int f) const {
    return coeff / d[f] * (bp[f] * rho[f - 1] - bm[f] * rho[f]);
  }
};

}  // namespace kramers
