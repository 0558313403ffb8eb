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

#include "kramers/stochastic.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <omp.h>
#include <spdlog/spdlog.h>

#include "kramers/errors.hpp"
#include "kramers/quadrature.hpp"

namespace kramers {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int r = 0; r < 10; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

// V' tabulated on a fine uniform grid, linear in between; exact beyond.
class DriftTable {
 public:
  DriftTable(const PotentialSpec& s, double lo, double hi, int n = 1 << 15) : spec_(s), lo_(lo), hi_(hi), v_(n + 1) {
    inv_h_ = n / (hi - lo);
    for (int i = 0; i <= n; ++i) v_[i] = s.dv(lo + (hi - lo) * i / n);
  }
  double operator()(double x) const {
    if (!(x > lo_ && x < hi_)) return spec_.dv(x);
    double u = (x - lo_) * inv_h_;
    size_t i = static_cast<size_t>(u);
    double w = u - i;
    return v_[i] + w * (v_[i + 1] - v_[i]);
  }

 private:
  const PotentialSpec& spec_;
  double lo_, hi_, inv_h_;
  std::vector<double> v_;
};

double sup_abs_ddv(const PotentialSpec& s, const LandmarkReport& r) {
  double m = 0;
  const double lo = r.x_a - 0.5, hi = r.x_b + 0.5;
  for (int i = 0; i <= 4000; ++i) m = std::max(m, std::abs(s.ddv(lo + (hi - lo) * i / 4000)));
  return m;
}

EnsembleResult run_ensemble(const EpsilonContext& ctx, double x0, double dt, double horizon, int n,
                            std::uint64_t seed, const SdeOptions& opt, bool parallel) {
  if (sde_stability_number(ctx, dt) > 0.1)
    throw StabilityError(fmt::format("simulate_sde: dt tau sup|V''| = {:.3g} exceeds 0.1 at eps = {}",
                                     sde_stability_number(ctx, dt), ctx.eps));
  if (n < 1 || opt.snapshots < 1) throw ConfigError("simulate_sde: need n >= 1 and snapshots >= 1");
  const auto& rep = ctx.landmarks;
  EnsembleResult res;
  res.n = n;
  res.seed = seed;
  res.bins = opt.bins.cells() > 0 ? opt.bins : Grid1D::uniform(rep.x_a - 1, rep.x_b + 1, 64);
  const int nb = res.bins.cells();
  const double b_lo = res.bins.faces.front(), b_w = res.bins.width(0);
  const int m = opt.snapshots;
  const long per = std::max(1L, static_cast<long>(std::ceil(horizon / (dt * m))));
  const double h = horizon / (per * m);
  const double tau = ctx.tau(), drift = tau * h, sigma = std::sqrt(2 * ctx.eps * tau * h);
  const double x_cut = rep.x_0;
  const DriftTable dv(ctx.spec, rep.x_a - 3, rep.x_b + 3);
  auto bin_of = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - b_lo) / b_w)), 0, nb - 1); };

  std::vector<long long> counts(static_cast<size_t>(m + 1) * nb, 0), cross(static_cast<size_t>(m + 1) * (nb + 1), 0),
      left(m + 1, 0);
#pragma omp parallel if (parallel)
  {
    std::vector<long long> c_loc(counts.size(), 0), x_loc(cross.size(), 0), l_loc(left.size(), 0);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      Philox rng(seed, static_cast<std::uint64_t>(i));
      boost::random::normal_distribution<double> gauss;
      double x = x0;
      int b = bin_of(x);
      c_loc[b] += 1;
      l_loc[0] += x < x_cut;
      for (int s = 1; s <= m; ++s) {
        for (long q = 0; q < per; ++q) {
          x += -drift * dv(x) + sigma * gauss(rng);
          int nb2 = bin_of(x);
          if (nb2 != b) {
            long long* row = &x_loc[static_cast<size_t>(s) * (nb + 1)];
            if (nb2 > b)
              for (int f = b + 1; f <= nb2; ++f) row[f] += 1;
            else
              for (int f = nb2 + 1; f <= b; ++f) row[f] -= 1;
            b = nb2;
          }
        }
        c_loc[static_cast<size_t>(s) * nb + b] += 1;
        l_loc[s] += x < x_cut;
      }
    }
#pragma omp critical
    {
      for (size_t k = 0; k < counts.size(); ++k) counts[k] += c_loc[k];
      for (size_t k = 0; k < cross.size(); ++k) cross[k] += x_loc[k];
      for (size_t k = 0; k < left.size(); ++k) left[k] += l_loc[k];
    }
  }
  const double window = per * h;
  for (int s = 0; s <= m; ++s) {
    res.t.push_back(s * window);
    std::vector<double> d(nb), f(nb + 1, 0.0);
    for (int k = 0; k < nb; ++k) d[k] = static_cast<double>(counts[static_cast<size_t>(s) * nb + k]) / n;
    if (s > 0)
      for (int k = 0; k <= nb; ++k) f[k] = cross[static_cast<size_t>(s) * (nb + 1) + k] / (n * window);
    res.density.push_back(std::move(d));
    res.flux.push_back(std::move(f));
    res.left_fraction.push_back(static_cast<double>(left[s]) / n);
  }
  return res;
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

std::array<std::uint32_t, 4> Philox::next_block() {
  auto out = philox_block(ctr_, key_);
  if (++ctr_[0] == 0) ++ctr_[1];
  return out;
}

double Philox::uniform() {
  if (used_ >= 3) {
    buf_ = next_block();
    used_ = 0;
  }
  std::uint32_t a = buf_[used_++] >> 5, b = buf_[used_++] >> 6;
  return (a * 67108864.0 + b + 0.5) / 9007199254740992.0;
}

Philox::result_type Philox::operator()() {
  if (used_ >= 4) {
    buf_ = next_block();
    used_ = 0;
  }
  return buf_[used_++];
}

double Philox::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2 * std::log(u1)), th = 2 * M_PI * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

double sde_stability_number(const EpsilonContext& ctx, double dt) {
  return dt * ctx.tau() * sup_abs_ddv(ctx.spec, ctx.landmarks);
}

EnsembleResult simulate_sde(const EpsilonContext& ctx, double x0, double dt, double horizon, int n,
                            std::uint64_t seed, const SdeOptions& opt) {
  return run_ensemble(ctx, x0, dt, horizon, n, seed, opt, true);
}

EnsembleResult simulate_sde_serial(const EpsilonContext& ctx, double x0, double dt, double horizon, int n,
                                   std::uint64_t seed, const SdeOptions& opt) {
  return run_ensemble(ctx, x0, dt, horizon, n, seed, opt, false);
}

MfptEstimate mfpt_monte_carlo(const PotentialSpec& spec, const LandmarkReport& rep, double eps, int n,
                              std::uint64_t seed, double dt) {
  if (n < 2) throw ConfigError("mfpt_monte_carlo: need n >= 2");
  if (dt <= 0) dt = 0.01 / sup_abs_ddv(spec, rep);
  const double budget = 100 * std::exp(kramers_log_tau(rep, eps));
  const long max_steps = static_cast<long>(std::ceil(budget / dt));
  const double sigma = std::sqrt(2 * eps * dt);
  const DriftTable dv(spec, rep.x_a - 3, rep.x_b + 3);
  std::vector<double> t(n, -1.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) {
    Philox rng(seed, static_cast<std::uint64_t>(i));
    boost::random::normal_distribution<double> gauss;
    double x = rep.x_a;
    long s = 0;
    while (x < rep.x_b && s < max_steps) {
      x += -dv(x) * dt + sigma * gauss(rng);
      ++s;
    }
    t[i] = x >= rep.x_b ? s * dt : -1.0;
  }
  MfptEstimate e;
  for (double v : t) {
    if (v < 0)
      ++e.censored;
    else
      e.samples.push_back(v);
  }
  if (e.censored > 0)
    spdlog::warn("mfpt_monte_carlo: {} of {} paths exceeded 100 x tau at eps = {} and were censored", e.censored, n, eps);
  const int k = static_cast<int>(e.samples.size());
  if (k < 2) throw BudgetExceeded("mfpt_monte_carlo: fewer than two completed paths");
  e.mean = std::accumulate(e.samples.begin(), e.samples.end(), 0.0) / k;
  double ss = 0;
  for (double v : e.samples) ss += (v - e.mean) * (v - e.mean);
  e.stderr_ = std::sqrt(ss / (k - 1) / k);
  return e;
}

double mfpt_quadrature(const PotentialSpec& spec, double eps, double a, double b) {
  if (!(a < b)) throw QuadratureError("mfpt_quadrature: need a < b");
  // lower cut where the inner integrand has dropped by e^{-50}
  double lo = a, vmin = spec.v(a);
  for (int k = 0; k < 100000; ++k) {
    vmin = std::min(vmin, spec.v(lo));
    if (spec.v(lo) - vmin >= 50 * eps && spec.dv(lo) < 0) break;
    lo -= 0.01;
  }
  const double h = std::min(0.01, std::sqrt(eps) / 32);
  std::vector<double> br;
  const int n_in = std::max(1, static_cast<int>(std::ceil((a - lo) / h)));
  const int n_out = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  for (int i = 0; i < n_in; ++i) br.push_back(lo + (a - lo) * i / n_in);
  for (int i = 0; i <= n_out; ++i) br.push_back(a + (b - a) * i / n_out);
  const auto& g = GaussRule::get(16);
  auto logf = [&](double x) { return -spec.v(x) / eps; };
  auto panel_log = [&](double p, double q) {
    LogSum s;
    double half = 0.5 * (q - p), mid = 0.5 * (p + q);
    for (size_t k = 0; k < g.x.size(); ++k) s.add(std::log(g.w[k] * half) + logf(mid + half * g.x[k]));
    return s.value();
  };
  double inner = -INFINITY;  // log int_lo^{br[i]}
  LogSum outer;
  for (size_t i = 0; i + 1 < br.size(); ++i) {
    const double p = br[i], q = br[i + 1];
    if (p >= a) {
      double half = 0.5 * (q - p), mid = 0.5 * (p + q);
      for (size_t k = 0; k < g.x.size(); ++k) {
        double y = mid + half * g.x[k];
        double li = log_add(inner, panel_log(p, y));
        outer.add(std::log(g.w[k] * half) + spec.v(y) / eps + li);
      }
    }
    inner = log_add(inner, panel_log(p, q));
  }
  double r = std::exp(outer.value()) / eps;
  if (!std::isfinite(r)) throw QuadratureError("mfpt_quadrature: non-finite result");
  return r;
}

std::vector<double> simulate_jump(double z0, int n, const std::vector<double>& times, std::uint64_t seed) {
  if (n < 1) throw ConfigError("simulate_jump: need n >= 1");
  std::vector<double> exits;
  exits.reserve(n);
  for (int i = 0; i < n; ++i) {
    Philox rng(seed, static_cast<std::uint64_t>(i));
    double u = rng.uniform(), e = -std::log(rng.uniform());
    if (u < z0) exits.push_back(e);
  }
  std::sort(exits.begin(), exits.end());
  std::vector<double> z(times.size());
  for (size_t k = 0; k < times.size(); ++k) {
    auto it = std::upper_bound(exits.begin(), exits.end(), times[k]);
    z[k] = static_cast<double>(exits.end() - it) / n;
  }
  return z;
}

}  // namespace kramers
