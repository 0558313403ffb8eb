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

#include "kramers/experiment.hpp"

#include <fmt/format.h>
#include <omp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "kramers/errors.hpp"
#include "kramers/functionals.hpp"
#include "kramers/pde.hpp"
#include "kramers/recovery.hpp"
#include "kramers/stochastic.hpp"

#ifndef KRAMERS_VERSION
#define KRAMERS_VERSION "0.0.0"
#endif

namespace kramers {

const char* code_version() { return KRAMERS_VERSION; }

Suite parse_suite(const std::string& s) {
  if (s == "measures") return Suite::measures;
  if (s == "fp") return Suite::fp;
  if (s == "recovery") return Suite::recovery;
  if (s == "gamma") return Suite::gamma;
  if (s == "stochastic") return Suite::stochastic;
  if (s == "all") return Suite::all;
  throw ConfigError("suite: expected measures, fp, recovery, gamma, stochastic or all, got " + s);
}

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::measures: return "measures";
    case Suite::fp: return "fp";
    case Suite::recovery: return "recovery";
    case Suite::gamma: return "gamma";
    case Suite::stochastic: return "stochastic";
    case Suite::all: return "all";
  }
  return "?";
}

std::vector<int> suite_criteria(Suite s) {
  switch (s) {
    case Suite::measures: return {1, 10};
    case Suite::fp: return {3, 4, 11};
    case Suite::recovery: return {7, 8};
    case Suite::gamma: return {5, 6, 9};
    case Suite::stochastic: return {2, 12};
    case Suite::all: return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  }
  return {};
}

SuiteError::SuiteError(const std::string& suite, double eps, const std::string& what)
    : Error(std::isnan(eps) ? fmt::format("[{}] {}", suite, what) : fmt::format("[{} eps={}] {}", suite, eps, what)) {}

bool ExperimentReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const Table* ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

PotentialSpec config_potential(const ExperimentConfig& c, LandmarkReport& report) {
  PotentialSpec spec = make_potential(c.potential);
  report = validate(spec);
  check_ladder_floor(c, report);
  return spec;
}

Table measures_table(const PotentialSpec& spec, const LandmarkReport& report, const std::vector<double>& ladder) {
  Table t{"measures", {"eps", "log_z", "log_z_left", "log_tau", "laplace_err_full", "laplace_err_left"}, {}};
  for (double eps : ladder) {
    try {
      auto ctx = build_context(spec, report, eps);
      t.add({eps, ctx.log_z, ctx.log_z_left, ctx.log_tau, laplace_error_full(ctx), laplace_error_left(ctx)});
    } catch (const SuiteError&) {
      throw;
    } catch (const Error& e) {
      throw SuiteError("measures", eps, e.what());
    }
  }
  return t;
}

Table transform_dump(const TransformTable& table) {
  Table t{"transform", {"x", "y_eps", "phi_eps", "m_eps", "g_ell_hat"}, {}};
  for (size_t k = 0; k < table.x_nodes.size(); ++k)
    t.add({table.x_nodes[k], table.y_values[k], table.phi_values[k], table.m_values[k], table.g_ell_hat[k]});
  return t;
}

std::vector<NamedProfile> configured_profiles(const ExperimentConfig& c) {
  const auto& z = c.z_profile;
  if (z.kind == "corpus") return profile_corpus(c.grids.dt);
  std::vector<double> t = z.t, v = z.z;
  std::string name = "inline";
  if (z.kind == "file") {
    read_z_profile_csv(z.path, t, v);
    name = std::filesystem::path(z.path).stem().string();
  }
  return {{name, TwoStatePath::from_z(t, v)}};
}

namespace {

std::string list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += fmt::format("{}{:.4g}", i ? ", " : "", v[i]);
  return s;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

bool nonincreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

struct RecoveryRow {
  double eps = 0;
  double rate_value = 0, rate_limit = 0;
  double initial_energy = 0, a_eps = 0;
  TraceReport traces;
  EnergyBound energy;
};

class Runner {
 public:
  explicit Runner(const ExperimentConfig& c) : cfg_(c) {
    check_config(c);
    spec_ = config_potential(c, lm_);
    ladder_ = c.eps_ladder;
  }

  ExperimentReport report;

  Verdict criterion(int id) {
    static const char* names[] = {"",
                                  "partition-function asymptotics",
                                  "Kramers formula",
                                  "solver consistency",
                                  "limit dynamics",
                                  "S characterizations",
                                  "J0 = K0 duality",
                                  "recovery sequence",
                                  "initial-energy control",
                                  "inequality suite",
                                  "transform suite",
                                  "duality sandwich",
                                  "stochastic LLN"};
    if (id < 1 || id > 12) throw ConfigError(fmt::format("criterion id {} out of range", id));
    Verdict v;
    v.id = id;
    v.name = names[id];
    auto t0 = std::chrono::steady_clock::now();
    try {
      switch (id) {
        case 1: c1(v); break;
        case 2: c2(v); break;
        case 3: c3(v); break;
        case 4: c4(v); break;
        case 5: c5(v); break;
        case 6: c6(v); break;
        case 7: c7(v); break;
        case 8: c8(v); break;
        case 9: c9(v); break;
        case 10: c10(v); break;
        case 11: c11(v); break;
        case 12: c12(v); break;
      }
    } catch (const std::exception& e) {
      v.pass = false;
      v.measured = std::string("error: ") + e.what();
      spdlog::error("criterion {}: {}", id, e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.runtimes.emplace_back(fmt::format("criterion_{}", id), secs);
    spdlog::info("criterion {} ({}): {} in {:.1f} s", id, v.name, v.pass ? "pass" : "FAIL", secs);
    return v;
  }

  void gamma_tables() {
    auto t0 = std::chrono::steady_clock::now();
    Table g{"gamma", {"profile", "eps", "rate_eps", "rate_limit", "gap"}, {}};
    for (const auto& prof : configured_profiles(cfg_))
      for (const auto& r : recovery(prof, "gamma")) g.add({prof.name, r.eps, r.rate_value, r.rate_limit, r.rate_value - r.rate_limit});
    add_table(std::move(g));
    Table d{"limit_refinement", {"dt", "rate_limit"}, {}};
    for (double dt : {1e-2, 1e-3}) {
      auto p = TwoStatePath::sample([](double t) { return 0.8 * std::exp(-t); }, 1.0, dt);
      d.add({dt, rate_limit(p)});
    }
    add_table(std::move(d));
    report.runtimes.emplace_back("gamma_tables",
                                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  void measures_tables() { add_table(measures_table(spec_, lm_, ladder_)); }

 private:
  ExperimentConfig cfg_;
  PotentialSpec spec_;
  LandmarkReport lm_;
  std::vector<double> ladder_;
  std::map<double, std::unique_ptr<EpsilonContext>> ctx_;
  std::map<double, std::unique_ptr<TransformTable>> tables_;
  std::map<double, std::unique_ptr<YGrid>> ygrids_;
  std::map<std::string, std::vector<RecoveryRow>> recovery_;

  template <class F>
  auto at_eps(const char* suite, double eps, F&& f) {
    try {
      return f();
    } catch (const SuiteError&) {
      throw;
    } catch (const Error& e) {
      throw SuiteError(suite, eps, e.what());
    }
  }

  void add_table(Table t) {
    if (!report.table(t.name)) report.tables.push_back(std::move(t));
  }

  std::uint64_t seed(int offset = 0) const { return cfg_.seeds.front() + static_cast<std::uint64_t>(offset); }

  const EpsilonContext& ctx(double eps) {
    auto& p = ctx_[eps];
    if (!p) p = std::make_unique<EpsilonContext>(build_context(spec_, lm_, eps));
    return *p;
  }
  const TransformTable& table(double eps) {
    auto& p = tables_[eps];
    if (!p) p = std::make_unique<TransformTable>(build_transform(ctx(eps), cfg_.grids.transform_nodes));
    return *p;
  }
  const YGrid& ygrid(double eps) {
    auto& p = ygrids_[eps];
    if (!p) p = std::make_unique<YGrid>(build_y_grid(table(eps), cfg_.grids.y_strip_cells));
    return *p;
  }
  size_t index_near(double eps) const {
    size_t best = 0;
    for (size_t i = 1; i < ladder_.size(); ++i)
      if (std::abs(ladder_[i] - eps) < std::abs(ladder_[best] - eps)) best = i;
    return best;
  }

  const std::vector<RecoveryRow>& recovery(const NamedProfile& prof, const char* suite) {
    auto it = recovery_.find(prof.name);
    if (it != recovery_.end()) return it->second;
    std::vector<RecoveryRow> rows;
    const double rl = rate_limit(prof.path);
    for (double eps : ladder_) {
      rows.push_back(at_eps(suite, eps, [&] {
        SolverConfig sc;
        sc.dt = cfg_.grids.dt;
        sc.grid = ygrid(eps).grid;
        auto b = recovery_pair(ctx(eps), table(eps), ygrid(eps), prof.path, sc);
        RecoveryRow r;
        r.eps = eps;
        r.rate_value = b.rate_value;
        r.rate_limit = rl;
        r.initial_energy = b.initial.initial_energy;
        r.a_eps = b.initial.a_eps;
        r.traces = verify_boundary_traces(b);
        r.energy = b.energy_bound;
        return r;
      }));
    }
    return recovery_[prof.name] = std::move(rows);
  }

  // 1. Laplace asymptotics of Z and Z^l.
  void c1(Verdict& v) {
    Table t = measures_table(spec_, lm_, ladder_);
    std::vector<double> ef, el;
    for (size_t r = 0; r < t.rows.size(); ++r) {
      ef.push_back(std::abs(t.number(r, "laplace_err_full")));
      el.push_back(std::abs(t.number(r, "laplace_err_left")));
    }
    add_table(std::move(t));
    v.pass = ef.front() <= 0.25 && el.front() <= 0.25 && strictly_decreasing(ef) && strictly_decreasing(el);
    v.measured = fmt::format("|Z/laplace-1| = [{}]; |Zl/laplace-1| = [{}]", list(ef), list(el));
    v.threshold = fmt::format("<= 0.25 at eps = {}, strictly decreasing", ladder_.front());
  }

  // 2. Exact exit time against the Kramers time, and Monte Carlo against quadrature.
  void c2(Verdict& v) {
    Table t{"mfpt", {"eps", "mfpt_quadrature", "tau", "ratio"}, {}};
    std::vector<double> dev;
    for (double eps : ladder_) {
      at_eps("stochastic", eps, [&] {
        const auto& c = ctx(eps);
        double q = mfpt_quadrature(spec_, eps, lm_.x_a, lm_.x_b);
        t.add({eps, q, c.tau(), q / c.tau()});
        dev.push_back(std::abs(q / c.tau() - 1));
      });
    }
    add_table(std::move(t));
    const double eps = cfg_.stochastic.mfpt_eps;
    const int n = cfg_.stochastic.mfpt_samples;
    auto mc = at_eps("stochastic", eps, [&] { return mfpt_monte_carlo(spec_, lm_, eps, n, seed(1)); });
    double q = mfpt_quadrature(spec_, eps, lm_.x_a, lm_.x_b);
    Table m{"mfpt_mc", {"eps", "n", "mean", "stderr", "censored", "quadrature", "z_score"}, {}};
    const double z = (mc.mean - q) / mc.stderr_;
    m.add({eps, n, mc.mean, mc.stderr_, mc.censored, q, z});
    add_table(std::move(m));
    v.pass = strictly_decreasing(dev) && std::abs(z) <= 3 && mc.censored == 0;
    v.measured = fmt::format("|mfpt/tau - 1| = [{}]; MC {:.4f} +- {:.4f} vs quadrature {:.4f} ({:+.2f} SE, {} censored)",
                             list(dev), mc.mean, mc.stderr_, q, z, mc.censored);
    v.threshold = "|ratio - 1| strictly decreasing; |MC - quadrature| <= 3 SE at eps = " + fmt::format("{}", eps);
  }

  // 3. Refinement of the solver; mass and entropy.
  void c3(Verdict& v) {
    const double eps = ladder_[index_near(0.25)];
    const auto& c = ctx(eps);
    Table t{"fp_refinement",
            {"start", "eps", "cells", "dt", "rate_primal", "ratio", "mass_drift", "max_entropy_increase"},
            {}};
    std::vector<double> ratios;
    double mass = 0, ent = -INFINITY;
    for (const char* start : {"smooth", "mixture"}) {
      double prev = 0;
      int cells = 256;
      double dt = 8e-3;
      for (int level = 0; level < 3; ++level, cells *= 2, dt /= 4) {
        Grid1D g = fp_grid(c, cells);
        SolverConfig sc;
        sc.dt = dt;
        sc.grid = g;
        auto rho0 = std::string(start) == "smooth" ? tilted_equilibrium(c, g) : local_equilibrium_mixture(c, g, 0.8);
        auto p = at_eps("fp", eps, [&] { return solve_fp_x(c, rho0, sc, 1.0); });
        double r = rate_primal(c, p);
        double md = 0, de = -INFINITY, e_prev = energy(c, g, p.rho[0]);
        for (int k = 1; k <= p.steps(); ++k) {
          md = std::max(md, std::abs(p.mass(k) - p.mass(0)));
          double e = energy(c, g, p.rho[k]);
          de = std::max(de, (e - e_prev) / (1 + std::abs(e_prev)));
          e_prev = e;
        }
        double ratio = level ? prev / r : NAN;
        t.add({start, eps, cells, dt, r, ratio, md, de});
        mass = std::max(mass, md);
        ent = std::max(ent, de);
        if (level && std::string(start) == "smooth") ratios.push_back(ratio);
        prev = r;
      }
    }
    add_table(std::move(t));
    const bool ratios_ok = std::all_of(ratios.begin(), ratios.end(), [](double r) { return r >= 3; });
    v.pass = ratios_ok && mass <= 1e-10 && ent <= 1e-12;
    v.measured = fmt::format("eps = {}: rate_primal drop per level [{}]; mass drift {:.2e}; max relative entropy rise {:.2e}",
                             eps, list(ratios), mass, ent);
    v.threshold = "drop >= 3 per (dt/4, dx/2) level; mass drift <= 1e-10; entropy nonincreasing (1e-12 relative)";
  }

  // 4. Left-basin mass against z0 e^{-t}.
  void c4(Verdict& v) {
    const double z0 = 0.8;
    Table t{"fp_ladder", {"eps", "left_mass_dev", "horizon"}, {}};
    std::vector<double> dev;
    for (double eps : ladder_) {
      at_eps("fp", eps, [&] {
        const auto& c = ctx(eps);
        Grid1D g = fp_grid(c, cfg_.grids.fp_cells);
        SolverConfig sc;
        sc.dt = cfg_.grids.dt;
        sc.grid = g;
        auto p = solve_fp_x(c, local_equilibrium_mixture(c, g, z0), sc, cfg_.horizon);
        double d = 0;
        for (int k = 0; k <= p.steps(); ++k)
          d = std::max(d, std::abs(mass_left_of(p, k, lm_.x_0) - z0 * std::exp(-p.t[k])));
        dev.push_back(d);
        t.add({eps, d, cfg_.horizon});
      });
    }
    add_table(std::move(t));
    const size_t i = index_near(0.25);
    v.pass = dev[i] <= 0.15 && strictly_decreasing(dev);
    v.measured = fmt::format("sup-norm deviation [{}]", list(dev));
    v.threshold = fmt::format("<= 0.15 at eps = {}, decreasing down the ladder", ladder_[i]);
  }

  // 5. Variational and integral forms of S.
  void c5(Verdict& v) {
    Table t{"s_check", {"j", "z", "s_function", "s_variational", "rel_err", "closed_form_err"}, {}};
    double worst = 0, worst_cf = 0;
    for (int a = 1; a <= 10; ++a)
      for (int b = 1; b <= 10; ++b) {
        const double j = 0.3 * a, z = 0.3 * b;
        const double s = s_function(j, z);
        const double sv = s_variational(j, z).value;
        const double cf = s_integral_closed_form(j, z);
        const double rel = s > 0 ? std::abs(sv - s) / s : std::abs(sv - s);
        const double cfe = std::abs(cf - s) / std::max(1.0, s);
        worst = std::max(worst, rel);
        worst_cf = std::max(worst_cf, cfe);
        t.add({j, z, s, sv, rel, cfe});
      }
    add_table(std::move(t));
    v.pass = worst <= 1e-3 && worst_cf <= 1e-6;
    v.measured = fmt::format("max relative error {:.3e}; optimal-u integral error {:.3e}", worst, worst_cf);
    v.threshold = "<= 1e-3 relative on the 10x10 grid (j, z) in {0.3, ..., 3}^2; <= 1e-6";
  }

  // 6. First-order dual family against the limit rate.
  void c6(Verdict& v) {
    Table t{"limit_duality", {"profile", "rate_limit", "dual", "rel_gap"}, {}};
    double worst = 0;
    for (const auto& prof : profile_corpus(cfg_.grids.dt)) {
      const double rl = rate_limit(prof.path);
      const double d = rate_limit_dual(prof.path, first_order_family(prof.path));
      const double rel = rl > 0 ? std::abs(d - rl) / rl : std::abs(d - rl);
      worst = std::max(worst, rel);
      t.add({prof.name, rl, d, rel});
    }
    add_table(std::move(t));
    v.pass = worst <= 1e-3;
    v.measured = fmt::format("max relative gap {:.3e} over 5 profiles", worst);
    v.threshold = "<= 1e-3 relative";
  }

  void recovery_table() {
    Table t{"recovery",
            {"profile", "eps", "rate_value", "rate_limit", "gap", "initial_energy", "a_eps", "left_trace_err",
             "right_trace_err", "left_trace_late", "right_trace_late", "l2_strip", "energy_lhs", "energy_rhs"},
            {}};
    for (const auto& prof : profile_corpus(cfg_.grids.dt))
      for (const auto& r : recovery(prof, "recovery"))
        t.add({prof.name, r.eps, r.rate_value, r.rate_limit, r.rate_value - r.rate_limit, r.initial_energy, r.a_eps,
               r.traces.left, r.traces.right, r.traces.left_late, r.traces.right_late, r.traces.l2_strip, r.energy.lhs, r.energy.rhs});
    add_table(std::move(t));
  }

  // 7. Recovery ladder.
  void c7(Verdict& v) {
    std::vector<std::string> bad;
    std::string summary;
    for (const auto& prof : profile_corpus(cfg_.grids.dt)) {
      const auto& rows = recovery(prof, "recovery");
      std::vector<double> gap, left, right;
      for (const auto& r : rows) {
        gap.push_back(std::abs(r.rate_value - r.rate_limit));
        left.push_back(r.traces.left_late);
        right.push_back(r.traces.right_late);
      }
      const auto& last = rows.back();
      const double rel = std::abs(last.rate_value - last.rate_limit) / last.rate_limit;
      std::vector<double> tail(gap.end() - std::min<size_t>(3, gap.size()), gap.end());
      const bool ok_rel = rel <= 0.1, ok_tail = nonincreasing(tail), ok_tr = nonincreasing(left) && nonincreasing(right);
      summary += fmt::format("{}{}: rel {:.3g}, last gaps [{}]", summary.empty() ? "" : "; ", prof.name, rel, list(tail));
      if (!ok_rel) bad.push_back(prof.name + " misses 10%");
      if (!ok_tail) bad.push_back(prof.name + " gap not nonincreasing");
      if (!ok_tr) bad.push_back(prof.name + " traces not nonincreasing");
    }
    recovery_table();
    v.pass = bad.empty();
    v.measured = summary;
    if (!bad.empty()) {
      v.measured += " | failing:";
      for (const auto& b : bad) v.measured += " " + b + ";";
    }
    v.threshold = "rate within 10% at smallest eps; |gap| nonincreasing over last 3; final-quarter trace errors nonincreasing";
  }

  // 8. Initial energy of the recovery data.
  void c8(Verdict& v) {
    const double cap = std::abs(lm_.v_b) + 1;
    double worst = -INFINITY;
    for (const auto& prof : profile_corpus(cfg_.grids.dt))
      for (const auto& r : recovery(prof, "recovery")) worst = std::max(worst, r.initial_energy);
    recovery_table();
    v.pass = worst <= cap;
    v.measured = fmt::format("max eps*E(u0) = {:.4f}", worst);
    v.threshold = fmt::format("<= |V(x_b)| + 1 = {:.4f}", cap);
  }

  // 9. Randomized LSI, concentration and Poincare instances.
  void c9(Verdict& v) {
    const int n = cfg_.inequality_instances;
    std::mt19937_64 rng(seed(9));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Table t{"inequalities", {"kind", "instances", "violations", "max_ratio"}, {}};
    int total_bad = 0;

    int bad = 0;
    double worst = 0;
    for (int k = 0; k < n; ++k) {
      const double eps = ladder_[static_cast<size_t>(U(rng) * ladder_.size()) % ladder_.size()];
      const bool left = U(rng) < 0.5;
      const double len = 0.5 + U(rng);
      Interval region = left ? Interval{lm_.x_cl - len, lm_.x_cl} : Interval{lm_.x_cr, lm_.x_cr + len};
      Grid1D g = Grid1D::uniform(region.lo, region.hi, 2000);
      double amp[3], ph[3];
      for (int q = 0; q < 3; ++q) {
        amp[q] = 2 * U(rng) - 1;
        ph[q] = 2 * M_PI * U(rng);
      }
      auto w = [&](double x) { return (spec_.v(x) - (left ? lm_.v_a : lm_.v_b)) / eps; };
      std::vector<double> mu(g.cells());
      for (int i = 0; i < g.cells(); ++i) {
        double x = g.center(i), s = 0;
        for (int q = 0; q < 3; ++q) s += amp[q] * std::sin((q + 1) * M_PI * (x - region.lo) / len + ph[q]);
        mu[i] = g.width(i) * std::exp(-w(x) + s);
      }
      try {
        worst = std::max(worst, lsi_check(g, mu, w, region, lm_.alpha / eps).ratio);
      } catch (const ViolationError& e) {
        ++bad;
        spdlog::warn("lsi instance {}: {}", k, e.what());
      }
    }
    t.add({"lsi", n, bad, worst});
    total_bad += bad;

    bad = 0;
    worst = 0;
    for (int k = 0; k < n;) {
      const int cells = 50 + static_cast<int>(U(rng) * 150);
      Grid1D g = Grid1D::uniform(0, 1, cells);
      std::vector<double> nu(cells), mu(cells);
      double c1 = 4 * U(rng) - 2, c2 = 4 * U(rng) - 2;
      for (int i = 0; i < cells; ++i) {
        double x = g.center(i);
        nu[i] = std::exp(-(c1 * x + c2 * x * x)) * g.width(i);
        mu[i] = U(rng) * std::exp(3 * U(rng));
      }
      double lo = U(rng), hi = U(rng);
      if (lo > hi) std::swap(lo, hi);
      Interval a2{lo, hi};
      double l1 = lo + (hi - lo) * U(rng), l2 = lo + (hi - lo) * U(rng);
      if (l1 > l2) std::swap(l1, l2);
      Interval a1{l1, l2};
      try {
        double b = concentration_bound(g, mu, nu, a1, a2);
        double m1 = 0;
        for (int i = 0; i < cells; ++i)
          if (a1.contains(g.center(i))) m1 += mu[i];
        worst = std::max(worst, m1 / b);
        ++k;
      } catch (const DegenerateBound&) {
        continue;  // resample: the bound needs nu(a2) > nu(a1) > 0
      } catch (const ViolationError& e) {
        ++bad;
        ++k;
        spdlog::warn("concentration instance {}: {}", k, e.what());
      }
    }
    t.add({"concentration", n, bad, worst});
    total_bad += bad;

    bad = 0;
    worst = 0;
    for (int k = 0; k < n; ++k) {
      const double lo = 4 * U(rng) - 2, len = 0.1 + 5 * U(rng);
      Interval iv{lo, lo + len};
      GridFunction f;
      const int nodes = 10 + static_cast<int>(U(rng) * 40);
      for (int i = 0; i < nodes; ++i) {
        f.x.push_back(lo + len * i / (nodes - 1));
        f.f.push_back(4 * U(rng) - 2);
      }
      AtomicMeasure mu;
      const int atoms = 1 + static_cast<int>(U(rng) * 10);
      for (int i = 0; i < atoms; ++i) {
        mu.x.push_back(lo + len * U(rng));
        mu.w.push_back(0.01 + U(rng));
      }
      try {
        auto r = poincare_check(f, mu, iv);
        worst = std::max(worst, r.lhs / r.rhs);
      } catch (const ViolationError& e) {
        ++bad;
        spdlog::warn("poincare instance {}: {}", k, e.what());
      }
    }
    t.add({"poincare", n, bad, worst});
    total_bad += bad;

    add_table(std::move(t));
    v.pass = total_bad == 0;
    v.measured = fmt::format("{} violations over {} instances each (LSI, concentration, Poincare)", total_bad, n);
    v.threshold = "0 violations";
  }

  // 10. Monotone transform, committor defect, inverse.
  void c10(Verdict& v) {
    Table t{"transform_checks", {"eps", "y_monotone", "phi_identity_defect", "roundtrip_max_err"}, {}};
    std::vector<double> defect;
    double worst_rt = 0;
    bool mono = true;
    std::mt19937_64 rng(seed(10));
    for (double eps : ladder_) {
      at_eps("measures", eps, [&] {
        const auto& tab = table(eps);
        bool m = true;
        for (size_t k = 1; k < tab.y_values.size(); ++k) m = m && tab.y_values[k] > tab.y_values[k - 1];
        const Interval xr = tab.x_range();
        std::uniform_real_distribution<double> X(xr.lo, xr.hi);
        double rt = 0;
        for (int s = 0; s < 100; ++s) {
          double x = X(rng);
          rt = std::max(rt, std::abs(invert_y(tab, tab.y_at(x)) - x));
        }
        double d = phi_identity_defect(tab);
        t.add({eps, m ? 1 : 0, d, rt});
        mono = mono && m;
        defect.push_back(d);
        worst_rt = std::max(worst_rt, rt);
      });
    }
    add_table(std::move(t));
    v.pass = mono && nonincreasing(defect) && worst_rt <= 1e-9;
    v.measured = fmt::format("monotone: {}; defect [{}]; round-trip {:.2e}", mono ? "yes" : "no", list(defect), worst_rt);
    v.threshold = "strictly increasing y; defect nonincreasing; round-trip <= 1e-9";
  }

  // 11. Dual lower bound below the primal rate on a path corpus.
  void c11(Verdict& v) {
    Table t{"duality", {"path", "eps", "rate_primal", "dual_max", "optimal_dual", "optimal_rel_gap", "violations"}, {}};
    int violations = 0;
    double worst_gap = 0, worst_excess = -INFINITY;
    std::vector<double> picks{ladder_.front(), ladder_[index_near(0.25)], ladder_.back()};
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (double eps : picks) {
      at_eps("fp", eps, [&] {
        const auto& c = ctx(eps);
        Grid1D g = fp_grid(c, 512);
        SolverConfig sc;
        sc.dt = 2e-3;
        sc.grid = g;
        auto base = solve_fp_x(c, local_equilibrium_mixture(c, g, 0.8), sc, 1.0);
        auto perturbed = base;
        const double x0 = lm_.x_0, r = 0.5 * (lm_.x_cr - lm_.x_cl);
        for (int k = 0; k <= perturbed.steps(); ++k)
          for (size_t f = 1; f + 1 < g.faces.size(); ++f)
            perturbed.flux[k][f] += 0.05 * mollifier_profile((g.faces[f] - x0) / r);
        auto reversed = base;
        const int K = base.steps();
        for (int k = 0; k <= K; ++k) reversed.rho[k] = base.rho[K - k];
        for (int k = 1; k <= K; ++k) {
          reversed.flux[k] = base.flux[K - k + 1];
          for (auto& j : reversed.flux[k]) j = -j;
        }
        reversed.flux[0] = reversed.flux[1];
        std::vector<std::pair<std::string, DensityFluxPath*>> paths{
            {"solution", &base}, {"flux_perturbed", &perturbed}, {"time_reversed", &reversed}};
        const auto family_fixed = [&] {
          auto fam = polynomial_bump_family(lm_.B_0, 3, 1.0);
          for (double psi : {0.25, 1.0}) fam.push_back(committor_test_function(table(eps), [psi](double) { return psi; }));
          fam.push_back(committor_test_function(table(eps), [](double s) { return std::exp(-s); }));
          return fam;
        }();
        for (auto& [name, p] : paths) {
          const double primal = rate_primal(c, *p);
          auto fam = family_fixed;
          auto opt = optimal_test_function(c, *p);
          for (double s : {0.5, 1.5}) fam.push_back([opt, s](double tt, double x) { return s * opt(tt, x); });
          double best = -INFINITY;
          int bad = 0;
          for (const auto& b : fam) {
            double d = rate_dual_single(c, *p, b);
            best = std::max(best, d);
            worst_excess = std::max(worst_excess, d - primal);
            if (d > primal + 1e-8) ++bad;
          }
          const double od = rate_dual_single(c, *p, opt);
          worst_excess = std::max(worst_excess, od - primal);
          if (od > primal + 1e-8) ++bad;
          const double gap = std::abs(primal - od) / primal;
          worst_gap = std::max(worst_gap, gap);
          violations += bad;
          t.add({name, eps, primal, best, od, gap, bad});
        }
      });
    }
    add_table(std::move(t));
    v.pass = violations == 0 && worst_gap <= 1e-4;
    v.measured = fmt::format("{} violations (max dual - primal {:.3e}); optimal-b relative gap {:.3e}", violations,
                             worst_excess, worst_gap);
    v.threshold = "dual <= primal + 1e-8 for every member; optimal gap <= 1e-4 relative";
  }

  // 12. Particle fractions against z0 e^{-t}.
  void c12(Verdict& v) {
    const double eps = ladder_.back();
    const auto& c = ctx(eps);
    const double horizon = cfg_.stochastic.sde_horizon;
    const double dt = 0.0999 / sde_stability_number(c, 1.0);
    const int n = cfg_.stochastic.sde_particles;
    SdeOptions opt;
    opt.snapshots = static_cast<int>(std::lround(horizon / 0.025));
    auto ens = at_eps("stochastic", eps, [&] { return simulate_sde(c, lm_.x_a, dt, horizon, n, seed(12), opt); });
    std::vector<double> times;
    for (double s = 0.5; s <= horizon + 1e-9; s += 0.5) times.push_back(s);
    const int nj = cfg_.stochastic.jump_particles;
    auto jump = simulate_jump(1.0, nj, times, seed(13));
    // Finite-eps oracle for the SDE rows: FP from a narrow Gaussian at x_a.
    Grid1D g = fp_grid(c, cfg_.grids.fp_cells);
    SolverConfig sc;
    sc.dt = cfg_.grids.dt;
    sc.grid = g;
    std::vector<double> rho0(g.cells());
    double m0 = 0;
    for (int i = 0; i < g.cells(); ++i) {
      rho0[i] = std::exp(-0.5 * std::pow((g.center(i) - lm_.x_a) / 0.02, 2));
      m0 += rho0[i] * g.width(i);
    }
    for (auto& r : rho0) r /= m0;
    auto fp = at_eps("stochastic", eps, [&] { return solve_fp_x(c, rho0, sc, horizon); });
    Table t{"lln", {"source", "eps", "n", "t", "z_empirical", "z_reference", "band", "z_fp_eps"}, {}};
    double worst = 0;  // deviation in units of the band
    for (size_t q = 0; q < times.size(); ++q) {
      const double zr = std::exp(-times[q]);
      size_t k = 0;
      for (size_t i = 0; i < ens.t.size(); ++i)
        if (std::abs(ens.t[i] - times[q]) < std::abs(ens.t[k] - times[q])) k = i;
      const double bs = 3 * std::sqrt(zr * (1 - zr) / n), bj = 3 * std::sqrt(zr * (1 - zr) / nj);
      const int kf = static_cast<int>(std::lround(times[q] / sc.dt));
      t.add({"sde", eps, n, ens.t[k], ens.left_fraction[k], zr, bs, mass_left_of(fp, kf, lm_.x_0)});
      t.add({"jump", NAN, nj, times[q], jump[q], zr, bj, NAN});
      worst = std::max({worst, std::abs(ens.left_fraction[k] - zr) / bs, std::abs(jump[q] - zr) / bj});
    }
    add_table(std::move(t));
    v.pass = worst <= 1.0;
    v.measured = fmt::format("worst |z_emp - e^-t| = {:.2f} bands (sde n = {} at eps = {}, jump n = {})", worst, n, eps, nj);
    v.threshold = "within 3 sqrt(z(1-z)/n) at t in {0.5, 1, 1.5}";
  }
};

bool is_label_column(const std::string& c) { return c == "profile" || c == "path" || c == "start" || c == "source"; }

void collect_records(ExperimentReport& r) {
  r.records.clear();
  for (const auto& t : r.tables) {
    int e = -1;
    for (size_t i = 0; i < t.columns.size(); ++i)
      if (t.columns[i] == "eps") e = static_cast<int>(i);
    if (e < 0) continue;
    for (size_t row = 0; row < t.rows.size(); ++row) {
      std::string exp = t.name;
      for (size_t i = 0; i < t.columns.size(); ++i)
        if (is_label_column(t.columns[i])) exp += "/" + t.rows[row][i];
      for (size_t i = 0; i < t.columns.size(); ++i) {
        if (static_cast<int>(i) == e || is_label_column(t.columns[i])) continue;
        r.records.push_back({exp, t.number(row, "eps"), t.columns[i], t.number(row, t.columns[i])});
      }
    }
  }
}

ExperimentReport finish(Runner& runner, const ExperimentConfig& c, const std::string& suite) {
  ExperimentReport rep = std::move(runner.report);
  rep.suite = suite;
  rep.config_hash = config_hash(c);
  rep.code_version = code_version();
  collect_records(rep);
  return rep;
}

}  // namespace

ExperimentReport run(const ExperimentConfig& config, Suite suite) {
  Runner runner(config);
  if (suite == Suite::measures || suite == Suite::all) runner.measures_tables();
  for (int id : suite_criteria(suite)) runner.report.verdicts.push_back(runner.criterion(id));
  if (suite == Suite::gamma || suite == Suite::all) runner.gamma_tables();
  return finish(runner, config, suite_name(suite));
}

ExperimentReport run_criteria(const ExperimentConfig& config, const std::vector<int>& ids) {
  Runner runner(config);
  for (int id : ids) runner.report.verdicts.push_back(runner.criterion(id));
  return finish(runner, config, "criteria");
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  using nlohmann::json;
  json v = json::array();
  for (const auto& x : r.verdicts)
    v.push_back({{"id", x.id}, {"name", x.name}, {"pass", x.pass}, {"measured", x.measured}, {"threshold", x.threshold}});
  json rec = json::array();
  for (const auto& x : r.records)
    rec.push_back({{"experiment", x.experiment},
                   {"eps", std::isnan(x.eps) ? json(nullptr) : json(x.eps)},
                   {"quantity", x.quantity},
                   {"value", std::isfinite(x.value) ? json(x.value) : json(format_number(x.value))}});
  json tabs = json::array();
  for (const auto& t : r.tables) tabs.push_back(t.name);
  return {{"schema_version", 1}, {"suite", r.suite},    {"config_hash", r.config_hash}, {"code_version", r.code_version},
          {"passed", r.all_passed()}, {"verdicts", v}, {"tables", tabs},               {"records", rec}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  try {
    r.suite = j.value("suite", "");
    r.config_hash = j.value("config_hash", "");
    r.code_version = j.value("code_version", "");
    for (const auto& v : j.value("verdicts", nlohmann::json::array()))
      r.verdicts.push_back({v.at("id").get<int>(), v.at("name").get<std::string>(), v.at("pass").get<bool>(),
                            v.at("measured").get<std::string>(), v.at("threshold").get<std::string>()});
    for (const auto& x : j.value("records", nlohmann::json::array())) {
      PlotRecord p;
      p.experiment = x.at("experiment").get<std::string>();
      p.eps = x.at("eps").is_null() ? NAN : x.at("eps").get<double>();
      p.quantity = x.at("quantity").get<std::string>();
      p.value = x.at("value").is_string() ? std::stod(x.at("value").get<std::string>()) : x.at("value").get<double>();
      r.records.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
  return r;
}

ExperimentReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return report_from_json(j);
}

void emit_plotdata(const ExperimentReport& r, const std::string& path) {
  Table t{"plotdata", {"experiment", "eps", "quantity", "value"}, {}};
  for (const auto& x : r.records) t.add({x.experiment, x.eps, x.quantity, x.value});
  write_csv(path, t);
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  ensure_directory(dir);
  for (const auto& t : r.tables) {
    Table out = t;
    out.columns.push_back("config_hash");
    out.columns.push_back("code_version");
    for (auto& row : out.rows) {
      row.push_back(r.config_hash);
      row.push_back(r.code_version);
    }
    write_csv(dir + "/" + t.name + ".csv", out);
  }
  write_text(dir + "/verdicts.json", report_to_json(r).dump(2) + "\n");
  emit_plotdata(r, dir + "/plotdata.csv");
  nlohmann::json meta;
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["written_utc"] = buf;
  meta["threads"] = omp_get_max_threads();
  for (const auto& [k, s] : r.runtimes) meta["runtimes_seconds"][k] = s;
  write_text(dir + "/run_meta.json", meta.dump(2) + "\n");
}

}  // namespace kramers
