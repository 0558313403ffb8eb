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

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "kramers/config.hpp"
#include "kramers/errors.hpp"
#include "kramers/experiment.hpp"
#include "kramers/functionals.hpp"
#include "kramers/io.hpp"
#include "kramers/limit.hpp"
#include "kramers/pde.hpp"
#include "kramers/recovery.hpp"
#include "kramers/stochastic.hpp"
#include "kramers/transform.hpp"

using namespace kramers;

namespace {

struct Globals {
  std::string config;
  std::string out;
  int threads = 0;
  std::int64_t seed = -1;
  std::string log_level = "warn";
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig c = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed >= 0) c.seeds.front() = static_cast<std::uint64_t>(g.seed);
  if (!g.out.empty()) c.output_dir = g.out;
  check_config(c);
  return c;
}

// Writes a table to --out (a file path) or stdout.
void emit(const Table& t, const std::string& out) {
  if (out.empty()) {
    for (size_t i = 0; i < t.columns.size(); ++i) std::cout << (i ? "," : "") << t.columns[i];
    std::cout << '\n';
    for (const auto& r : t.rows) {
      for (size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
      std::cout << '\n';
    }
  } else {
    auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) ensure_directory(parent.string());
    write_csv(out, t);
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<double> eps_list(const std::vector<double>& given, const ExperimentConfig& c) {
  return given.empty() ? c.eps_ladder : given;
}

int print_verdicts(const ExperimentReport& r) {
  for (const auto& v : r.verdicts)
    std::cout << fmt::format("[{}] criterion {:>2} {}: {} (threshold: {})\n", v.pass ? "PASS" : "FAIL", v.id, v.name,
                             v.measured, v.threshold);
  return r.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metastable two-well Fokker-Planck experiments: measures, solvers, rate functionals, particles"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output location: a directory, or a file for single-table commands");
  app.add_option("--threads", g.threads, "OpenMP thread count (default: runtime choice)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "overrides the first configured seed")->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

  // validate-potential
  auto* vp = app.add_subcommand("validate-potential", "check admissibility and print the landmark report");
  // measures
  std::vector<double> ladder;
  auto* ms = app.add_subcommand("measures", "partition functions and Laplace errors along an eps ladder");
  ms->add_option("--eps-ladder", ladder, "comma-separated decreasing eps values")->delimiter(',');
  // transform
  double eps = 0.25;
  std::string dump;
  auto* tr = app.add_subcommand("transform", "tabulate the desingularising coordinate");
  tr->add_option("--eps", eps, "noise level")->required();
  tr->add_option("--dump", dump, "CSV file for the table (stdout if omitted)");
  // solve
  std::string coord = "x";
  double t_final = 1.0, z0 = 0.8, dt = 0;
  int cells = 0;
  auto* sv = app.add_subcommand("solve", "run the Fokker-Planck solver in x or the weighted heat solver in y");
  sv->add_option("--coord", coord, "x or y")->check(CLI::IsMember({"x", "y"}));
  sv->add_option("--eps", eps, "noise level")->required();
  sv->add_option("--t-final", t_final, "horizon")->check(CLI::PositiveNumber);
  sv->add_option("--z0", z0, "initial left-basin mass");
  sv->add_option("--dt", dt, "time step (default from config)");
  sv->add_option("--cells", cells, "cells (x) or strip cells (y); default from config");
  // rate
  std::string input, form = "primal";
  auto* rt = app.add_subcommand("rate", "evaluate a rate functional on a path CSV");
  rt->add_option("--input", input, "path CSV (t, cell_center, rho, flux)")->required()->check(CLI::ExistingFile);
  rt->add_option("--form", form, "primal, dual, split or transformed")
      ->check(CLI::IsMember({"primal", "dual", "split", "transformed"}));
  rt->add_option("--eps", eps, "noise level (not needed for transformed)");
  // limit
  std::string z_profile;
  auto* lt = app.add_subcommand("limit", "limit rate functional of a two-state path");
  lt->add_option("--z-profile", z_profile, "CSV with columns t, z")->required()->check(CLI::ExistingFile);
  // recovery
  int stride = 10;
  auto* rc = app.add_subcommand("recovery", "build recovery sequences along an eps ladder");
  rc->add_option("--eps-ladder", ladder, "comma-separated decreasing eps values")->delimiter(',');
  rc->add_option("--z-profile", z_profile, "CSV with columns t, z (default: configured profile)")
      ->check(CLI::ExistingFile);
  rc->add_option("--stride", stride, "write every k-th time slice of the bundle paths")->check(CLI::PositiveNumber);
  // particles
  std::string mode = "sde";
  int n = 1000;
  auto* pt = app.add_subcommand("particles", "particle simulations");
  pt->add_option("--mode", mode, "sde, mfpt or jump")->check(CLI::IsMember({"sde", "mfpt", "jump"}));
  pt->add_option("--eps", eps, "noise level");
  pt->add_option("--n", n, "particle count")->check(CLI::PositiveNumber);
  pt->add_option("--t-final", t_final, "horizon for sde and jump");
  pt->add_option("--z0", z0, "initial state-a probability for jump");
  // gamma
  auto* gm = app.add_subcommand("gamma", "recovery rate ladder against the limit rate (gamma suite)");
  // emit-plotdata
  std::string report_path;
  auto* ep = app.add_subcommand("emit-plotdata", "long-format CSV from a verdicts.json report");
  ep->add_option("--report", report_path, "verdicts.json written by run or gamma")->required()->check(CLI::ExistingFile);
  // run
  std::string suite = "all";
  auto* rn = app.add_subcommand("run", "run a suite and write CSV/JSON artifacts");
  rn->add_option("--suite", suite, "measures, fp, recovery, gamma, stochastic or all")
      ->check(CLI::IsMember({"measures", "fp", "recovery", "gamma", "stochastic", "all"}));

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("kramers");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(g.log_level));
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    ExperimentConfig cfg = load(g);
    if (*vp) {
      PotentialSpec spec = make_potential(cfg.potential);
      LandmarkReport r;
      try {
        r = validate(spec);
      } catch (const ValidationFailure& e) {
        std::cerr << "inadmissible: " << e.what() << '\n';
        return 2;
      }
      nlohmann::json j = {{"potential", spec.name}, {"x_a", r.x_a}, {"x_cl", r.x_cl}, {"x_0", r.x_0},
                          {"x_cr", r.x_cr}, {"x_bminus", r.x_bminus}, {"x_b", r.x_b}, {"x_bplus", r.x_bplus},
                          {"alpha", r.alpha}, {"a_upper", r.a_upper}, {"barrier", r.barrier}, {"v_a", r.v_a},
                          {"v_0", r.v_0}, {"v_b", r.v_b}, {"ddv_a", r.ddv_a}, {"ddv_0", r.ddv_0}, {"ddv_b", r.ddv_b},
                          {"eps_floor", certified_eps_floor(r)}};
      if (g.out.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        ensure_directory(g.out);
        write_text(join_path(g.out, "landmarks.json"), j.dump(2) + "\n");
      }
      return 0;
    }
    LandmarkReport lm;
    const PotentialSpec spec = config_potential(cfg, lm);
    const std::string out = g.out;

    if (*ms) {
      auto l = eps_list(ladder, cfg);
      ExperimentConfig probe = cfg;
      probe.eps_ladder = l;
      check_config(probe);
      check_ladder_floor(probe, lm);
      emit(measures_table(spec, lm, l), out.empty() ? "" : join_path(out, "measures.csv"));
      return 0;
    }
    if (*tr) {
      auto ctx = build_context(spec, lm, eps);
      emit(transform_dump(build_transform(ctx, cfg.grids.transform_nodes)), dump);
      return 0;
    }
    if (*sv) {
      auto ctx = build_context(spec, lm, eps);
      SolverConfig sc;
      sc.dt = dt > 0 ? dt : cfg.grids.dt;
      DensityFluxPath p;
      if (coord == "x") {
        sc.grid = fp_grid(ctx, cells > 0 ? cells : cfg.grids.fp_cells);
        p = solve_fp_x(ctx, local_equilibrium_mixture(ctx, sc.grid, z0), sc, t_final);
      } else {
        auto table = build_transform(ctx, cfg.grids.transform_nodes);
        auto yg = build_y_grid(table, cells > 0 ? cells : cfg.grids.y_strip_cells);
        sc.grid = yg.grid;
        auto init = build_initial_data(ctx, yg, z0);
        p = solve_weighted_heat_y(yg, init.u, [](double, double) { return 0.0; }, sc, t_final);
      }
      if (out.empty()) throw ConfigError("solve: --out path.csv is required");
      auto parent = std::filesystem::path(out).parent_path();
      if (!parent.empty()) ensure_directory(parent.string());
      write_path_csv(out, p, coord == "x" ? "rho" : "u_hat");
      return 0;
    }
    if (*rt) {
      auto p = read_path_csv(input);
      Table t{"rate", {}, {}};
      if (form == "transformed") {
        t.columns = {"rate_transformed"};
        t.add({rate_transformed(p)});
      } else {
        auto ctx = build_context(spec, lm, eps);
        if (form == "primal") {
          t.columns = {"rate_primal"};
          t.add({rate_primal(ctx, p)});
        } else if (form == "split") {
          auto s = rate_edp_split(ctx, p);
          t.columns = {"delta_e", "kinetic", "slope", "total"};
          t.add({s.delta_e, s.kinetic, s.slope, s.total});
        } else {
          auto fam = polynomial_bump_family(lm.B_0, 3, p.t.back());
          auto table = build_transform(ctx, cfg.grids.transform_nodes);
          fam.push_back(committor_test_function(table, [](double) { return 1.0; }));
          auto opt = optimal_test_function(ctx, p);
          t.columns = {"rate_dual_family", "rate_dual_optimal"};
          t.add({rate_dual(ctx, p, fam), rate_dual_single(ctx, p, opt)});
        }
      }
      emit(t, out);
      return 0;
    }
    if (*lt) {
      std::vector<double> ts, zs;
      read_z_profile_csv(z_profile, ts, zs);
      auto path = TwoStatePath::from_z(ts, zs);
      Table s{"limit", {"rate_limit", "dual_lower_bound"}, {}};
      s.add({rate_limit(path), rate_limit_dual(path, first_order_family(path))});
      Table chk{"s_check", {"t", "j", "z", "s_function", "s_variational", "rel_err"}, {}};
      const int every = std::max(1, path.steps() / 10);
      for (int k = 0; k < path.steps(); k += every) {
        const double sf = s_function(path.j[k], path.z[k]);
        double sv = NAN;
        try {
          sv = s_variational(path.j[k], path.z[k]).value;
        } catch (const InfiniteCost&) {
          sv = INFINITY;
        }
        chk.add({path.t[k], path.j[k], path.z[k], sf, sv, sf > 0 ? std::abs(sv - sf) / sf : std::abs(sv - sf)});
      }
      if (out.empty()) {
        emit(s, "");
        std::cout << '\n';
        emit(chk, "");
      } else {
        ensure_directory(out);
        write_csv(join_path(out, "limit.csv"), s);
        write_csv(join_path(out, "s_check.csv"), chk);
      }
      return 0;
    }
    if (*rc) {
      if (out.empty()) throw ConfigError("recovery: --out dir/ is required");
      ensure_directory(out);
      auto l = eps_list(ladder, cfg);
      ExperimentConfig probe = cfg;
      probe.eps_ladder = l;
      check_config(probe);
      check_ladder_floor(probe, lm);
      std::vector<NamedProfile> profiles;
      if (!z_profile.empty()) {
        std::vector<double> ts, zs;
        read_z_profile_csv(z_profile, ts, zs);
        profiles.push_back({std::filesystem::path(z_profile).stem().string(), TwoStatePath::from_z(ts, zs)});
      } else {
        profiles = configured_profiles(cfg);
      }
      Table sum{"summary",
                {"profile", "eps", "rate_value", "rate_limit", "initial_energy", "left_trace_err", "right_trace_err"},
                {}};
      for (const auto& prof : profiles) {
        const double rl = rate_limit(prof.path);
        for (double e : l) {
          auto ctx = build_context(spec, lm, e);
          auto table = build_transform(ctx, cfg.grids.transform_nodes);
          auto yg = build_y_grid(table, cfg.grids.y_strip_cells);
          SolverConfig sc;
          sc.dt = prof.path.t[1] - prof.path.t[0];
          sc.grid = yg.grid;
          auto b = recovery_pair(ctx, table, yg, prof.path, sc);
          auto tr2 = verify_boundary_traces(b);
          sum.add({prof.name, e, b.rate_value, rl, b.initial.initial_energy, tr2.left, tr2.right});
          auto thin = [&](const DensityFluxPath& p) {
            DensityFluxPath q;
            q.grid = p.grid;
            for (int k = 0; k <= p.steps(); k += stride) {
              q.t.push_back(p.t[k]);
              q.rho.push_back(p.rho[k]);
              q.flux.push_back(p.flux[k]);
            }
            return q;
          };
          const std::string tag = fmt::format("{}_eps{}", prof.name, e);
          write_path_csv(join_path(out, "u_path_" + tag + ".csv"), thin(b.u_path), "u_hat");
          write_path_csv(join_path(out, "x_path_" + tag + ".csv"), thin(b.x_path), "rho");
        }
      }
      write_csv(join_path(out, "summary.csv"), sum);
      return 0;
    }
    if (*pt) {
      const std::uint64_t seed = cfg.seeds.front();
      if (mode == "sde") {
        auto ctx = build_context(spec, lm, eps);
        const double h = 0.0999 / sde_stability_number(ctx, 1.0);
        auto e = simulate_sde(ctx, lm.x_a, h, t_final, n, seed);
        DensityFluxPath p;
        p.grid = e.bins;
        p.t = e.t;
        p.flux = e.flux;
        for (const auto& d : e.density) {
          std::vector<double> r(d.size());
          for (size_t i = 0; i < d.size(); ++i) r[i] = d[i] / e.bins.width(static_cast<int>(i));
          p.rho.push_back(std::move(r));
        }
        if (out.empty()) throw ConfigError("particles: --out file.csv is required");
        write_path_csv(out, p, "rho");
        Table lf{"left_fraction", {"t", "left_fraction", "z_reference"}, {}};
        for (size_t k = 0; k < e.t.size(); ++k) lf.add({e.t[k], e.left_fraction[k], std::exp(-e.t[k])});
        emit(lf, "");
      } else if (mode == "mfpt") {
        auto m = mfpt_monte_carlo(spec, lm, eps, n, seed);
        const double q = mfpt_quadrature(spec, eps, lm.x_a, lm.x_b);
        Table samples{"mfpt_samples", {"index", "first_passage_time"}, {}};
        for (size_t i = 0; i < m.samples.size(); ++i) samples.add({static_cast<int>(i), m.samples[i]});
        if (!out.empty()) emit(samples, out);
        Table s{"mfpt", {"eps", "n", "mean", "stderr", "censored", "quadrature", "tau"}, {}};
        s.add({eps, n, m.mean, m.stderr_, m.censored, q, build_context(spec, lm, eps).tau()});
        emit(s, "");
      } else {
        std::vector<double> times;
        for (int k = 0; k <= 100; ++k) times.push_back(t_final * k / 100);
        auto z = simulate_jump(z0, n, times, seed);
        Table s{"jump", {"t", "z_empirical", "z_reference"}, {}};
        for (size_t k = 0; k < times.size(); ++k) s.add({times[k], z[k], z0 * std::exp(-times[k])});
        emit(s, out);
      }
      return 0;
    }
    if (*gm) {
      auto r = run(cfg, Suite::gamma);
      write_report(r, cfg.output_dir);
      if (const Table* t = r.table("gamma")) emit(*t, "");
      return r.all_passed() ? 0 : 1;
    }
    if (*ep) {
      auto r = load_report(report_path);
      if (out.empty()) throw ConfigError("emit-plotdata: --out plot.csv is required");
      emit_plotdata(r, out);
      return 0;
    }
    if (*rn) {
      auto r = run(cfg, parse_suite(suite));
      write_report(r, cfg.output_dir);
      return print_verdicts(r);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
