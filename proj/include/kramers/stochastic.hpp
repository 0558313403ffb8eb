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

#include <array>
#include <cstdint>
#include <vector>

#include "kramers/grid.hpp"
#include "kramers/measures.hpp"
#include "kramers/potential.hpp"

namespace kramers {

// Philox4x32-10 counter-based generator. Particle i of a run with seed s owns
// the stream with key s and counter words (., ., i_lo, i_hi).
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream);
  std::array<std::uint32_t, 4> next_block();
  double uniform();  // in (0, 1)
  double normal();   // Box-Muller

  // UniformRandomBitGenerator interface for library distributions
  using result_type = std::uint32_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()();

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  double spare_ = 0;
  bool has_spare_ = false;
};

// Binned summary of an ensemble; nothing per particle is stored.
struct EnsembleResult {
  int n = 0;
  std::uint64_t seed = 0;
  Grid1D bins;
  std::vector<double> t;                      // snapshot times
  std::vector<std::vector<double>> density;   // fraction per bin, particles beyond the ends in the end bins
  std::vector<std::vector<double>> flux;      // net crossings per particle per unit time, window ending at t
  std::vector<double> left_fraction;          // fraction with x < x_0
  std::vector<double> mfpt_samples;
};

struct SdeOptions {
  Grid1D bins;       // defaults to 64 cells on [x_a - 1, x_b + 1]
  int snapshots = 60;
};

// Upscaled Euler-Maruyama for dX = -tau V' dt + sqrt(2 eps tau) dB. Throws
// StabilityError unless dt tau sup|V''| <= 0.1 on [x_a - 1/2, x_b + 1/2].
EnsembleResult simulate_sde(const EpsilonContext& ctx, double x0, double dt, double horizon, int n,
                            std::uint64_t seed, const SdeOptions& opt = {});
// Single-threaded reference with identical output.
EnsembleResult simulate_sde_serial(const EpsilonContext& ctx, double x0, double dt, double horizon, int n,
                                   std::uint64_t seed, const SdeOptions& opt = {});

double sde_stability_number(const EpsilonContext& ctx, double dt);

struct MfptEstimate {
  double mean = 0;
  double stderr_ = 0;
  int censored = 0;  // paths stopped at 100 times the Kramers time
  std::vector<double> samples;
};

// Unscaled dY = -V' dt + sqrt(2 eps) dB from x_a until Y >= x_b. dt = 0 picks
// 0.01 / sup|V''|.
MfptEstimate mfpt_monte_carlo(const PotentialSpec& spec, const LandmarkReport& report, double eps, int n,
                              std::uint64_t seed, double dt = 0.0);

// (1/eps) int_a^b e^{V(y)/eps} int_{-inf}^y e^{-V(z)/eps} dz dy in log space.
double mfpt_quadrature(const PotentialSpec& spec, double eps, double a, double b);

// n independent particles, each in state a with probability z0, leaving at
// rate one; returns the fraction in a at the given times.
std::vector<double> simulate_jump(double z0, int n, const std::vector<double>& times, std::uint64_t seed);

}  // namespace kramers
