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

// Serial reference against the OpenMP ensemble kernel. Both produce identical
// bins for the same seed; the benchmark checks that once before timing.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cstdlib>
#include <iostream>

#include "kramers/measures.hpp"
#include "kramers/potential.hpp"
#include "kramers/stochastic.hpp"

namespace {

using namespace kramers;

const EpsilonContext& context() {
  static const EpsilonContext ctx = [] {
    auto spec = reference_potential();
    return build_context(spec, validate(spec), 0.35);
  }();
  return ctx;
}

double step(const EpsilonContext& c) { return 0.0999 / sde_stability_number(c, 1.0); }

void BM_SdeSerial(benchmark::State& state) {
  const auto& c = context();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = simulate_sde_serial(c, c.landmarks.x_a, step(c), 0.5, n, 7);
    benchmark::DoNotOptimize(r.left_fraction.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_SdeOpenMP(benchmark::State& state) {
  const auto& c = context();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = simulate_sde(c, c.landmarks.x_a, step(c), 0.5, n, 7);
    benchmark::DoNotOptimize(r.left_fraction.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
  state.counters["threads"] = omp_get_max_threads();
}

BENCHMARK(BM_SdeSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SdeOpenMP)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  const auto& c = context();
  auto a = simulate_sde_serial(c, c.landmarks.x_a, step(c), 0.2, 64, 11);
  auto b = simulate_sde(c, c.landmarks.x_a, step(c), 0.2, 64, 11);
  if (a.density != b.density || a.flux != b.flux || a.left_fraction != b.left_fraction) {
    std::cerr << "serial and OpenMP ensembles differ\n";
    return EXIT_FAILURE;
  }
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return EXIT_FAILURE;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return EXIT_SUCCESS;
}
