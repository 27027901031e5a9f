// Copyright 2026 The feqj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP paths for the three hot kernels.

#include <benchmark/benchmark.h>

#include "feqj/ensemble.hpp"
#include "feqj/work.hpp"

using namespace feqj;

namespace {

Execution exec_of(const benchmark::State& st) {
  return st.range(1) ? Execution::Parallel : Execution::Serial;
}

void BM_Liouvillian(benchmark::State& st) {
  auto space = SectorSpace::make(
      CalorimeterModel::two_level_bath(static_cast<int>(st.range(0)), 0.001, Resolution::Microstate));
  const auto in = thermal_state(1.0, *space);
  std::vector<QubitBlock> out(space->size());
  for (auto _ : st) {
    apply_liouvillian(*space, Complex(0.01, 0.02), in.blocks, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(space->size()));
}
BENCHMARK(BM_Liouvillian)->ArgsProduct({{8, 12, 16}, {0, 1}});

void BM_Ensemble(benchmark::State& st) {
  TrajectoryConfig cfg;
  cfg.space = SectorSpace::make(CalorimeterModel::two_level_bath(10, 0.001, Resolution::Microcanonical));
  cfg.drive = DriveProtocol::sinusoidal(0.05, 1.0, 100.0);
  cfg.n_steps = 20000;
  cfg.record_events = false;
  const TrajectoryEngine engine(cfg);
  EnsembleConfig ec;
  ec.n_trajectories = static_cast<std::size_t>(st.range(0));
  ec.exec = exec_of(st);
  for (auto _ : st) {
    auto r = run_ensemble(engine, ec);
    benchmark::DoNotOptimize(r.work.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * 20000);
}
BENCHMARK(BM_Ensemble)->ArgsProduct({{256}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PerInitialState(benchmark::State& st) {
  WorkConfig cfg;
  cfg.space = SectorSpace::make(CalorimeterModel::two_level_bath(6, 0.001, Resolution::Microstate));
  cfg.drive = DriveProtocol::sinusoidal(0.05, 1.0, 20.0);
  cfg.integrator.n_steps = 500;
  for (auto _ : st) {
    auto m = tmp_moments_per_initial_state(cfg, 2, exec_of(st));
    benchmark::DoNotOptimize(m.data());
  }
}
BENCHMARK(BM_PerInitialState)->ArgsProduct({{6}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
