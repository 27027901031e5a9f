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

#pragma once

#include <cstdint>
#include <vector>

#include "feqj/dynamics.hpp"
#include "feqj/trajectory.hpp"

namespace feqj {

struct EnsembleConfig {
  std::size_t n_trajectories = 1000;
  std::uint64_t master_seed = 0;
  /// Prefix sizes at which snapshot averages are taken; n_trajectories is
  /// always included. Strictly increasing.
  std::vector<std::size_t> checkpoints;
  bool keep_records = false;
  Execution exec = Execution::Parallel;
};

struct EnsembleResult {
  std::vector<std::size_t> checkpoints;
  /// snapshots[c][j]: average over trajectories [0, checkpoints[c]) at
  /// snapshot step j.
  std::vector<std::vector<ConditionedState>> snapshots;
  /// work[i][j]: work of trajectory i for the protocol stopped at
  /// measurement step j.
  std::vector<std::vector<double>> work;
  std::vector<TrajectoryRecord> records;
};

/// Runs trajectories 0..n-1 of `engine`. The parallel path sums fixed chunks
/// of 64 trajectories and adds chunk sums in order, so results do not depend
/// on the thread count. The serial path sums in plain index order.
EnsembleResult run_ensemble(const TrajectoryEngine& engine, const EnsembleConfig& cfg);

}  // namespace feqj
