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

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "feqj/dynamics.hpp"
#include "feqj/model.hpp"
#include "feqj/sectors.hpp"

namespace feqj {

/// Pure qubit state conditioned on a definite calorimeter sector.
struct TrajectoryState {
  QubitVector qubit = QubitVector(1.0, 0.0);
  SectorIndex sector = 0;
  double time = 0.0;
};

struct JumpEvent {
  double time = 0.0;
  Direction direction = Direction::Down;
  std::uint32_t mode = 0;
  /// Energy delivered to the calorimeter (positive for Down jumps).
  double heat = 0.0;
};

struct TrajectoryRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  int initial_qubit = 0;
  SectorIndex initial_sector = 0;
  std::vector<JumpEvent> events;
  int final_qubit = 0;
  SectorIndex final_sector = 0;
  /// Two-measurement work at the final time.
  double work = 0.0;
  /// Work for the protocol stopped at each measurement step.
  std::vector<double> work_at;
};

/// How the state is advanced over a step without a jump.
enum class NoJumpScheme {
  /// Cayley form (1 + i H dt/2)^-1 (1 - i H dt/2) at the step midpoint.
  Cayley,
  /// 1 - i H dt at the step start.
  Euler,
};

class TimeStepTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Jump probability for every channel leaving the current sector, in the
/// order of SectorSpace::channels(). Throws TimeStepTooLarge when the total
/// exceeds 0.1.
std::vector<double> jump_probabilities(const SectorSpace& space, const TrajectoryState& state,
                                       double dt);

/// Non-unitary evolution under H_q - (i/2) sum_m Gamma_m A_m^dag A_m over dt,
/// followed by renormalization. The sector is unchanged.
TrajectoryState no_jump_step(const SectorSpace& space, const TrajectoryState& state,
                             const DriveProtocol& drive, double dt,
                             NoJumpScheme scheme = NoJumpScheme::Cayley);

/// Apply channel `channel` of the current sector. Throws std::invalid_argument
/// if the channel has zero probability for this state.
TrajectoryState commit_jump(const SectorSpace& space, const TrajectoryState& state,
                            std::size_t channel);

/// Per-snapshot, per-sector sums of |psi><psi|.
class SnapshotAccumulator {
 public:
  SnapshotAccumulator(std::size_t n_snapshots, std::size_t n_sectors)
      : n_sectors_(n_sectors), sums_(n_snapshots * n_sectors, QubitBlock::Zero()) {}

  void add(std::size_t snapshot, SectorIndex sector, const QubitVector& psi) {
    sums_[snapshot * n_sectors_ + sector] += psi * psi.adjoint();
  }
  void add(const SnapshotAccumulator& other) {
    for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
  }
  void clear() { std::fill(sums_.begin(), sums_.end(), QubitBlock::Zero()); }

  std::size_t n_snapshots() const { return n_sectors_ ? sums_.size() / n_sectors_ : 0; }
  std::size_t n_sectors() const { return n_sectors_; }
  /// Average over `count` trajectories as a composite state.
  ConditionedState average(std::size_t snapshot, std::size_t count, Resolution resolution,
                           double time) const;

 private:
  std::size_t n_sectors_;
  std::vector<QubitBlock> sums_;
};

struct TrajectoryConfig {
  std::shared_ptr<const SectorSpace> space;
  DriveProtocol drive = DriveProtocol::constant(0.0, 0.0);
  double beta = 1.0;
  std::size_t n_steps = 100000;
  NoJumpScheme scheme = NoJumpScheme::Cayley;
  /// Steps at which the protocol is (virtually) stopped and the qubit
  /// measured; strictly increasing, each <= n_steps. The final step is
  /// always measured.
  std::vector<std::size_t> measurement_steps;
  /// Steps at which |psi><psi| is handed to a SnapshotAccumulator.
  std::vector<std::size_t> snapshot_steps;
  bool record_events = true;
};

/// Runs FEQJ trajectories for a fixed configuration. The drive is tabulated
/// once on the step grid and shared read-only between concurrent runs.
class TrajectoryEngine {
 public:
  explicit TrajectoryEngine(TrajectoryConfig cfg);

  const TrajectoryConfig& config() const { return cfg_; }
  const SectorSpace& space() const { return *cfg_.space; }
  double dt() const { return dt_; }
  /// Measurement steps actually used (n_steps appended if missing).
  const std::vector<std::size_t>& measurement_steps() const { return measure_; }

  /// Trajectory `index` of the ensemble seeded by `master_seed`; a pure
  /// function of both.
  TrajectoryRecord run(std::uint64_t master_seed, std::uint64_t index,
                       SnapshotAccumulator* snapshots = nullptr) const;

 private:
  TrajectoryState sample_initial(std::uint64_t master_seed, std::uint64_t index) const;

  TrajectoryConfig cfg_;
  double dt_;
  std::vector<Complex> lambda_start_;
  std::vector<Complex> lambda_mid_;
  std::vector<double> qubit_cdf_;
  std::vector<double> sector_cdf_;
  std::vector<std::size_t> measure_;
};

TrajectoryRecord run_trajectory(std::uint64_t master_seed, std::uint64_t index,
                                const TrajectoryConfig& config);

/// (1/N) sum_traj |psi><psi| placed in each trajectory's sector.
ConditionedState ensemble_average(std::span<const TrajectoryState> states, const SectorSpace& space);

}  // namespace feqj
