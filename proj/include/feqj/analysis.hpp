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
#include <string>
#include <vector>

#include "feqj/dynamics.hpp"
#include "feqj/ensemble.hpp"
#include "feqj/work.hpp"

namespace feqj {

/// 1/2 sum_s sum |eig(A_s - B_s)|. Throws on a basis mismatch.
double trace_distance(const ConditionedState& a, const ConditionedState& b);

/// Named columns over a strictly increasing abscissa.
class ComparisonSeries {
 public:
  ComparisonSeries(std::string abscissa_name, std::vector<std::string> columns);

  void add_row(double x, std::vector<double> values);

  const std::string& abscissa_name() const { return abscissa_name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<double>& abscissa() const { return x_; }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  std::vector<double> column(const std::string& name) const;

 private:
  std::string abscissa_name_;
  std::vector<std::string> columns_;
  std::vector<double> x_;
  std::vector<std::vector<double>> rows_;
};

/// Shared settings for the experiment builders.
struct ExperimentSetup {
  std::shared_ptr<const SectorSpace> space;
  DriveProtocol drive = DriveProtocol::constant(0.0, 0.0);
  double beta = 1.0;
  IntegratorConfig integrator;
  /// Time steps of the trajectory engine over the whole drive.
  std::size_t trajectory_steps = 20000;
  NoJumpScheme scheme = NoJumpScheme::Cayley;
  Execution exec = Execution::Parallel;
};

/// Master-equation snapshots at `n_snapshots` + 1 equidistant times.
std::vector<ConditionedState> master_equation_snapshots(const ExperimentSetup& setup,
                                                        std::size_t n_snapshots,
                                                        InvariantReport* report = nullptr);

/// max over snapshots of trace_distance(ensemble(N), reference), one row
/// per N. `reference` must hold the same snapshot times as the ensemble.
ComparisonSeries max_trace_distance_vs_N(const EnsembleResult& ensemble,
                                         const std::vector<ConditionedState>& reference);

struct TraceDistanceStudy {
  /// Columns: T_max, T_max_stderr (over repetitions).
  ComparisonSeries series{"N", {"T_max", "T_max_stderr"}};
  /// T_max[rep][N index].
  std::vector<std::vector<double>> per_repetition;
  /// Least-squares slope of log mean T_max against log N.
  double slope = 0.0;
  InvariantReport report;
};

/// Runs `repetitions` ensembles with master seeds seed, seed + 1, ... and
/// compares them with the master equation on `n_snapshots` + 1 times.
TraceDistanceStudy trace_distance_study(const ExperimentSetup& setup,
                                        const std::vector<std::size_t>& n_list,
                                        std::size_t repetitions, std::uint64_t seed,
                                        std::size_t n_snapshots = 200);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Excited population on `n_points` + 1 equidistant times, one column per
/// drive frequency (named by `frequency_label`).
ComparisonSeries population_trace(const ExperimentSetup& setup,
                                  const std::vector<double>& frequencies, std::size_t n_points,
                                  InvariantReport* report = nullptr);

std::string frequency_label(double omega);

/// The sinusoidal drive retuned to `omega`; other kinds are returned as is.
DriveProtocol drive_at_frequency(const DriveProtocol& drive, double omega);

struct MomentsStudy {
  /// Columns: W1_tmp_prop, W1_tmp_mc, W1_tmp_mc_err, W1_poa, W2_tmp_prop,
  /// W2_tmp_mc, W2_tmp_mc_err, W2_poa, diag_eq20.
  ComparisonSeries series{"tau", {}};
  std::vector<WorkSample> samples;
  InvariantReport report;
  /// works[i][j]: trajectory i stopped at taus[j] (empty without sampling).
  std::vector<std::vector<double>> works;
  std::vector<TrajectoryRecord> records;
};

/// Moments for protocols stopped at each tau in `taus` (strictly
/// increasing, last <= drive.total_time()). Sampled moments use
/// `n_trajectories` (0 skips sampling; the mc columns are then NaN).
MomentsStudy moments_vs_tau(const ExperimentSetup& setup, const std::vector<double>& taus,
                            std::size_t n_trajectories, std::uint64_t seed,
                            bool keep_records = false);

std::vector<std::string> moments_columns();

}  // namespace feqj
