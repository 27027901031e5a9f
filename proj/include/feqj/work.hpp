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

#include <memory>
#include <span>
#include <vector>

#include "feqj/dynamics.hpp"
#include "feqj/trajectory.hpp"

namespace feqj {

enum class MomentMethod { TmpPropagated, TmpTrajectories, PowerOperator };

struct WorkMoments {
  MomentMethod method = MomentMethod::TmpPropagated;
  double first = 0.0;
  double second = 0.0;
  /// Standard errors of the sample means (sampled estimates only).
  double first_err = 0.0;
  double second_err = 0.0;
};

struct WorkConfig {
  std::shared_ptr<const SectorSpace> space;
  DriveProtocol drive = DriveProtocol::constant(0.0, 0.0);
  double beta = 1.0;
  /// n_steps spans [0, drive.total_time()].
  IntegratorConfig integrator;
  Execution exec = Execution::Parallel;
};

/// Everything the deterministic work machinery produces at one time t,
/// read as a protocol stopped at t.
struct WorkSample {
  double time = 0.0;
  /// <W^n> for n = 0..n_max from the two-measurement protocol with
  /// measurements in the undriven basis.
  std::vector<double> tmp;
  double poa_first = 0.0;
  double poa_second = 0.0;
  /// -sum_s Gamma_tot(s) int Re{lambda sigma_01(s)} dt.
  double diagnostic = 0.0;
  /// int sum_s Tr{(H_q(t) + E_s) d sigma_s/dt} dt.
  double dissipated_power_integral = 0.0;
  /// Tr{V_D(t) rho(t)}; W_tmp = W_poa + integral - (boundary(t) - boundary(0)).
  double boundary = 0.0;
  double excited_population = 0.0;
};

struct WorkSweep {
  std::vector<WorkSample> samples;
  InvariantReport report;
};

/// One pass over [0, drive.total_time()] carrying (-H)^m rho(0) for
/// m = 0..n_max, the auxiliary power matrix and the scalar integrals.
/// `sample_steps` must be strictly increasing and <= n_steps.
WorkSweep work_sweep(const WorkConfig& cfg, const std::vector<std::size_t>& sample_steps,
                     int n_max = 2);

/// <W^n>, n = 0..n_max, at the end of the drive (aggregated propagation).
std::vector<double> tmp_moments_propagated(const WorkConfig& cfg, int n_max);
WorkMoments tmp_moments_propagated(const WorkConfig& cfg);

/// State at the end of the drive started from |i><i| in sector s.
ConditionedState propagate_chi(const WorkConfig& cfg, int qubit, SectorIndex sector);

/// Same moments as tmp_moments_propagated but propagating every initial
/// projector with nonzero thermal weight on its own and summing the results
/// in (sector, qubit) order. Serial execution runs them one after another.
std::vector<double> tmp_moments_per_initial_state(const WorkConfig& cfg, int n_max,
                                                  Execution exec = Execution::Parallel);

WorkMoments tmp_moments_sampled(std::span<const double> works);
WorkMoments tmp_moments_sampled(std::span<const TrajectoryRecord> records);

WorkMoments poa_moments(const WorkConfig& cfg);

/// Cumulative difference diagnostic at `n_samples` + 1 equidistant times
/// including 0 and the end of the drive.
std::vector<WorkSample> tmp_poa_difference_diagnostic(const WorkConfig& cfg,
                                                      std::size_t n_samples);

/// Tr{H^k sigma} summed over sectors, H = H_0 + H_c.
double energy_moment(const SectorSpace& space, const ConditionedState& state, int k);

}  // namespace feqj
