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

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "feqj/model.hpp"
#include "feqj/sectors.hpp"

namespace feqj {

enum class Execution { Serial, Parallel };

/// Block-diagonal composite state: one qubit block per calorimeter sector.
/// The trace of a block is the probability of its sector.
struct ConditionedState {
  Resolution resolution = Resolution::Microcanonical;
  std::vector<QubitBlock> blocks;
  double time = 0.0;

  static ConditionedState zeros(const SectorSpace& space, double time = 0.0);

  std::size_t size() const { return blocks.size(); }
  double total_trace() const;
  /// Partial trace over the calorimeter.
  QubitBlock reduced_qubit() const;
  /// Largest |entry| over all blocks.
  double max_abs() const;
};

/// Master-equation generator on the sector graph. Handles both resolutions:
/// the sector graph already carries per-microstate or shell-averaged rates.
class Liouvillian {
 public:
  Liouvillian(std::shared_ptr<const SectorSpace> space, DriveProtocol drive,
              Execution exec = Execution::Parallel);

  const SectorSpace& space() const { return *space_; }
  const std::shared_ptr<const SectorSpace>& space_ptr() const { return space_; }
  const DriveProtocol& drive() const { return drive_; }
  Execution execution() const { return exec_; }

  /// out = L_t[in]. Blocks need not be hermitian.
  void apply(std::span<const QubitBlock> in, double t, std::span<QubitBlock> out) const;
  ConditionedState operator()(const ConditionedState& state) const;

 private:
  std::shared_ptr<const SectorSpace> space_;
  DriveProtocol drive_;
  Execution exec_;
};

/// The raw per-sector kernel, with lambda already evaluated. Serial and
/// OpenMP paths produce bit-identical output.
void apply_liouvillian(const SectorSpace& space, Complex lambda, std::span<const QubitBlock> in,
                       std::span<QubitBlock> out, Execution exec);

/// d sigma(n,t)/dt for microstate-resolved states.
ConditionedState liouvillian_microstate(const Liouvillian& L, const ConditionedState& state);
/// d sigma(E,t)/dt for energy-shell-resolved states.
ConditionedState liouvillian_energy(const Liouvillian& L, const ConditionedState& state);

enum class Method { RK4, Euler };

struct IntegratorConfig {
  std::size_t n_steps = 100000;
  Method method = Method::RK4;
  double trace_tolerance = 1e-8;
  double hermiticity_tolerance = 1e-12;
  double positivity_tolerance = 1e-8;
};

/// Worst values seen by the invariant monitor over a run.
struct InvariantReport {
  double max_trace_drift = 0.0;
  /// Largest |block - block^dag| entry produced by a step, before the
  /// symmetrization that follows it.
  double max_hermiticity_residual = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;

  bool within(const IntegratorConfig& cfg) const;
  void merge(const InvariantReport& other);
};

class IntegrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Advance state.time by h. Hermitian symmetrization is applied afterwards.
ConditionedState step(const Liouvillian& L, const ConditionedState& state, double h,
                      Method method = Method::RK4);

/// Per-step observer: (step index, state after that step). Called for step 0
/// with the initial state.
using StepObserver = std::function<void(std::size_t, const ConditionedState&)>;

/// Integrate from state.time to t_end in cfg.n_steps equal steps, monitoring
/// trace, hermiticity and positivity. A block eigenvalue below
/// -cfg.positivity_tolerance or a non-finite entry throws IntegrationFailure.
InvariantReport propagate(const Liouvillian& L, ConditionedState& state, double t_end,
                          const IntegratorConfig& cfg, const StepObserver& observer = {});

/// Thermal product state of qubit and calorimeter at inverse temperature
/// beta (beta = +inf gives the ground state).
ConditionedState thermal_state(double beta, const SectorSpace& space);

/// sum over sectors of <1|block|1>.
double excited_population(const ConditionedState& state);

/// Sum blocks of a microstate-resolved state by excitation count.
ConditionedState aggregate_by_energy(const SectorSpace& microstates, const ConditionedState& state);

}  // namespace feqj
