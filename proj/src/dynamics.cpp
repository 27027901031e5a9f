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

#include "feqj/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "feqj/integrator.hpp"
#include "feqj/linalg.hpp"

namespace feqj {

namespace {

// Below this many sectors the OpenMP fork costs more than the work.
constexpr std::size_t kParallelSectorThreshold = 64;

inline void liouvillian_block(const SectorSpace& space, Complex lambda, const QubitBlock* in,
                              SectorIndex s, QubitBlock& out) {
  const QubitBlock& sig = in[s];
  const Complex c = lambda;
  const Complex cb = std::conj(lambda);
  const double w = kQubitGap;
  const Complex i{0.0, 1.0};
  // i [sigma, H_q] with H_q = [[0, conj(lambda)], [lambda, omega_0]].
  Complex d00 = i * (sig(0, 1) * c - cb * sig(1, 0));
  Complex d01 = i * (cb * (sig(0, 0) - sig(1, 1)) + w * sig(0, 1));
  Complex d10 = i * (c * (sig(1, 1) - sig(0, 0)) - w * sig(1, 0));
  Complex d11 = i * (sig(1, 0) * cb - c * sig(0, 1));

  const double up = space.up_rate(s);
  const double down = space.down_rate(s);
  const double dephase = 0.5 * (up + down);
  d00 -= up * sig(0, 0);
  d11 -= down * sig(1, 1);
  d01 -= dephase * sig(0, 1);
  d10 -= dephase * sig(1, 0);
  // a sigma(src) a^dag = sigma_11(src) |0><0|, a^dag sigma(src) a = sigma_00(src) |1><1|.
  for (const auto& g : space.down_gains(s)) d00 += g.rate * in[g.source](1, 1);
  for (const auto& g : space.up_gains(s)) d11 += g.rate * in[g.source](0, 0);

  out(0, 0) = d00;
  out(0, 1) = d01;
  out(1, 0) = d10;
  out(1, 1) = d11;
}

void require_blocks(const SectorSpace& space, const ConditionedState& state) {
  if (state.resolution != space.resolution() || state.size() != space.size()) {
    std::ostringstream os;
    os << "state basis (" << to_string(state.resolution) << ", " << state.size()
       << " sectors) does not match sector space (" << to_string(space.resolution()) << ", "
       << space.size() << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

ConditionedState ConditionedState::zeros(const SectorSpace& space, double time) {
  return {space.resolution(), std::vector<QubitBlock>(space.size(), QubitBlock::Zero()), time};
}

double ConditionedState::total_trace() const {
  double tr = 0.0;
  for (const auto& b : blocks) tr += b(0, 0).real() + b(1, 1).real();
  return tr;
}

QubitBlock ConditionedState::reduced_qubit() const {
  QubitBlock q = QubitBlock::Zero();
  for (const auto& b : blocks) q += b;
  return q;
}

double ConditionedState::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

void apply_liouvillian(const SectorSpace& space, Complex lambda, std::span<const QubitBlock> in,
                       std::span<QubitBlock> out, Execution exec) {
  const std::size_t n = space.size();
  const QubitBlock* src = in.data();
  QubitBlock* dst = out.data();
  const bool parallel = exec == Execution::Parallel && n >= kParallelSectorThreshold;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t s = 0; s < n; ++s) {
    liouvillian_block(space, lambda, src, static_cast<SectorIndex>(s), dst[s]);
  }
}

Liouvillian::Liouvillian(std::shared_ptr<const SectorSpace> space, DriveProtocol drive,
                         Execution exec)
    : space_(std::move(space)), drive_(std::move(drive)), exec_(exec) {
  if (!space_) throw std::invalid_argument("Liouvillian needs a sector space");
}

void Liouvillian::apply(std::span<const QubitBlock> in, double t, std::span<QubitBlock> out) const {
  if (in.size() != space_->size() || out.size() != space_->size()) {
    throw std::invalid_argument("block count does not match sector space");
  }
  apply_liouvillian(*space_, drive_.value(t), in, out, exec_);
}

ConditionedState Liouvillian::operator()(const ConditionedState& state) const {
  require_blocks(*space_, state);
  ConditionedState out = ConditionedState::zeros(*space_, state.time);
  apply(state.blocks, state.time, out.blocks);
  return out;
}

ConditionedState liouvillian_microstate(const Liouvillian& L, const ConditionedState& state) {
  if (L.space().resolution() != Resolution::Microstate) {
    throw std::invalid_argument("liouvillian_microstate needs a microstate-resolved space");
  }
  return L(state);
}

ConditionedState liouvillian_energy(const Liouvillian& L, const ConditionedState& state) {
  if (L.space().resolution() != Resolution::Microcanonical) {
    throw std::invalid_argument("liouvillian_energy needs an energy-resolved space");
  }
  return L(state);
}

bool InvariantReport::within(const IntegratorConfig& cfg) const {
  return max_trace_drift < cfg.trace_tolerance &&
         max_hermiticity_residual < cfg.hermiticity_tolerance &&
         min_eigenvalue > -cfg.positivity_tolerance;
}

void InvariantReport::merge(const InvariantReport& other) {
  max_trace_drift = std::max(max_trace_drift, other.max_trace_drift);
  max_hermiticity_residual = std::max(max_hermiticity_residual, other.max_hermiticity_residual);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
  steps += other.steps;
}

double finish_density_step(std::span<QubitBlock> blocks, InvariantReport& report,
                           bool check_positivity, const IntegratorConfig& cfg, double t) {
  double min_ev = std::numeric_limits<double>::infinity();
  for (auto& b : blocks) {
    if (!all_finite(b)) {
      throw IntegrationFailure("non-finite state entry at t = " + std::to_string(t) +
                               " (step too large?)");
    }
    report.max_hermiticity_residual =
        std::max(report.max_hermiticity_residual, hermiticity_residual(b));
    symmetrize(b);
    if (check_positivity) min_ev = std::min(min_ev, hermitian_eigenvalues(b)[0]);
  }
  if (check_positivity) {
    report.min_eigenvalue = std::min(report.min_eigenvalue, min_ev);
    if (min_ev < -cfg.positivity_tolerance) {
      std::ostringstream os;
      os << "block eigenvalue " << min_ev << " below -" << cfg.positivity_tolerance
         << " at t = " << t;
      throw IntegrationFailure(os.str());
    }
  }
  return min_ev;
}

ConditionedState step(const Liouvillian& L, const ConditionedState& state, double h,
                      Method method) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be > 0");
  require_blocks(L.space(), state);
  ConditionedState next = state;
  BlockIntegrator integ(state.size());
  integ.step(next.blocks, state.time, h, method,
             [&](double t, std::span<const QubitBlock> y, std::span<QubitBlock> dy) {
               L.apply(y, t, dy);
             });
  next.time = state.time + h;
  InvariantReport unused;
  finish_density_step(next.blocks, unused, false, IntegratorConfig{}, next.time);
  return next;
}

InvariantReport propagate(const Liouvillian& L, ConditionedState& state, double t_end,
                          const IntegratorConfig& cfg, const StepObserver& observer) {
  require_blocks(L.space(), state);
  if (cfg.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(t_end >= state.time)) throw std::invalid_argument("t_end precedes the state time");
  const double t0 = state.time;
  const double h = (t_end - t0) / static_cast<double>(cfg.n_steps);
  const double trace0 = state.total_trace();

  InvariantReport report;
  for (const auto& b : state.blocks) {
    report.min_eigenvalue = std::min(report.min_eigenvalue, hermitian_eigenvalues(b)[0]);
  }
  if (observer) observer(0, state);
  if (h == 0.0) return report;

  BlockIntegrator integ(state.size());
  auto rhs = [&](double t, std::span<const QubitBlock> y, std::span<QubitBlock> dy) {
    L.apply(y, t, dy);
  };
  for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
    const double t = t0 + static_cast<double>(k - 1) * h;
    const double t_next = k == cfg.n_steps ? t_end : t0 + static_cast<double>(k) * h;
    integ.step(state.blocks, t, h, t_next, cfg.method, rhs);
    state.time = t_next;
    finish_density_step(state.blocks, report, true, cfg, state.time);
    report.max_trace_drift = std::max(report.max_trace_drift, std::abs(state.total_trace() - trace0));
    ++report.steps;
    if (observer) observer(k, state);
  }
  return report;
}

ConditionedState thermal_state(double beta, const SectorSpace& space) {
  const auto q = qubit_thermal_weights(beta);
  const auto c = space.thermal_weights(beta);
  ConditionedState state = ConditionedState::zeros(space);
  for (std::size_t s = 0; s < space.size(); ++s) {
    state.blocks[s](0, 0) = q[0] * c[s];
    state.blocks[s](1, 1) = q[1] * c[s];
  }
  return state;
}

double excited_population(const ConditionedState& state) {
  double p = 0.0;
  for (const auto& b : state.blocks) p += b(1, 1).real();
  return p;
}

ConditionedState aggregate_by_energy(const SectorSpace& microstates, const ConditionedState& state) {
  require_blocks(microstates, state);
  if (microstates.resolution() != Resolution::Microstate) {
    throw std::invalid_argument("aggregate_by_energy expects a microstate-resolved state");
  }
  const int m_max = microstates.calorimeter().max_excitations();
  ConditionedState out{Resolution::Microcanonical,
                       std::vector<QubitBlock>(static_cast<std::size_t>(m_max + 1), QubitBlock::Zero()),
                       state.time};
  for (std::size_t s = 0; s < state.size(); ++s) {
    out.blocks[static_cast<std::size_t>(microstates.excitations(static_cast<SectorIndex>(s)))] +=
        state.blocks[s];
  }
  return out;
}

}  // namespace feqj
