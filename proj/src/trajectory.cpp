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

#include "feqj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "feqj/rng.hpp"

namespace feqj {

namespace {

constexpr double kMaxStepJumpProbability = 0.1;

inline double channel_weight(Direction d, double p0, double p1) {
  // <psi|a^dag a|psi> = p1 for a Down jump, <psi|a a^dag|psi> = p0 for Up.
  return d == Direction::Down ? p1 : p0;
}

inline QubitVector propagate_no_jump(const QubitVector& psi, Complex lambda, double up, double down,
                                     double dt, NoJumpScheme scheme) {
  const Complex i{0.0, 1.0};
  // H_eff = [[-i up/2, conj(lambda)], [lambda, omega_0 - i down/2]]
  const Complex h00{0.0, -0.5 * up};
  const Complex h01 = std::conj(lambda);
  const Complex h10 = lambda;
  const Complex h11{kQubitGap, -0.5 * down};
  if (scheme == NoJumpScheme::Euler) {
    return {psi[0] - i * dt * (h00 * psi[0] + h01 * psi[1]),
            psi[1] - i * dt * (h10 * psi[0] + h11 * psi[1])};
  }
  // Cayley: (1 + iH dt/2)^-1 (1 - iH dt/2) = 2 B^-1 - 1 with B = 1 + iH dt/2.
  const double hd = 0.5 * dt;
  const double b00 = 1.0 + 0.5 * hd * up;
  const Complex b11{1.0 + 0.5 * hd * down, hd * kQubitGap};
  const Complex b01 = i * hd * h01;
  const Complex b10 = i * hd * h10;
  const Complex two_over_det = 2.0 / (b00 * b11 + hd * hd * std::norm(lambda));
  return {(b11 * psi[0] - b01 * psi[1]) * two_over_det - psi[0],
          (b00 * psi[1] - b10 * psi[0]) * two_over_det - psi[1]};
}

inline void renormalize(QubitVector& psi, double t) {
  const double norm = psi.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw std::runtime_error("trajectory state norm vanished at t = " + std::to_string(t));
  }
  psi /= norm;
}

inline QubitVector jump_target(Direction d) {
  return d == Direction::Down ? QubitVector(1.0, 0.0) : QubitVector(0.0, 1.0);
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf.begin());
  return std::min(idx, cdf.size() - 1);
}

std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    c[i] = acc;
  }
  // Guard the last bin against rounding below 1.
  if (!c.empty()) c.back() = std::max(c.back(), 1.0);
  return c;
}

}  // namespace

std::vector<double> jump_probabilities(const SectorSpace& space, const TrajectoryState& state,
                                       double dt) {
  const double norm2 = state.qubit.squaredNorm();
  const double p0 = std::norm(state.qubit[0]) / norm2;
  const double p1 = std::norm(state.qubit[1]) / norm2;
  std::vector<double> dp;
  double total = 0.0;
  for (const auto& ch : space.channels(state.sector)) {
    dp.push_back(dt * ch.rate * channel_weight(ch.direction, p0, p1));
    total += dp.back();
  }
  if (total > kMaxStepJumpProbability) {
    std::ostringstream os;
    os << "jump probability " << total << " per step exceeds " << kMaxStepJumpProbability
       << "; reduce the time step";
    throw TimeStepTooLarge(os.str());
  }
  return dp;
}

TrajectoryState no_jump_step(const SectorSpace& space, const TrajectoryState& state,
                             const DriveProtocol& drive, double dt, NoJumpScheme scheme) {
  const double t_eval = scheme == NoJumpScheme::Cayley ? state.time + 0.5 * dt : state.time;
  TrajectoryState next = state;
  next.qubit = propagate_no_jump(state.qubit, drive.value(t_eval), space.up_rate(state.sector),
                                 space.down_rate(state.sector), dt, scheme);
  next.time = state.time + dt;
  renormalize(next.qubit, next.time);
  return next;
}

TrajectoryState commit_jump(const SectorSpace& space, const TrajectoryState& state,
                            std::size_t channel) {
  const auto channels = space.channels(state.sector);
  if (channel >= channels.size()) throw std::invalid_argument("jump channel out of range");
  const auto& ch = channels[channel];
  const double amp2 = std::norm(state.qubit[ch.direction == Direction::Down ? 1 : 0]);
  if (!(ch.rate > 0.0) || !(amp2 > 0.0)) {
    throw std::invalid_argument("jump channel has zero probability for this state");
  }
  TrajectoryState next = state;
  next.qubit = jump_target(ch.direction);
  next.sector = ch.target;
  return next;
}

ConditionedState SnapshotAccumulator::average(std::size_t snapshot, std::size_t count,
                                              Resolution resolution, double time) const {
  ConditionedState out{resolution, std::vector<QubitBlock>(n_sectors_), time};
  const double inv = count > 0 ? 1.0 / static_cast<double>(count) : 0.0;
  for (std::size_t s = 0; s < n_sectors_; ++s) out.blocks[s] = sums_[snapshot * n_sectors_ + s] * inv;
  return out;
}

TrajectoryEngine::TrajectoryEngine(TrajectoryConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.space) throw std::invalid_argument("trajectory config needs a sector space");
  if (cfg_.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  const double tau = cfg_.drive.total_time();
  if (!(tau > 0.0)) throw std::invalid_argument("drive total time must be > 0");
  dt_ = tau / static_cast<double>(cfg_.n_steps);

  lambda_start_.resize(cfg_.n_steps);
  lambda_mid_.resize(cfg_.n_steps);
  for (std::size_t k = 0; k < cfg_.n_steps; ++k) {
    lambda_start_[k] = cfg_.drive.value(static_cast<double>(k) * dt_);
    lambda_mid_[k] = cfg_.drive.value((static_cast<double>(k) + 0.5) * dt_);
  }

  const auto q = qubit_thermal_weights(cfg_.beta);
  qubit_cdf_ = cumulative({q[0], q[1]});
  sector_cdf_ = cumulative(cfg_.space->thermal_weights(cfg_.beta));

  auto check_steps = [&](const std::vector<std::size_t>& steps, const char* what) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i] > cfg_.n_steps || (i > 0 && steps[i] <= steps[i - 1])) {
        throw std::invalid_argument(std::string(what) +
                                    " steps must be strictly increasing and <= n_steps");
      }
    }
  };
  check_steps(cfg_.measurement_steps, "measurement");
  check_steps(cfg_.snapshot_steps, "snapshot");
  measure_ = cfg_.measurement_steps;
  if (measure_.empty() || measure_.back() != cfg_.n_steps) measure_.push_back(cfg_.n_steps);
}

TrajectoryState TrajectoryEngine::sample_initial(std::uint64_t master_seed,
                                                 std::uint64_t index) const {
  CounterRng rng(master_seed, index, StreamPurpose::InitialState);
  TrajectoryState st;
  const int i = static_cast<int>(sample_cdf(qubit_cdf_, rng.uniform()));
  st.qubit = i == 1 ? QubitVector(0.0, 1.0) : QubitVector(1.0, 0.0);
  st.sector = static_cast<SectorIndex>(sample_cdf(sector_cdf_, rng.uniform()));
  st.time = 0.0;
  return st;
}

TrajectoryRecord TrajectoryEngine::run(std::uint64_t master_seed, std::uint64_t index,
                                       SnapshotAccumulator* snapshots) const {
  const SectorSpace& space = *cfg_.space;
  TrajectoryState st = sample_initial(master_seed, index);
  CounterRng step_rng(master_seed, index, StreamPurpose::Steps);
  CounterRng measure_rng(master_seed, index, StreamPurpose::Measurement);

  TrajectoryRecord rec;
  rec.master_seed = master_seed;
  rec.index = index;
  rec.initial_qubit = std::norm(st.qubit[1]) > 0.5 ? 1 : 0;
  rec.initial_sector = st.sector;
  rec.work_at.reserve(measure_.size());
  const double e_initial = space.energy(st.sector);

  std::size_t next_snapshot = 0;
  std::size_t next_measure = 0;
  const auto& snap_steps = cfg_.snapshot_steps;
  auto visit = [&](std::size_t k) {
    while (snapshots && next_snapshot < snap_steps.size() && snap_steps[next_snapshot] == k) {
      snapshots->add(next_snapshot++, st.sector, st.qubit);
    }
    while (next_measure < measure_.size() && measure_[next_measure] == k) {
      const double p1 = std::norm(st.qubit[1]);
      const int f = measure_rng.uniform() < p1 ? 1 : 0;
      const double w = kQubitGap * (f - rec.initial_qubit) + (space.energy(st.sector) - e_initial);
      rec.work_at.push_back(w);
      if (k == cfg_.n_steps) {
        rec.final_qubit = f;
        rec.final_sector = st.sector;
        rec.work = w;
      }
      ++next_measure;
    }
  };

  visit(0);
  for (std::size_t k = 0; k < cfg_.n_steps; ++k) {
    const SectorIndex s = st.sector;
    const double p0 = std::norm(st.qubit[0]);
    const double p1 = std::norm(st.qubit[1]);
    const double total = dt_ * (space.down_rate(s) * p1 + space.up_rate(s) * p0);
    if (total > kMaxStepJumpProbability) {
      std::ostringstream os;
      os << "jump probability " << total << " per step exceeds " << kMaxStepJumpProbability
         << "; reduce the time step";
      throw TimeStepTooLarge(os.str());
    }
    const double u = step_rng.uniform();
    const double t = static_cast<double>(k) * dt_;
    if (u < 1.0 - total) {
      const bool cayley = cfg_.scheme == NoJumpScheme::Cayley;
      st.qubit = propagate_no_jump(st.qubit, cayley ? lambda_mid_[k] : lambda_start_[k],
                                   space.up_rate(s), space.down_rate(s), dt_, cfg_.scheme);
      renormalize(st.qubit, t + dt_);
    } else {
      // Partition [1 - total, 1) among channels in their fixed order.
      double x = u - (1.0 - total);
      const SectorChannel* chosen = nullptr;
      for (const auto& ch : space.channels(s)) {
        const double dp = dt_ * ch.rate * channel_weight(ch.direction, p0, p1);
        if (dp <= 0.0) continue;
        chosen = &ch;
        if (x < dp) break;
        x -= dp;
      }
      if (chosen) {
        if (cfg_.record_events) {
          rec.events.push_back({t, chosen->direction, chosen->mode,
                                space.energy(chosen->target) - space.energy(s)});
        }
        st.qubit = jump_target(chosen->direction);
        st.sector = chosen->target;
      }
    }
    st.time = static_cast<double>(k + 1) * dt_;
    visit(k + 1);
  }
  return rec;
}

TrajectoryRecord run_trajectory(std::uint64_t master_seed, std::uint64_t index,
                                const TrajectoryConfig& config) {
  return TrajectoryEngine(config).run(master_seed, index);
}

ConditionedState ensemble_average(std::span<const TrajectoryState> states,
                                  const SectorSpace& space) {
  ConditionedState out = ConditionedState::zeros(space, states.empty() ? 0.0 : states.front().time);
  if (states.empty()) return out;
  for (const auto& st : states) {
    if (st.sector >= space.size()) throw std::invalid_argument("trajectory sector out of range");
    const QubitVector psi = st.qubit.normalized();
    out.blocks[st.sector] += psi * psi.adjoint();
  }
  const double inv = 1.0 / static_cast<double>(states.size());
  for (auto& b : out.blocks) b *= inv;
  return out;
}

}  // namespace feqj
