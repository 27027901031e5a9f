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

#include <cmath>
#include <limits>
#include <numbers>

#include <omp.h>

#include "doctest.h"

#include "feqj/analysis.hpp"
#include "feqj/ensemble.hpp"
#include "feqj/trajectory.hpp"

using namespace feqj;

namespace {

std::shared_ptr<const SectorSpace> bath(int n, double g2, Resolution res) {
  return SectorSpace::make(CalorimeterModel::two_level_bath(n, g2, res));
}

TrajectoryState make_state(QubitVector psi, SectorIndex s, double t = 0.0) {
  TrajectoryState st;
  st.qubit = psi.normalized();
  st.sector = s;
  st.time = t;
  return st;
}

// Expected composite state after one step: no-jump branch plus every jump
// branch, weighted by their probabilities.
ConditionedState one_step_expectation(const SectorSpace& space, const TrajectoryState& st,
                                      const DriveProtocol& drive, double dt, NoJumpScheme scheme) {
  const auto dp = jump_probabilities(space, st, dt);
  double total = 0.0;
  for (double p : dp) total += p;
  ConditionedState out = ConditionedState::zeros(space, st.time + dt);
  const auto nj = no_jump_step(space, st, drive, dt, scheme);
  out.blocks[nj.sector] += (1.0 - total) * nj.qubit * nj.qubit.adjoint();
  for (std::size_t c = 0; c < dp.size(); ++c) {
    if (dp[c] == 0.0) continue;
    const auto j = commit_jump(space, st, c);
    out.blocks[j.sector] += dp[c] * j.qubit * j.qubit.adjoint();
  }
  return out;
}

}  // namespace

TEST_CASE("jump probabilities for basis states") {
  auto shells = bath(10, 0.001, Resolution::Microcanonical);
  const double dt = 0.01;
  // Ground qubit in shell m: only absorption, total dt g^2 m.
  const SectorIndex m4 = shells->index_of_excitations(4);
  const auto up = jump_probabilities(*shells, make_state({1.0, 0.0}, m4), dt);
  double sum = 0.0;
  for (std::size_t c = 0; c < up.size(); ++c) {
    const auto& ch = shells->channels(m4)[c];
    if (ch.direction == Direction::Down) CHECK(up[c] == 0.0);
    sum += up[c];
  }
  CHECK(sum == doctest::Approx(dt * 0.001 * 4).epsilon(1e-14));

  auto micro = bath(10, 0.001, Resolution::Microstate);
  const SectorIndex g0 = micro->index_of(Microstate::ground(micro->calorimeter()));
  const auto down = jump_probabilities(*micro, make_state({0.0, 1.0}, g0), dt);
  sum = 0.0;
  for (double p : down) sum += p;
  CHECK(sum == doctest::Approx(dt * 10 * 0.001).epsilon(1e-14));
  CHECK(down.size() == 10);

  auto free = bath(10, 0.0, Resolution::Microcanonical);
  for (double p : jump_probabilities(*free, make_state({0.6, 0.8}, 5), dt)) CHECK(p == 0.0);

  auto strong = bath(10, 5.0, Resolution::Microcanonical);
  CHECK_THROWS_AS(jump_probabilities(*strong, make_state({0.0, 1.0}, 0), 0.01), TimeStepTooLarge);
}

TEST_CASE("no-jump step without coupling or drive only rotates phases") {
  auto space = bath(3, 0.0, Resolution::Microcanonical);
  const auto drive = DriveProtocol::constant(0.0, 10.0);
  for (auto scheme : {NoJumpScheme::Cayley, NoJumpScheme::Euler}) {
    const auto st = no_jump_step(*space, make_state({0.0, 1.0}, 1), drive, 0.01, scheme);
    CHECK(std::norm(st.qubit[1]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(st.qubit[0]) == 0.0);
    CHECK(st.sector == 1);
    CHECK(st.time == doctest::Approx(0.01));
  }
}

TEST_CASE("no-jump evolution bends populations toward the undecayed level") {
  // Superposition over the empty calorimeter: only |1> leaks (down jumps).
  auto space = bath(10, 0.001, Resolution::Microcanonical);
  const auto drive = DriveProtocol::constant(0.0, 10.0);
  const double dt = 0.01, gamma = 0.01;
  const auto st = make_state({1.0, 1.0}, space->index_of_excitations(0));
  const auto e = no_jump_step(*space, st, drive, dt, NoJumpScheme::Euler);
  // Euler: |1 - i dt (1 - i gamma/2)|^2 relative to |1|^2 for |0>.
  const double ratio_euler = std::pow(1.0 - 0.5 * gamma * dt, 2) + dt * dt;
  CHECK(std::norm(e.qubit[1]) / std::norm(e.qubit[0]) == doctest::Approx(ratio_euler).epsilon(1e-13));
  const auto c = no_jump_step(*space, st, drive, dt, NoJumpScheme::Cayley);
  CHECK(std::norm(c.qubit[1]) / std::norm(c.qubit[0]) == doctest::Approx(std::exp(-gamma * dt)).epsilon(1e-8));
  CHECK(c.qubit.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("jumps project the qubit and move the calorimeter") {
  auto shells = bath(10, 0.001, Resolution::Microcanonical);
  const SectorIndex m4 = shells->index_of_excitations(4);
  const auto st = make_state({0.3, 0.7}, m4);
  for (std::size_t c = 0; c < shells->channels(m4).size(); ++c) {
    const auto& ch = shells->channels(m4)[c];
    const auto j = commit_jump(*shells, st, c);
    if (ch.direction == Direction::Down) {
      CHECK(j.qubit == QubitVector(1.0, 0.0));
      CHECK(shells->excitations(j.sector) == 5);
    } else {
      CHECK(j.qubit == QubitVector(0.0, 1.0));
      CHECK(shells->excitations(j.sector) == 3);
    }
  }
  const auto ground = make_state({1.0, 0.0}, m4);
  for (std::size_t c = 0; c < shells->channels(m4).size(); ++c) {
    if (shells->channels(m4)[c].direction == Direction::Down) {
      CHECK_THROWS_AS(commit_jump(*shells, ground, c), std::invalid_argument);
    }
  }
}

TEST_CASE("one-step average reproduces the master equation to first order") {
  for (auto res : {Resolution::Microstate, Resolution::Microcanonical}) {
    auto space = bath(4, 0.05, res);
    const auto drive = DriveProtocol::sinusoidal(0.2, 0.9, 10.0);
    Liouvillian L(space, drive);
    const SectorIndex s = res == Resolution::Microstate
                              ? space->index_of(Microstate({1, 0, 1, 0}))
                              : space->index_of_excitations(2);  // both up and down open
    const auto st = make_state({Complex(0.6, 0.1), Complex(0.3, -0.7)}, s, 1.3);
    for (auto scheme : {NoJumpScheme::Cayley, NoJumpScheme::Euler}) {
      std::vector<double> err;
      for (double dt : {1e-2, 5e-3, 2.5e-3}) {
        ConditionedState rho = ConditionedState::zeros(*space, st.time);
        rho.blocks[s] = st.qubit * st.qubit.adjoint();
        const auto d = L(rho);
        const auto avg = one_step_expectation(*space, st, drive, dt, scheme);
        double e = 0.0;
        for (std::size_t b = 0; b < space->size(); ++b) {
          e = std::max(e, (avg.blocks[b] - rho.blocks[b] - dt * d.blocks[b]).cwiseAbs().maxCoeff());
        }
        err.push_back(e);
      }
      // Second-order remainder: halving dt quarters the error.
      CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
      CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.1));
    }
  }
}

TEST_CASE("undriven trajectories do zero work") {
  TrajectoryConfig cfg;
  cfg.space = bath(10, 0.01, Resolution::Microcanonical);
  cfg.drive = DriveProtocol::constant(0.0, 50.0);
  cfg.beta = 0.5;
  cfg.n_steps = 5000;
  const TrajectoryEngine engine(cfg);
  std::size_t jumps = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    const auto r = engine.run(11, i);
    CHECK(r.work == 0.0);
    jumps += r.events.size();
  }
  CHECK(jumps > 0);
}

TEST_CASE("work equals qubit change plus heat along every trajectory") {
  for (auto res : {Resolution::Microstate, Resolution::Microcanonical}) {
    TrajectoryConfig cfg;
    cfg.space = bath(6, 0.01, res);
    cfg.drive = DriveProtocol::sinusoidal(0.1, 1.0, 60.0);
    cfg.beta = 1.0;
    cfg.n_steps = 6000;
    const TrajectoryEngine engine(cfg);
    for (std::uint64_t i = 0; i < 200; ++i) {
      const auto r = engine.run(3, i);
      double heat = 0.0;
      SectorIndex sector = r.initial_sector;
      for (const auto& e : r.events) {
        heat += e.heat;
        CHECK(e.heat == (e.direction == Direction::Down ? 1.0 : -1.0));
        // Walk the sector graph along the recorded events.
        bool moved = false;
        for (const auto& ch : cfg.space->channels(sector)) {
          if (!moved && ch.direction == e.direction && ch.mode == e.mode) {
            sector = ch.target;
            moved = true;
          }
        }
        CHECK(moved);
      }
      CHECK(sector == r.final_sector);
      CHECK(r.work == doctest::Approx((r.final_qubit - r.initial_qubit) + heat).epsilon(1e-15));
      CHECK(r.work_at.back() == r.work);
    }
  }
}

TEST_CASE("pi pulse without coupling excites every trajectory") {
  TrajectoryConfig cfg;
  cfg.space = bath(10, 0.0, Resolution::Microcanonical);
  cfg.drive = DriveProtocol::rwa_resonant(0.05, std::numbers::pi / 0.05);
  cfg.beta = std::numeric_limits<double>::infinity();
  cfg.n_steps = 20000;
  cfg.snapshot_steps = {20000};
  const TrajectoryEngine engine(cfg);
  SnapshotAccumulator acc(1, cfg.space->size());
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto r = engine.run(9, i, &acc);
    CHECK(r.initial_qubit == 0);
    CHECK(r.final_qubit == 1);
    CHECK(r.work == 1.0);
  }
  const auto avg = acc.average(0, 50, Resolution::Microcanonical, cfg.drive.total_time());
  CHECK(excited_population(avg) > 1.0 - 1e-6);
}

TEST_CASE("trajectories are pure functions of seed and index") {
  TrajectoryConfig cfg;
  cfg.space = bath(10, 0.005, Resolution::Microstate);
  cfg.drive = DriveProtocol::sinusoidal(0.05, 1.0, 40.0);
  cfg.n_steps = 4000;
  const TrajectoryEngine engine(cfg);
  const auto a = engine.run(5, 17), b = run_trajectory(5, 17, cfg);
  CHECK(a.work == b.work);
  CHECK(a.initial_sector == b.initial_sector);
  CHECK(a.final_qubit == b.final_qubit);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].time == b.events[i].time);
    CHECK(a.events[i].mode == b.events[i].mode);
  }
  cfg.measurement_steps = {1000, 2000};
  CHECK_THROWS_AS(TrajectoryEngine({cfg.space, cfg.drive, 1.0, 100, NoJumpScheme::Cayley, {50, 50}, {}, true}),
                  std::invalid_argument);
  CHECK(TrajectoryEngine(cfg).measurement_steps() == std::vector<std::size_t>{1000, 2000, 4000});
}

TEST_CASE("ensemble average of live states") {
  auto space = bath(3, 0.001, Resolution::Microcanonical);
  std::vector<TrajectoryState> one{make_state({0.6, 0.8}, 2)};
  const auto avg = ensemble_average(one, *space);
  CHECK(avg.total_trace() == doctest::Approx(1.0));
  CHECK(avg.blocks[2](1, 1).real() == doctest::Approx(0.64));
  CHECK(avg.blocks[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("undriven ensemble stays thermal up to sampling noise") {
  TrajectoryConfig cfg;
  cfg.space = bath(10, 0.001, Resolution::Microcanonical);
  cfg.drive = DriveProtocol::constant(0.0, 10.0);
  cfg.beta = 1.0;
  cfg.n_steps = 500;
  cfg.snapshot_steps = {0, 500};
  cfg.record_events = false;
  EnsembleConfig ec;
  ec.n_trajectories = 20000;
  ec.checkpoints = {200};
  const auto res = run_ensemble(TrajectoryEngine(cfg), ec);
  const auto thermal = thermal_state(1.0, *cfg.space);
  CHECK(trace_distance(res.snapshots[1][1], thermal) < 0.03);
  CHECK(trace_distance(res.snapshots[0][1], thermal) > trace_distance(res.snapshots[1][1], thermal));
}

TEST_CASE("more trajectories track the master equation more closely") {
  ExperimentSetup setup;
  setup.space = bath(2, 0.001, Resolution::Microcanonical);
  setup.drive = DriveProtocol::sinusoidal(0.05, 1.0, 20.0);
  setup.integrator.n_steps = 2000;
  setup.trajectory_steps = 500;
  const auto study = trace_distance_study(setup, {100, 10000}, 10, 77, 50);
  int wins = 0;
  for (const auto& rep : study.per_repetition) wins += rep[1] < rep[0];
  CHECK(wins == 10);
}

TEST_CASE("parallel ensemble is independent of thread count and matches the serial reference") {
  TrajectoryConfig cfg;
  cfg.space = bath(5, 0.01, Resolution::Microstate);
  cfg.drive = DriveProtocol::sinusoidal(0.1, 1.0, 20.0);
  cfg.n_steps = 2000;
  cfg.snapshot_steps = {0, 1000, 2000};
  cfg.measurement_steps = {1000};
  const TrajectoryEngine engine(cfg);
  EnsembleConfig ec;
  ec.n_trajectories = 300;
  ec.master_seed = 4;
  ec.checkpoints = {100};
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto p1 = run_ensemble(engine, ec);
  omp_set_num_threads(3);
  const auto p3 = run_ensemble(engine, ec);
  omp_set_num_threads(threads);
  ec.exec = Execution::Serial;
  const auto s = run_ensemble(engine, ec);

  CHECK(p1.work == p3.work);
  CHECK(p1.work == s.work);
  REQUIRE(p1.snapshots.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t b = 0; b < cfg.space->size(); ++b) {
        CHECK(p1.snapshots[c][j].blocks[b] == p3.snapshots[c][j].blocks[b]);
      }
      CHECK(trace_distance(p1.snapshots[c][j], s.snapshots[c][j]) < 1e-13);
    }
  }
  // The 100-trajectory prefix equals a 100-trajectory run.
  ec.exec = Execution::Parallel;
  ec.n_trajectories = 100;
  ec.checkpoints = {};
  const auto small = run_ensemble(engine, ec);
  for (std::size_t b = 0; b < cfg.space->size(); ++b) {
    CHECK(small.snapshots[0][2].blocks[b] == p1.snapshots[0][2].blocks[b]);
  }
}
