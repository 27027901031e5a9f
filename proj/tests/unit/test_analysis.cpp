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
#include <numbers>
#include <random>

#include "doctest.h"

#include "feqj/analysis.hpp"

using namespace feqj;

namespace {

std::shared_ptr<const SectorSpace> bath(int n, double g2, Resolution res = Resolution::Microcanonical) {
  return SectorSpace::make(CalorimeterModel::two_level_bath(n, g2, res));
}

ConditionedState random_state(const SectorSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ConditionedState s = ConditionedState::zeros(space);
  double tr = 0.0;
  for (auto& b : s.blocks) {
    QubitBlock a;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = Complex(nd(rng), nd(rng));
    b = a * a.adjoint();
    tr += b.trace().real();
  }
  for (auto& b : s.blocks) b /= tr;
  return s;
}

// Trace norm through a general (non-hermitian) eigensolver.
double trace_distance_oracle(const ConditionedState& a, const ConditionedState& b) {
  double sum = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    Eigen::ComplexEigenSolver<QubitBlock> es(a.blocks[s] - b.blocks[s]);
    for (int i = 0; i < 2; ++i) sum += std::abs(es.eigenvalues()[i]);
  }
  return 0.5 * sum;
}

}  // namespace

TEST_CASE("trace distance") {
  auto space = bath(4, 0.01);
  std::mt19937_64 rng(3);
  const auto a = random_state(*space, rng);
  CHECK(trace_distance(a, a) == 0.0);

  auto e0 = ConditionedState::zeros(*space), e1 = ConditionedState::zeros(*space);
  e0.blocks[0](0, 0) = 1.0;
  e1.blocks[0](1, 1) = 1.0;
  CHECK(trace_distance(e0, e1) == doctest::Approx(1.0).epsilon(1e-15));
  auto e2 = ConditionedState::zeros(*space);
  e2.blocks[1](0, 0) = 1.0;
  CHECK(trace_distance(e0, e2) == doctest::Approx(1.0).epsilon(1e-15));

  for (int k = 0; k < 50; ++k) {
    const auto x = random_state(*space, rng), y = random_state(*space, rng), z = random_state(*space, rng);
    const double dxy = trace_distance(x, y);
    CHECK(std::abs(dxy - trace_distance_oracle(x, y)) < 1e-12);
    CHECK(dxy == trace_distance(y, x));
    CHECK(dxy <= trace_distance(x, z) + trace_distance(z, y) + 1e-15);
    CHECK(dxy <= 1.0 + 1e-15);
  }

  auto other = bath(5, 0.01);
  CHECK_THROWS_AS(trace_distance(a, ConditionedState::zeros(*other)), std::invalid_argument);
  auto micro = bath(4, 0.01, Resolution::Microstate);
  CHECK_THROWS(trace_distance(a, thermal_state(1.0, *micro)));
}

TEST_CASE("comparison series") {
  ComparisonSeries s("N", {"a", "b"});
  s.add_row(1.0, {1.0, 2.0});
  s.add_row(2.0, {3.0, 4.0});
  CHECK(s.size() == 2);
  CHECK(s.column("b") == std::vector<double>{2.0, 4.0});
  CHECK_THROWS(s.add_row(2.0, {0.0, 0.0}));
  CHECK_THROWS(s.add_row(3.0, {0.0}));
  CHECK_THROWS(s.column("c"));
}

TEST_CASE("log-log slope of an exact power law") {
  std::vector<double> x{100, 1000, 10000}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS(loglog_slope({1.0}, {1.0}));
}

TEST_CASE("frequency labels") {
  CHECK(frequency_label(1.0) == "1.0");
  CHECK(frequency_label(0.9) == "0.9");
  CHECK(frequency_label(1.25) == "1.25");
  CHECK(frequency_label(2.0) == "2.0");
}

TEST_CASE("drive retuning keeps the other parameters") {
  const auto d = drive_at_frequency(DriveProtocol::sinusoidal(0.05, 1.0, 30.0), 1.1);
  CHECK(d.frequency() == 1.1);
  CHECK(d.amplitude() == 0.05);
  CHECK(d.total_time() == 30.0);
  const auto r = drive_at_frequency(DriveProtocol::rwa_resonant(0.05, 30.0), 1.1);
  CHECK(r.kind() == DriveKind::RwaResonant);
  CHECK(r.value(2.0) == DriveProtocol::rwa_resonant(0.05, 30.0).value(2.0));
}

TEST_CASE("an ensemble that equals the reference has zero trace distance") {
  ExperimentSetup setup;
  setup.space = bath(3, 0.01);
  setup.drive = DriveProtocol::sinusoidal(0.1, 1.0, 10.0);
  setup.integrator.n_steps = 1000;
  const auto ref = master_equation_snapshots(setup, 10);
  REQUIRE(ref.size() == 11);
  CHECK(ref.back().time == doctest::Approx(10.0));
  EnsembleResult fake;
  fake.checkpoints = {5, 50};
  fake.snapshots = {ref, ref};
  const auto series = max_trace_distance_vs_N(fake, ref);
  CHECK(series.abscissa() == std::vector<double>{5.0, 50.0});
  for (double v : series.column("T_max")) CHECK(v == 0.0);
}

TEST_CASE("population traces") {
  ExperimentSetup setup;
  setup.space = bath(10, 0.001);
  setup.drive = DriveProtocol::sinusoidal(0.0, 1.0, 50.0);
  setup.integrator.n_steps = 5000;
  const auto flat = population_trace(setup, {1.0}, 50);
  const double p1 = 1.0 / (1.0 + std::exp(1.0));
  for (double v : flat.column("pop_1.0")) CHECK(v == doctest::Approx(p1).epsilon(1e-12));

  // Closed rotating-wave drive from the ground state: sin^2(lambda0 t / 2).
  setup.space = bath(2, 0.0);
  setup.beta = std::numeric_limits<double>::infinity();
  setup.drive = DriveProtocol::rwa_resonant(0.2, 40.0);
  const auto rabi = population_trace(setup, {1.0}, 40);
  const auto pop = rabi.column("pop_1.0");
  for (std::size_t i = 0; i < rabi.size(); ++i) {
    const double t = rabi.abscissa()[i];
    CHECK(std::abs(pop[i] - std::pow(std::sin(0.1 * t), 2)) < 1e-9);
  }

  // The resonant drive pumps the qubit harder than the detuned ones.
  setup.space = bath(10, 0.001);
  setup.beta = 1.0;
  setup.drive = DriveProtocol::sinusoidal(0.05, 1.0, 100.0);
  setup.integrator.n_steps = 10000;
  InvariantReport rep;
  const auto s = population_trace(setup, {0.9, 1.0, 1.1}, 100, &rep);
  CHECK(s.columns() == std::vector<std::string>{"pop_0.9", "pop_1.0", "pop_1.1"});
  auto peak = [&](const char* c) {
    const auto v = s.column(c);
    return *std::max_element(v.begin(), v.end());
  };
  CHECK(peak("pop_1.0") > peak("pop_0.9"));
  CHECK(peak("pop_1.0") > peak("pop_1.1"));
  CHECK(rep.max_trace_drift < 1e-8);
  CHECK(rep.steps > 0);
}

TEST_CASE("moments study") {
  ExperimentSetup setup;
  setup.space = bath(4, 0.01);
  setup.drive = DriveProtocol::sinusoidal(0.2, 1.0, 20.0);
  setup.integrator.n_steps = 2000;
  setup.trajectory_steps = 1000;
  const auto a = moments_vs_tau(setup, {0.0, 10.0, 20.0}, 300, 8, true);
  CHECK(a.series.columns() == moments_columns());
  for (double v : a.series.row(0)) CHECK(v == 0.0);
  CHECK(a.records.size() == 300);
  CHECK(a.works.size() == 300);
  const auto b = moments_vs_tau(setup, {0.0, 10.0, 20.0}, 300, 8);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.series.row(i) == b.series.row(i));
  CHECK(b.records.empty());

  const auto det = moments_vs_tau(setup, {10.0, 20.0}, 0, 8);
  CHECK(std::isnan(det.series.column("W1_tmp_mc")[0]));
  CHECK(det.series.column("W1_tmp_prop")[1] == a.series.column("W1_tmp_prop")[2]);
  // Sampled and propagated first moments agree within a few errors.
  const auto row = a.series.row(2);
  CHECK(std::abs(row[0] - row[1]) < 4.0 * row[2]);

  CHECK_THROWS(moments_vs_tau(setup, {10.0, 5.0}, 0, 8));
  CHECK_THROWS(moments_vs_tau(setup, {10.003}, 0, 8));
  CHECK_THROWS(moments_vs_tau(setup, {30.0}, 0, 8));
}
