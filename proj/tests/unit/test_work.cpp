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

#include "doctest.h"

#include "feqj/work.hpp"

using namespace feqj;

namespace {

WorkConfig base(int n, double g2, DriveProtocol drive, std::size_t steps,
                Resolution res = Resolution::Microcanonical) {
  WorkConfig cfg;
  cfg.space = SectorSpace::make(CalorimeterModel::two_level_bath(n, g2, res));
  cfg.drive = std::move(drive);
  cfg.beta = 1.0;
  cfg.integrator.n_steps = steps;
  return cfg;
}

using Blocks = std::vector<QubitBlock>;

void rk4(const Liouvillian& L, Blocks& y, double t, double h) {
  const std::size_t n = y.size();
  Blocks k1(n), k2(n), k3(n), k4(n), tmp(n);
  L.apply(y, t, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  L.apply(tmp, t + 0.5 * h, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  L.apply(tmp, t + 0.5 * h, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  L.apply(tmp, t + h, k4);
  for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

QubitBlock power(const DriveProtocol& d, double t) {
  const Complex dl = d.derivative(t);
  QubitBlock p;
  p << 0.0, std::conj(dl), dl, 0.0;
  return p;
}

// Second power-operator moment as the literal ordered double integral
// 2 Re int_0^tau dt2 int_0^t2 dt1 Tr{P(t2) Lambda(t2,t1)[P(t1) rho(t1)]},
// trapezoid rule on an M-point grid, each propagator leg resolved with
// `sub` RK4 substeps.
double poa_second_oracle(const WorkConfig& cfg, int M, int sub) {
  const Liouvillian L(cfg.space, cfg.drive, Execution::Serial);
  const double tau = cfg.drive.total_time();
  const double h = tau / M, hs = h / sub;
  auto advance = [&](Blocks& y, double t0) {
    for (int j = 0; j < sub; ++j) rk4(L, y, t0 + j * hs, hs);
  };
  std::vector<Blocks> rho(M + 1);
  rho[0] = thermal_state(cfg.beta, *cfg.space).blocks;
  for (int k = 0; k < M; ++k) {
    rho[k + 1] = rho[k];
    advance(rho[k + 1], k * h);
  }
  // f[k2][k1] = Tr{P(t2) X_{k1}(t2)}
  std::vector<std::vector<Complex>> f(M + 1, std::vector<Complex>(M + 1, 0.0));
  for (int k1 = 0; k1 <= M; ++k1) {
    Blocks x = rho[k1];
    const QubitBlock p1 = power(cfg.drive, k1 * h);
    for (auto& b : x) b = (p1 * b).eval();
    for (int k2 = k1;; ++k2) {
      const QubitBlock p2 = power(cfg.drive, k2 * h);
      Complex tr = 0.0;
      for (const auto& b : x) tr += (p2 * b).trace();
      f[k2][k1] = tr;
      if (k2 == M) break;
      advance(x, k2 * h);
    }
  }
  double outer = 0.0;
  for (int k2 = 1; k2 <= M; ++k2) {
    Complex inner = 0.0;
    for (int k1 = 0; k1 <= k2; ++k1) inner += (k1 == 0 || k1 == k2 ? 0.5 : 1.0) * h * f[k2][k1];
    outer += (k2 == M ? 0.5 : 1.0) * h * inner.real();
  }
  return 2.0 * outer;
}

}  // namespace

TEST_CASE("zero drive does no work") {
  for (auto res : {Resolution::Microstate, Resolution::Microcanonical}) {
    auto cfg = base(6, 0.01, DriveProtocol::sinusoidal(0.0, 1.0, 30.0), 3000, res);
    const auto m = tmp_moments_propagated(cfg, 3);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (int n = 1; n <= 3; ++n) CHECK(std::abs(m[n]) < 1e-10);
    const auto p = poa_moments(cfg);
    CHECK(p.first == 0.0);
    CHECK(p.second == 0.0);
    for (const auto& s : tmp_poa_difference_diagnostic(cfg, 10)) CHECK(s.diagnostic == 0.0);
  }
}

TEST_CASE("closed resonant pi pulse delivers one quantum") {
  auto cfg = base(4, 0.0, DriveProtocol::rwa_resonant(0.05, std::numbers::pi / 0.05), 20000);
  cfg.beta = std::numeric_limits<double>::infinity();
  const auto tmp = tmp_moments_propagated(cfg);
  CHECK(tmp.method == MomentMethod::TmpPropagated);
  CHECK(std::abs(tmp.first - 1.0) < 1e-6);
  CHECK(std::abs(tmp.second - 1.0) < 1e-6);
  const auto poa = poa_moments(cfg);
  CHECK(poa.method == MomentMethod::PowerOperator);
  CHECK(std::abs(poa.first - 1.0) < 1e-6);
  CHECK(std::abs(poa.second - 1.0) < 1e-6);
}

TEST_CASE("sample moments") {
  const std::vector<double> w{0.0, 1.0};
  const auto m = tmp_moments_sampled(w);
  CHECK(m.method == MomentMethod::TmpTrajectories);
  CHECK(m.first == 0.5);
  CHECK(m.second == 0.5);
  CHECK(m.first_err == doctest::Approx(0.5));
  const std::vector<double> zeros(5, 0.0);
  const auto z = tmp_moments_sampled(zeros);
  CHECK(z.first == 0.0);
  CHECK(z.second == 0.0);
  CHECK(z.first_err == 0.0);

  std::vector<TrajectoryRecord> recs(2);
  recs[0].work = 0.0;
  recs[1].work = 1.0;
  CHECK(tmp_moments_sampled(recs).second == 0.5);
  CHECK_THROWS(tmp_moments_sampled(std::span<const double>(w.data(), 1)));
}

TEST_CASE("constant drive has no power") {
  auto cfg = base(4, 0.01, DriveProtocol::constant(0.1, 20.0), 2000);
  const auto p = poa_moments(cfg);
  CHECK(p.first == 0.0);
  CHECK(p.second == 0.0);
}

TEST_CASE("aggregated propagation equals the sum over initial projectors") {
  for (auto res : {Resolution::Microstate, Resolution::Microcanonical}) {
    auto cfg = base(4, 0.02, DriveProtocol::sinusoidal(0.2, 0.9, 15.0), 3000, res);
    const auto agg = tmp_moments_propagated(cfg, 2);
    const auto par = tmp_moments_per_initial_state(cfg, 2, Execution::Parallel);
    const auto ser = tmp_moments_per_initial_state(cfg, 2, Execution::Serial);
    for (int n = 0; n <= 2; ++n) {
      CHECK(std::abs(agg[n] - par[n]) < 1e-12 * std::max(1.0, std::abs(agg[n])));
      CHECK(par[n] == ser[n]);
    }
  }
}

TEST_CASE("propagated projector stays a normalized state") {
  auto cfg = base(4, 0.02, DriveProtocol::sinusoidal(0.2, 1.0, 10.0), 1000);
  const auto chi = propagate_chi(cfg, 1, cfg.space->index_of_excitations(2));
  CHECK(chi.total_trace() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(chi.time == doctest::Approx(10.0));
}

TEST_CASE("tmp minus poa splits into dissipation and boundary terms") {
  // Generic end time, lambda(tau) != 0.
  for (double omega : {0.9, 1.0, 1.1}) {
    auto cfg = base(10, 0.001, DriveProtocol::sinusoidal(0.05, omega, 37.3), 40000);
    const auto sw = work_sweep(cfg, {10000, 25000, 40000});
    const double b0 = 0.0;  // rho(0) is diagonal
    for (const auto& s : sw.samples) {
      const double lhs = s.tmp[1];
      const double rhs = s.poa_first + s.dissipated_power_integral - (s.boundary - b0);
      CHECK(std::abs(lhs - rhs) < 1e-10);
      CHECK(std::abs(s.diagnostic - s.dissipated_power_integral) < 1e-8);
    }
  }
}

TEST_CASE("diagnostic matches the direct difference where the drive vanishes") {
  const double omega = 0.9, tau = 29.0 * std::numbers::pi / omega;
  auto cfg = base(10, 0.001, DriveProtocol::sinusoidal(0.05, omega, tau), 100000);
  const auto tmp = tmp_moments_propagated(cfg);
  const auto poa = poa_moments(cfg);
  const auto diag = tmp_poa_difference_diagnostic(cfg, 4);
  REQUIRE(diag.size() == 5);
  CHECK(diag.front().diagnostic == 0.0);
  CHECK(std::abs(diag.back().boundary) < 1e-6);
  CHECK(std::abs((tmp.first - poa.first) - diag.back().diagnostic) < 1e-6);
}

TEST_CASE("rotating-wave drive leaves no difference") {
  auto cfg = base(10, 0.001, DriveProtocol::rwa_resonant(0.05, 60.0), 60000);
  const auto tmp = tmp_moments_propagated(cfg);
  const auto poa = poa_moments(cfg);
  CHECK(std::abs(tmp.first - poa.first) < 1e-6);
  CHECK(std::abs(tmp_poa_difference_diagnostic(cfg, 1).back().diagnostic) < 1e-6);
}

TEST_CASE("closed system: tmp and poa agree when the drive ends at zero") {
  for (double omega : {0.7, 1.0, 1.3}) {
    auto cfg = base(3, 0.0, DriveProtocol::sinusoidal(0.3, omega, 12.0 * std::numbers::pi / omega), 40000);
    const auto tmp = tmp_moments_propagated(cfg);
    const auto poa = poa_moments(cfg);
    CHECK(std::abs(tmp.first - poa.first) < 1e-8);
    CHECK(std::abs(tmp.second - poa.second) < 1e-8);
  }
}

TEST_CASE("single-pass second moment matches the ordered double integral") {
  auto cfg = base(2, 0.05, DriveProtocol::sinusoidal(0.3, 1.2, 5.0), 20000);
  const double coarse = poa_second_oracle(cfg, 50, 20);
  const double fine = poa_second_oracle(cfg, 100, 10);
  const double extrapolated = (4.0 * fine - coarse) / 3.0;
  const auto poa = poa_moments(cfg);
  CHECK(std::abs(fine - coarse) > 1e-7);  // the oracle really is grid-limited
  CHECK(poa.second == doctest::Approx(extrapolated).epsilon(1e-6));
}

TEST_CASE("variance is non-negative") {
  for (double omega : {0.5, 1.0, 1.5}) {
    auto cfg = base(5, 0.01, DriveProtocol::sinusoidal(0.2, omega, 25.0), 5000);
    const auto sw = work_sweep(cfg, {1000, 2000, 3000, 4000, 5000});
    for (const auto& s : sw.samples) CHECK(s.tmp[2] >= s.tmp[1] * s.tmp[1] - 1e-12);
  }
}

TEST_CASE("energy moments of the thermal state") {
  auto space = SectorSpace::make(CalorimeterModel::two_level_bath(3, 0.01, Resolution::Microstate));
  const auto th = thermal_state(0.7, *space);
  // Four independent two-level systems with unit gap.
  const double p = 1.0 / (1.0 + std::exp(0.7));
  CHECK(energy_moment(*space, th, 0) == doctest::Approx(1.0));
  CHECK(energy_moment(*space, th, 1) == doctest::Approx(4 * p).epsilon(1e-13));
  CHECK(energy_moment(*space, th, 2) == doctest::Approx(4 * p * (1 - p) + 16 * p * p).epsilon(1e-13));
}

TEST_CASE("work sweep rejects bad sample steps") {
  auto cfg = base(2, 0.01, DriveProtocol::sinusoidal(0.1, 1.0, 5.0), 100);
  CHECK_THROWS_AS(work_sweep(cfg, {50, 50}), std::invalid_argument);
  CHECK_THROWS_AS(work_sweep(cfg, {101}), std::invalid_argument);
}
