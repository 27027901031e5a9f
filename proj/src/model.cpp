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

#include "feqj/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace feqj {

std::string_view to_string(DriveKind kind) {
  switch (kind) {
    case DriveKind::Sinusoidal: return "sin";
    case DriveKind::RwaResonant: return "rwa";
    case DriveKind::Constant: return "const";
    case DriveKind::Tabulated: return "tabulated";
  }
  return "?";
}

std::string_view to_string(Resolution resolution) {
  return resolution == Resolution::Microstate ? "microstate" : "microcanonical";
}

std::string_view to_string(Direction direction) {
  return direction == Direction::Up ? "up" : "down";
}

// ---------------------------------------------------------------------------
// DriveProtocol

DriveProtocol::DriveProtocol(DriveKind kind, double amplitude, double frequency, double total_time)
    : kind_(kind), amplitude_(amplitude), frequency_(frequency), total_time_(total_time) {
  if (!std::isfinite(amplitude) || !std::isfinite(frequency) || !std::isfinite(total_time)) {
    throw std::invalid_argument("drive parameters must be finite");
  }
  if (total_time < 0.0) throw std::invalid_argument("drive total time must be >= 0");
}

DriveProtocol DriveProtocol::sinusoidal(double amplitude, double frequency, double total_time) {
  return {DriveKind::Sinusoidal, amplitude, frequency, total_time};
}

DriveProtocol DriveProtocol::rwa_resonant(double amplitude, double total_time) {
  return {DriveKind::RwaResonant, amplitude, kQubitGap, total_time};
}

DriveProtocol DriveProtocol::constant(double amplitude, double total_time) {
  return {DriveKind::Constant, amplitude, 0.0, total_time};
}

DriveProtocol DriveProtocol::tabulated(std::vector<Complex> samples, double total_time) {
  if (samples.size() < 2) throw std::invalid_argument("tabulated drive needs >= 2 samples");
  if (!(total_time > 0.0)) throw std::invalid_argument("tabulated drive needs total time > 0");
  double peak = 0.0;
  for (const auto& s : samples) peak = std::max(peak, std::abs(s));
  DriveProtocol d{DriveKind::Tabulated, peak, 0.0, total_time};
  d.samples_ = std::move(samples);
  return d;
}

DriveProtocol DriveProtocol::with_total_time(double total_time) const {
  DriveProtocol d = *this;
  if (total_time < 0.0) throw std::invalid_argument("drive total time must be >= 0");
  d.total_time_ = total_time;
  return d;
}

Complex DriveProtocol::value(double t) const {
  if (t < 0.0 || t > total_time_) return {0.0, 0.0};
  switch (kind_) {
    case DriveKind::Sinusoidal:
      return {amplitude_ * std::sin(frequency_ * t), 0.0};
    case DriveKind::RwaResonant:
      return Complex{0.0, 0.5 * amplitude_} * std::polar(1.0, -kQubitGap * t);
    case DriveKind::Constant:
      return {amplitude_, 0.0};
    case DriveKind::Tabulated: {
      const double pos = t / total_time_ * static_cast<double>(samples_.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(pos), samples_.size() - 2);
      const double w = pos - static_cast<double>(i);
      return (1.0 - w) * samples_[i] + w * samples_[i + 1];
    }
  }
  return {0.0, 0.0};
}

Complex DriveProtocol::derivative(double t, double fd_step) const {
  if (t < 0.0 || t > total_time_) return {0.0, 0.0};
  switch (kind_) {
    case DriveKind::Sinusoidal:
      return {amplitude_ * frequency_ * std::cos(frequency_ * t), 0.0};
    case DriveKind::RwaResonant:
      // d/dt [(i A/2) e^{-i w t}] = (A w / 2) e^{-i w t}
      return 0.5 * amplitude_ * kQubitGap * std::polar(1.0, -kQubitGap * t);
    case DriveKind::Constant:
      return {0.0, 0.0};
    case DriveKind::Tabulated: {
      const double lo = std::max(0.0, t - fd_step);
      const double hi = std::min(total_time_, t + fd_step);
      if (hi <= lo) return {0.0, 0.0};
      return (value(hi) - value(lo)) / (hi - lo);
    }
  }
  return {0.0, 0.0};
}

QubitBlock qubit_hamiltonian(Complex lambda) {
  QubitBlock h;
  h << Complex{0.0, 0.0}, std::conj(lambda), lambda, Complex{kQubitGap, 0.0};
  return h;
}

QubitBlock qubit_hamiltonian(const DriveProtocol& drive, double t) {
  return qubit_hamiltonian(drive.value(t));
}

// ---------------------------------------------------------------------------
// CalorimeterModel

CalorimeterModel::CalorimeterModel(std::vector<CalorimeterMode> modes, Resolution resolution)
    : modes_(std::move(modes)), resolution_(resolution) {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const auto& m = modes_[k];
    if (m.cap < 1) throw std::invalid_argument("mode " + std::to_string(k) + ": cap must be >= 1");
    if (!(m.energy > 0.0) || !std::isfinite(m.energy)) {
      throw std::invalid_argument("mode " + std::to_string(k) + ": energy must be > 0");
    }
    if (!(m.coupling_sq >= 0.0) || !std::isfinite(m.coupling_sq)) {
      throw std::invalid_argument("mode " + std::to_string(k) + ": coupling g^2 must be >= 0");
    }
  }
  if (resolution_ == Resolution::Microcanonical && !degenerate()) {
    throw std::invalid_argument("microcanonical resolution requires equal mode energies");
  }
}

CalorimeterModel CalorimeterModel::two_level_bath(int n_modes, double coupling_sq,
                                                  Resolution resolution, double energy) {
  if (n_modes < 0) throw std::invalid_argument("mode count must be >= 0");
  return CalorimeterModel(std::vector<CalorimeterMode>(static_cast<std::size_t>(n_modes),
                                                       CalorimeterMode{1, energy, coupling_sq}),
                          resolution);
}

CalorimeterModel CalorimeterModel::with_resolution(Resolution resolution) const {
  return CalorimeterModel(modes_, resolution);
}

std::size_t CalorimeterModel::microstate_count() const {
  std::size_t count = 1;
  for (const auto& m : modes_) count *= static_cast<std::size_t>(m.cap + 1);
  return count;
}

int CalorimeterModel::max_excitations() const {
  return std::accumulate(modes_.begin(), modes_.end(), 0,
                         [](int acc, const CalorimeterMode& m) { return acc + m.cap; });
}

bool CalorimeterModel::degenerate() const {
  return std::all_of(modes_.begin(), modes_.end(),
                     [&](const CalorimeterMode& m) { return m.energy == modes_.front().energy; });
}

// ---------------------------------------------------------------------------
// Microstate

Microstate Microstate::ground(const CalorimeterModel& cal) {
  return Microstate(std::vector<int>(cal.n_modes(), 0));
}

int Microstate::excitations() const {
  return std::accumulate(occupations_.begin(), occupations_.end(), 0);
}

double Microstate::energy(const CalorimeterModel& cal) const {
  double e = 0.0;
  for (std::size_t k = 0; k < occupations_.size(); ++k) e += occupations_[k] * cal.modes()[k].energy;
  return e;
}

bool Microstate::valid_for(const CalorimeterModel& cal) const {
  if (occupations_.size() != cal.n_modes()) return false;
  for (std::size_t k = 0; k < occupations_.size(); ++k) {
    if (occupations_[k] < 0 || occupations_[k] > cal.modes()[k].cap) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rates

double TransitionRates::total_up() const { return std::accumulate(up.begin(), up.end(), 0.0); }
double TransitionRates::total_down() const {
  return std::accumulate(down.begin(), down.end(), 0.0);
}

namespace {

// <n|d^dag d|n> and <n|d d^dag|n> for an occupation-number mode truncated at
// `cap`. cap = 1 reproduces a two-level system (d d^dag = 1 - n).
double up_factor(int n, int /*cap*/) { return static_cast<double>(n); }
double down_factor(int n, int cap) { return n < cap ? static_cast<double>(n + 1) : 0.0; }

}  // namespace

TransitionRates rates_for_microstate(const CalorimeterModel& cal, const Microstate& n) {
  if (n.size() != cal.n_modes()) {
    throw std::invalid_argument("microstate has " + std::to_string(n.size()) +
                                " modes, calorimeter has " + std::to_string(cal.n_modes()));
  }
  if (!n.valid_for(cal)) throw std::invalid_argument("microstate occupation out of range");
  TransitionRates r;
  r.up.resize(cal.n_modes());
  r.down.resize(cal.n_modes());
  for (std::size_t k = 0; k < cal.n_modes(); ++k) {
    const auto& mode = cal.modes()[k];
    r.up[k] = mode.coupling_sq * up_factor(n[k], mode.cap);
    r.down[k] = mode.coupling_sq * down_factor(n[k], mode.cap);
  }
  return r;
}

namespace {

using Poly = std::vector<double>;

// Generating polynomial sum_{j=0}^{cap} x^j, multiplied into `acc`.
Poly multiply_mode(const Poly& acc, int cap) {
  Poly out(acc.size() + static_cast<std::size_t>(cap), 0.0);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (int j = 0; j <= cap; ++j) out[i + static_cast<std::size_t>(j)] += acc[i];
  }
  return out;
}

Poly product_except(const CalorimeterModel& cal, std::size_t skip) {
  Poly p{1.0};
  for (std::size_t k = 0; k < cal.n_modes(); ++k) {
    if (k != skip) p = multiply_mode(p, cal.modes()[k].cap);
  }
  return p;
}

double coeff(const Poly& p, int m) {
  return (m < 0 || static_cast<std::size_t>(m) >= p.size()) ? 0.0 : p[static_cast<std::size_t>(m)];
}

}  // namespace

std::vector<double> shell_multiplicities(const CalorimeterModel& cal) {
  return product_except(cal, cal.n_modes());
}

TransitionRates rates_for_energy(const CalorimeterModel& cal, int m) {
  if (!cal.degenerate()) {
    throw std::invalid_argument("energy-shell rates need degenerate mode energies");
  }
  if (m < 0 || m > cal.max_excitations()) {
    throw std::invalid_argument("excitation count " + std::to_string(m) + " out of range");
  }
  const auto shells = shell_multiplicities(cal);
  // Sum of per-mode rates over all microstates in the shell, by counting how
  // many microstates put j quanta in mode k while the rest hold m - j.
  double up_sum = 0.0;
  double down_sum = 0.0;
  for (std::size_t k = 0; k < cal.n_modes(); ++k) {
    const auto& mode = cal.modes()[k];
    const Poly rest = product_except(cal, k);
    for (int j = 0; j <= mode.cap; ++j) {
      const double count = coeff(rest, m - j);
      up_sum += count * mode.coupling_sq * up_factor(j, mode.cap);
      down_sum += count * mode.coupling_sq * down_factor(j, mode.cap);
    }
  }
  const double n_shell = coeff(shells, m);
  return TransitionRates{{up_sum / n_shell}, {down_sum / n_shell}};
}

Microstate apply_jump_to_microstate(const CalorimeterModel& cal, const Microstate& n,
                                    JumpChannel channel) {
  if (channel.mode >= cal.n_modes()) throw std::invalid_argument("jump mode out of range");
  const auto rates = rates_for_microstate(cal, n);
  const double rate = channel.direction == Direction::Up ? rates.up[channel.mode]
                                                         : rates.down[channel.mode];
  if (!(rate > 0.0)) {
    throw std::invalid_argument("forbidden jump: " + std::string(to_string(channel.direction)) +
                                " on mode " + std::to_string(channel.mode) + " has zero rate");
  }
  auto occ = n.occupations();
  occ[channel.mode] += channel.direction == Direction::Down ? 1 : -1;
  return Microstate(std::move(occ));
}

}  // namespace feqj
