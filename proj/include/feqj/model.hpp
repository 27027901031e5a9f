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

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

/// Physical model of a driven qubit coupled to a finite calorimeter.
///
/// Units: hbar = 1 and the qubit gap omega_0 = 1. Energies are in units of
/// hbar*omega_0, times in 1/omega_0 and rates in omega_0.
namespace feqj {

using Complex = std::complex<double>;
/// 2x2 matrix in the undriven qubit basis {|0>, |1>}.
using QubitBlock = Eigen::Matrix2cd;
using QubitVector = Eigen::Vector2cd;

/// Qubit gap hbar*omega_0 in internal units.
inline constexpr double kQubitGap = 1.0;

enum class DriveKind { Sinusoidal, RwaResonant, Constant, Tabulated };

std::string_view to_string(DriveKind kind);

/// Classical drive lambda(t) entering V_D(t) = lambda(t) a^dag + lambda*(t) a.
///
/// Every kind evaluates to zero outside [0, total_time].
class DriveProtocol {
 public:
  /// lambda(t) = amplitude * sin(frequency * t).
  static DriveProtocol sinusoidal(double amplitude, double frequency, double total_time);
  /// Co-rotating half of a resonant sinusoid:
  /// lambda(t) = (i amplitude / 2) exp(-i omega_0 t).
  static DriveProtocol rwa_resonant(double amplitude, double total_time);
  static DriveProtocol constant(double amplitude, double total_time);
  /// Piecewise-linear interpolation of equidistant samples spanning
  /// [0, total_time]; at least two samples are required.
  static DriveProtocol tabulated(std::vector<Complex> samples, double total_time);

  DriveKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  double total_time() const { return total_time_; }

  /// The same protocol with a different total time.
  DriveProtocol with_total_time(double total_time) const;

  Complex value(double t) const;
  /// d lambda / dt. Tabulated drives use a central difference with
  /// `fd_step`; the other kinds are differentiated analytically.
  Complex derivative(double t, double fd_step = 1e-4) const;

 private:
  DriveProtocol(DriveKind kind, double amplitude, double frequency, double total_time);

  DriveKind kind_;
  double amplitude_;
  double frequency_;
  double total_time_;
  std::vector<Complex> samples_;
};

/// H_q(t) = omega_0 a^dag a + lambda(t) a^dag + lambda*(t) a.
QubitBlock qubit_hamiltonian(const DriveProtocol& drive, double t);
/// Same, for an already evaluated lambda.
QubitBlock qubit_hamiltonian(Complex lambda);

enum class Resolution { Microstate, Microcanonical };

std::string_view to_string(Resolution resolution);

struct CalorimeterMode {
  int cap = 1;              ///< highest occupation; 1 for a two-level system
  double energy = kQubitGap;
  double coupling_sq = 0.0; ///< g_k^2
};

/// Finite calorimeter: a set of independent modes plus the way its state is
/// resolved (single microstates, or microcanonical energy shells).
class CalorimeterModel {
 public:
  CalorimeterModel(std::vector<CalorimeterMode> modes, Resolution resolution);

  /// n identical two-level systems with gap `energy` and coupling g^2.
  static CalorimeterModel two_level_bath(int n_modes, double coupling_sq, Resolution resolution,
                                         double energy = kQubitGap);

  const std::vector<CalorimeterMode>& modes() const { return modes_; }
  std::size_t n_modes() const { return modes_.size(); }
  Resolution resolution() const { return resolution_; }
  CalorimeterModel with_resolution(Resolution resolution) const;

  /// prod_k (cap_k + 1).
  std::size_t microstate_count() const;
  int max_excitations() const;
  bool degenerate() const;

 private:
  std::vector<CalorimeterMode> modes_;
  Resolution resolution_;
};

/// Calorimeter energy eigenstate labelled by per-mode occupations.
class Microstate {
 public:
  Microstate() = default;
  explicit Microstate(std::vector<int> occupations) : occupations_(std::move(occupations)) {}

  static Microstate ground(const CalorimeterModel& cal);

  const std::vector<int>& occupations() const { return occupations_; }
  int operator[](std::size_t k) const { return occupations_[k]; }
  std::size_t size() const { return occupations_.size(); }
  int excitations() const;
  double energy(const CalorimeterModel& cal) const;
  bool valid_for(const CalorimeterModel& cal) const;

  friend bool operator==(const Microstate&, const Microstate&) = default;

 private:
  std::vector<int> occupations_;
};

/// Up rates absorb a calorimeter quantum (qubit a^dag), down rates emit one
/// (qubit a). One entry per mode for microstate rates; a single aggregated
/// entry for energy-shell rates.
struct TransitionRates {
  std::vector<double> up;
  std::vector<double> down;

  double total_up() const;
  double total_down() const;
};

enum class Direction { Up, Down };

std::string_view to_string(Direction direction);

struct JumpChannel {
  Direction direction;
  std::size_t mode;
};

TransitionRates rates_for_microstate(const CalorimeterModel& cal, const Microstate& n);

/// Shell-averaged rates for excitation count m. Requires degenerate mode
/// energies.
TransitionRates rates_for_energy(const CalorimeterModel& cal, int m);

/// Number of microstates with exactly m excitations, for every m.
std::vector<double> shell_multiplicities(const CalorimeterModel& cal);

/// Calorimeter side of a jump: Down adds a quantum to `mode`, Up removes one.
/// Throws std::invalid_argument for a zero-rate (forbidden) channel.
Microstate apply_jump_to_microstate(const CalorimeterModel& cal, const Microstate& n,
                                    JumpChannel channel);

}  // namespace feqj
