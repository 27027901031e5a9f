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

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "feqj/model.hpp"

namespace feqj {

using SectorIndex = std::uint32_t;

/// A jump leaving a sector: qubit operator (a for Down, a^dag for Up), the
/// calorimeter mode involved (always 0 for energy shells) and the sector the
/// calorimeter ends up in.
struct SectorChannel {
  Direction direction;
  std::uint32_t mode;
  SectorIndex target;
  double rate;
};

/// Incoming population from a neighbouring sector.
struct GainLink {
  SectorIndex source;
  double rate;
};

/// The calorimeter state space as a graph of sectors (microstates or energy
/// shells) linked by jumps. Both master equations and the trajectory engine
/// run on this one structure.
///
/// Immutable after construction; share freely between threads.
class SectorSpace {
 public:
  static constexpr std::size_t kMaxSectors = std::size_t{1} << 22;

  explicit SectorSpace(CalorimeterModel cal);

  static std::shared_ptr<const SectorSpace> make(CalorimeterModel cal) {
    return std::make_shared<const SectorSpace>(std::move(cal));
  }

  const CalorimeterModel& calorimeter() const { return cal_; }
  Resolution resolution() const { return cal_.resolution(); }
  std::size_t size() const { return energy_.size(); }

  double energy(SectorIndex s) const { return energy_[s]; }
  /// Number of microstates represented by the sector.
  double multiplicity(SectorIndex s) const { return multiplicity_[s]; }
  int excitations(SectorIndex s) const { return excitations_[s]; }
  double up_rate(SectorIndex s) const { return up_[s]; }
  double down_rate(SectorIndex s) const { return down_[s]; }

  std::span<const SectorChannel> channels(SectorIndex s) const {
    return {channels_.data() + channel_offset_[s], channels_.data() + channel_offset_[s + 1]};
  }
  /// Sources feeding this sector through a sigma a^dag (qubit emitted).
  std::span<const GainLink> down_gains(SectorIndex s) const {
    return {down_gain_.data() + down_offset_[s], down_gain_.data() + down_offset_[s + 1]};
  }
  /// Sources feeding this sector through a^dag sigma a (qubit absorbed).
  std::span<const GainLink> up_gains(SectorIndex s) const {
    return {up_gain_.data() + up_offset_[s], up_gain_.data() + up_offset_[s + 1]};
  }

  /// Microstate resolution only.
  Microstate microstate(SectorIndex s) const;
  SectorIndex index_of(const Microstate& n) const;
  /// Energy-shell resolution only.
  SectorIndex index_of_excitations(int m) const;

  /// Equilibrium probability of each sector at inverse temperature beta.
  /// beta = +inf puts all weight on the ground sector.
  std::vector<double> thermal_weights(double beta) const;

 private:
  void build_microstate();
  void build_microcanonical();
  void finish_links(std::vector<std::vector<GainLink>>& down,
                    std::vector<std::vector<GainLink>>& up,
                    std::vector<std::vector<SectorChannel>>& channels);

  CalorimeterModel cal_;
  std::vector<std::size_t> stride_;
  std::vector<double> energy_;
  std::vector<double> multiplicity_;
  std::vector<int> excitations_;
  std::vector<double> up_;
  std::vector<double> down_;
  std::vector<std::uint32_t> channel_offset_;
  std::vector<SectorChannel> channels_;
  std::vector<std::uint32_t> down_offset_;
  std::vector<GainLink> down_gain_;
  std::vector<std::uint32_t> up_offset_;
  std::vector<GainLink> up_gain_;
};

/// Qubit thermal probabilities {p0, p1} at inverse temperature beta.
std::array<double, 2> qubit_thermal_weights(double beta);

}  // namespace feqj
