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

#include "feqj/sectors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace feqj {

SectorSpace::SectorSpace(CalorimeterModel cal) : cal_(std::move(cal)) {
  if (cal_.resolution() == Resolution::Microstate) {
    build_microstate();
  } else {
    build_microcanonical();
  }
}

void SectorSpace::build_microstate() {
  const std::size_t n_modes = cal_.n_modes();
  std::size_t count = 1;
  stride_.resize(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    stride_[k] = count;
    count *= static_cast<std::size_t>(cal_.modes()[k].cap + 1);
    if (count > kMaxSectors) {
      throw std::invalid_argument("microstate space exceeds " + std::to_string(kMaxSectors) +
                                  " sectors");
    }
  }
  energy_.resize(count);
  multiplicity_.assign(count, 1.0);
  excitations_.resize(count);
  up_.resize(count);
  down_.resize(count);

  std::vector<std::vector<GainLink>> down_in(count), up_in(count);
  std::vector<std::vector<SectorChannel>> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    const Microstate n = microstate(static_cast<SectorIndex>(s));
    const auto rates = rates_for_microstate(cal_, n);
    energy_[s] = n.energy(cal_);
    excitations_[s] = n.excitations();
    up_[s] = rates.total_up();
    down_[s] = rates.total_down();
    // Down channels first, then up channels, each in mode order.
    for (std::size_t k = 0; k < n_modes; ++k) {
      if (rates.down[k] > 0.0) {
        const auto target = static_cast<SectorIndex>(s + stride_[k]);
        out[s].push_back({Direction::Down, static_cast<std::uint32_t>(k), target, rates.down[k]});
        down_in[target].push_back({static_cast<SectorIndex>(s), rates.down[k]});
      }
    }
    for (std::size_t k = 0; k < n_modes; ++k) {
      if (rates.up[k] > 0.0) {
        const auto target = static_cast<SectorIndex>(s - stride_[k]);
        out[s].push_back({Direction::Up, static_cast<std::uint32_t>(k), target, rates.up[k]});
        up_in[target].push_back({static_cast<SectorIndex>(s), rates.up[k]});
      }
    }
  }
  finish_links(down_in, up_in, out);
}

void SectorSpace::build_microcanonical() {
  const int m_max = cal_.max_excitations();
  const auto count = static_cast<std::size_t>(m_max + 1);
  const auto shells = shell_multiplicities(cal_);
  const double eps = cal_.n_modes() > 0 ? cal_.modes().front().energy : kQubitGap;
  energy_.resize(count);
  multiplicity_.resize(count);
  excitations_.resize(count);
  up_.resize(count);
  down_.resize(count);
  std::vector<std::vector<GainLink>> down_in(count), up_in(count);
  std::vector<std::vector<SectorChannel>> out(count);
  for (std::size_t m = 0; m < count; ++m) {
    const auto rates = rates_for_energy(cal_, static_cast<int>(m));
    energy_[m] = static_cast<double>(m) * eps;
    multiplicity_[m] = shells[m];
    excitations_[m] = static_cast<int>(m);
    up_[m] = rates.up[0];
    down_[m] = rates.down[0];
    if (down_[m] > 0.0) {
      out[m].push_back({Direction::Down, 0, static_cast<SectorIndex>(m + 1), down_[m]});
      down_in[m + 1].push_back({static_cast<SectorIndex>(m), down_[m]});
    }
    if (up_[m] > 0.0) {
      out[m].push_back({Direction::Up, 0, static_cast<SectorIndex>(m - 1), up_[m]});
      up_in[m - 1].push_back({static_cast<SectorIndex>(m), up_[m]});
    }
  }
  finish_links(down_in, up_in, out);
}

void SectorSpace::finish_links(std::vector<std::vector<GainLink>>& down,
                               std::vector<std::vector<GainLink>>& up,
                               std::vector<std::vector<SectorChannel>>& channels) {
  auto flatten = [](auto& lists, auto& offsets, auto& flat) {
    offsets.assign(1, 0);
    for (auto& l : lists) {
      flat.insert(flat.end(), l.begin(), l.end());
      offsets.push_back(static_cast<std::uint32_t>(flat.size()));
    }
  };
  flatten(down, down_offset_, down_gain_);
  flatten(up, up_offset_, up_gain_);
  flatten(channels, channel_offset_, channels_);
}

Microstate SectorSpace::microstate(SectorIndex s) const {
  if (resolution() != Resolution::Microstate) {
    throw std::logic_error("microstate labels exist only in microstate resolution");
  }
  std::vector<int> occ(cal_.n_modes());
  std::size_t rest = s;
  for (std::size_t k = 0; k < occ.size(); ++k) {
    const auto base = static_cast<std::size_t>(cal_.modes()[k].cap + 1);
    occ[k] = static_cast<int>(rest % base);
    rest /= base;
  }
  return Microstate(std::move(occ));
}

SectorIndex SectorSpace::index_of(const Microstate& n) const {
  if (resolution() != Resolution::Microstate) {
    throw std::logic_error("microstate labels exist only in microstate resolution");
  }
  if (!n.valid_for(cal_)) throw std::invalid_argument("microstate does not fit the calorimeter");
  std::size_t s = 0;
  for (std::size_t k = 0; k < n.size(); ++k) s += static_cast<std::size_t>(n[k]) * stride_[k];
  return static_cast<SectorIndex>(s);
}

SectorIndex SectorSpace::index_of_excitations(int m) const {
  if (resolution() != Resolution::Microcanonical) {
    throw std::logic_error("shell labels exist only in microcanonical resolution");
  }
  if (m < 0 || static_cast<std::size_t>(m) >= size()) {
    throw std::invalid_argument("excitation count out of range");
  }
  return static_cast<SectorIndex>(m);
}

std::vector<double> SectorSpace::thermal_weights(double beta) const {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  std::vector<double> w(size(), 0.0);
  if (std::isinf(beta)) {
    // Every mode energy is positive, so sector 0 is the unique ground sector.
    w[0] = 1.0;
    return w;
  }
  double z = 0.0;
  for (std::size_t s = 0; s < size(); ++s) {
    w[s] = multiplicity_[s] * std::exp(-beta * energy_[s]);
    z += w[s];
  }
  for (auto& x : w) x /= z;
  return w;
}

std::array<double, 2> qubit_thermal_weights(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (std::isinf(beta)) return {1.0, 0.0};
  const double x = std::exp(-beta * kQubitGap);
  return {1.0 / (1.0 + x), x / (1.0 + x)};
}

}  // namespace feqj
