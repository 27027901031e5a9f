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

#include <span>
#include <vector>

#include "feqj/dynamics.hpp"

namespace feqj {

/// Fixed-step explicit integrator over a flat array of qubit blocks.
/// `rhs(t, y, dydt)` must write dydt for every block of y.
class BlockIntegrator {
 public:
  explicit BlockIntegrator(std::size_t n_blocks)
      : k1_(n_blocks), k2_(n_blocks), k3_(n_blocks), k4_(n_blocks), tmp_(n_blocks) {}

  // t_next is where the last RK4 stage is evaluated; pass the exact grid
  // time so k*h rounding cannot step past the end of the drive.
  template <class Rhs>
  void step(std::span<QubitBlock> y, double t, double h, Method method, Rhs&& rhs) {
    step(y, t, h, t + h, method, rhs);
  }

  template <class Rhs>
  void step(std::span<QubitBlock> y, double t, double h, double t_next, Method method, Rhs&& rhs) {
    const std::size_t n = y.size();
    if (method == Method::Euler) {
      rhs(t, std::span<const QubitBlock>(y), std::span<QubitBlock>(k1_.data(), n));
      for (std::size_t i = 0; i < n; ++i) y[i] += h * k1_[i];
      return;
    }
    const double half = 0.5 * h;
    rhs(t, std::span<const QubitBlock>(y), std::span<QubitBlock>(k1_.data(), n));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k1_[i];
    rhs(t + half, std::span<const QubitBlock>(tmp_.data(), n), std::span<QubitBlock>(k2_.data(), n));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k2_[i];
    rhs(t + half, std::span<const QubitBlock>(tmp_.data(), n), std::span<QubitBlock>(k3_.data(), n));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
    rhs(t_next, std::span<const QubitBlock>(tmp_.data(), n), std::span<QubitBlock>(k4_.data(), n));
    const double sixth = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += sixth * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  std::vector<QubitBlock> k1_, k2_, k3_, k4_, tmp_;
};

/// Post-step bookkeeping for a segment of density blocks: measures the
/// hermiticity residual, symmetrizes, and (optionally) checks positivity.
/// Returns the smallest eigenvalue seen (or +inf when not checked).
double finish_density_step(std::span<QubitBlock> blocks, InvariantReport& report,
                           bool check_positivity, const IntegratorConfig& cfg, double t);

}  // namespace feqj
