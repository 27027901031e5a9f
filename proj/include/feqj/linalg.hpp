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

#include <algorithm>
#include <array>
#include <cmath>

#include "feqj/model.hpp"

namespace feqj {

/// Closed-form eigenvalues (ascending) of the hermitian part of a 2x2 block.
inline std::array<double, 2> hermitian_eigenvalues(const QubitBlock& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), std::abs(b));
  return {mean - radius, mean + radius};
}

/// Sum of |eigenvalues| of a hermitian 2x2 block.
inline double trace_norm(const QubitBlock& m) {
  const auto ev = hermitian_eigenvalues(m);
  return std::abs(ev[0]) + std::abs(ev[1]);
}

inline double hermiticity_residual(const QubitBlock& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void symmetrize(QubitBlock& m) {
  const Complex off = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  m(0, 1) = off;
  m(1, 0) = std::conj(off);
  m(0, 0) = m(0, 0).real();
  m(1, 1) = m(1, 1).real();
}

inline bool all_finite(const QubitBlock& m) {
  return std::isfinite(m(0, 0).real()) && std::isfinite(m(0, 0).imag()) &&
         std::isfinite(m(0, 1).real()) && std::isfinite(m(0, 1).imag()) &&
         std::isfinite(m(1, 0).real()) && std::isfinite(m(1, 0).imag()) &&
         std::isfinite(m(1, 1).real()) && std::isfinite(m(1, 1).imag());
}

}  // namespace feqj
