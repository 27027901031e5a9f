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

namespace feqj {

/// Philox4x64-10 counter-based bijection (Salmon et al., SC'11).
///
/// Output is a pure function of (counter, key): streams can be split per
/// trajectory without any shared state.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    __extension__ using u128 = unsigned __int128;
    const u128 p = static_cast<u128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static Counter round(const Counter& c, const Key& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Independent sub-streams of one trajectory.
enum class StreamPurpose : std::uint64_t { InitialState = 0, Steps = 1, Measurement = 2 };

/// Sequential view of a Philox stream keyed by (master seed, trajectory
/// index) with the purpose in the second counter word.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t index, StreamPurpose purpose)
      : key_{master_seed, index}, purpose_(static_cast<std::uint64_t>(purpose)) {}

  std::uint64_t next_u64() {
    if (used_ == 4) {
      block_ = Philox4x64::generate({counter_++, purpose_, 0, 0}, key_);
      used_ = 0;
    }
    return block_[used_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  Philox4x64::Key key_;
  std::uint64_t purpose_;
  std::uint64_t counter_ = 0;
  Philox4x64::Counter block_{};
  int used_ = 4;
};

}  // namespace feqj
