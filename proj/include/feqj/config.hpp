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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "feqj/dynamics.hpp"
#include "feqj/model.hpp"
#include "feqj/trajectory.hpp"

namespace feqj {

enum class ExperimentKind { Population, TraceDistanceVsN, MomentsVsTau, Single };

std::string_view to_string(ExperimentKind kind);

struct SimConfig {
  ExperimentKind experiment = ExperimentKind::Population;

  int n_modes = 10;
  int cap = 1;
  double coupling_sq = 0.001;
  double mode_energy = 1.0;
  Resolution resolution = Resolution::Microcanonical;

  DriveKind drive = DriveKind::Sinusoidal;
  double lambda0 = 0.05;
  std::vector<double> omega_d{0.9, 1.0, 1.1};
  double tau = 0.0;

  double beta = 1.0;

  std::size_t steps = 100000;
  Method method = Method::RK4;

  std::size_t trajectories = 1000;
  std::vector<std::size_t> n_list{100, 1000, 10000};
  std::uint64_t seed = 0;
  std::size_t trajectory_steps = 20000;
  NoJumpScheme scheme = NoJumpScheme::Cayley;
  std::size_t snapshots = 200;
  std::size_t repetitions = 5;
  bool log_trajectories = false;

  std::size_t tau_points = 10;

  int threads = 0;
  std::string out = "out";

  /// Canonical JSON form; load_config(to_json()) round-trips.
  nlohmann::json to_json() const;
  /// FNV-1a 64 of to_json().dump(), as 16 hex digits.
  std::string hash() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct LoadedConfig {
  SimConfig config;
  std::vector<std::string> warnings;
};

/// Named parameter sets: fig2, fig3, fig45.
nlohmann::json preset(const std::string& name);

/// Layers preset < file < overrides (objects merge key by key; everything
/// else replaces). Unknown keys, bad values and missing required fields are
/// all collected into one ConfigError.
LoadedConfig load_config(const std::optional<std::string>& preset_name,
                         const nlohmann::json& file, const nlohmann::json& overrides);

nlohmann::json read_json_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace feqj
