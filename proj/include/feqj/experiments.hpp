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

#include <ostream>
#include <string>
#include <vector>

#include "feqj/analysis.hpp"
#include "feqj/config.hpp"

namespace feqj {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutcome {
  /// 0 on success, 2 if an invariant monitor tripped.
  int exit_code = 0;
  InvariantReport report;
  std::vector<std::string> files;
  double seconds = 0.0;
};

std::shared_ptr<const SectorSpace> make_space(const SimConfig& cfg);
DriveProtocol make_drive(const SimConfig& cfg, double omega_d);
ExperimentSetup make_setup(const SimConfig& cfg, double omega_d);

/// Runs the configured experiment and writes its CSVs (and the trajectory
/// log if requested) into cfg.out. run.json is written by write_run_json.
RunOutcome run_experiment(const SimConfig& cfg, std::ostream& log);

nlohmann::json versions_json();

void write_run_json(const std::string& path, const SimConfig& cfg,
                    const std::vector<std::string>& warnings, const RunOutcome& outcome,
                    const std::string& error = "");

}  // namespace feqj
