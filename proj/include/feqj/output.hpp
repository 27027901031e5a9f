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

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "feqj/analysis.hpp"
#include "feqj/sectors.hpp"
#include "feqj/trajectory.hpp"

namespace feqj {

/// %.17g; non-finite values become "nan", "inf" or "-inf".
std::string format_number(double x);

/// Writes "# config_hash=<hash>", one header line, then rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash,
            const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::string path_;
};

void write_series_csv(const std::string& path, const std::string& config_hash,
                      const ComparisonSeries& series);

nlohmann::json trajectory_to_json(const TrajectoryRecord& rec, const SectorSpace& space);

void write_trajectories_jsonl(const std::string& path, const std::vector<TrajectoryRecord>& records,
                              const SectorSpace& space, const std::string& config_hash);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace feqj
