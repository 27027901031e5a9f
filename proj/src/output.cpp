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

#include "feqj/output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace feqj {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& config_hash,
                     const std::vector<std::string>& header)
    : out_(path), width_(header.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  out_ << "# config_hash=" << config_hash << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw std::invalid_argument("CSV row width mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_);
}

void write_series_csv(const std::string& path, const std::string& config_hash,
                      const ComparisonSeries& series) {
  std::vector<std::string> header{series.abscissa_name()};
  header.insert(header.end(), series.columns().begin(), series.columns().end());
  CsvWriter w(path, config_hash, header);
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<double> r{series.abscissa()[i]};
    r.insert(r.end(), series.row(i).begin(), series.row(i).end());
    w.row(r);
  }
}

nlohmann::json trajectory_to_json(const TrajectoryRecord& rec, const SectorSpace& space) {
  using nlohmann::json;
  auto sector = [&](SectorIndex s) {
    json j = {{"index", s}, {"energy", space.energy(s)}, {"excitations", space.excitations(s)}};
    if (space.resolution() == Resolution::Microstate) j["occupations"] = space.microstate(s).occupations();
    return j;
  };
  json events = json::array();
  for (const auto& e : rec.events) {
    events.push_back({{"t", e.time}, {"dir", std::string(to_string(e.direction))}, {"mode", e.mode}});
  }
  return {{"seed", {{"master", rec.master_seed}, {"index", rec.index}}},
          {"initial", {{"qubit", rec.initial_qubit}, {"sector", sector(rec.initial_sector)}}},
          {"events", events},
          {"final", {{"qubit", rec.final_qubit}, {"sector", sector(rec.final_sector)}}},
          {"work", rec.work}};
}

void write_trajectories_jsonl(const std::string& path, const std::vector<TrajectoryRecord>& records,
                              const SectorSpace& space, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& r : records) {
    auto j = trajectory_to_json(r, space);
    j["config_hash"] = config_hash;
    out << j.dump() << '\n';
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace feqj
