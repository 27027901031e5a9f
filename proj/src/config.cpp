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

#include "feqj/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace feqj {

using nlohmann::json;

namespace {

const char* const kResolutionNames[] = {"microstate", "microcanonical"};

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

void merge_into(json& base, const json& top) {
  if (!top.is_object() || !base.is_object()) {
    base = top;
    return;
  }
  for (auto it = top.begin(); it != top.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      merge_into(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

// Reads typed fields out of one JSON object, remembering which keys were
// consumed so leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {
    if (!obj_.is_object()) errors_.push_back(where("") + " must be an object");
  }

  ~Reader() {
    if (!obj_.is_object()) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      bool known = false;
      for (const auto& k : seen_) known = known || k == it.key();
      if (!known) errors_.push_back("unknown key '" + where(it.key()) + "'");
    }
  }

  bool has(const std::string& key) {
    seen_.push_back(key);
    return obj_.is_object() && obj_.contains(key);
  }

  const json* sub(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  std::string path(const std::string& key) const { return where(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(where(key) + ": wrong type (" + obj_.at(key).dump() + ")");
    }
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) {
      errors_.push_back(where(key) + ": expected a number, got " + v.dump());
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) errors_.push_back(where(key) + ": must be finite");
  }

  void count(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      errors_.push_back(where(key) + ": expected a non-negative integer, got " + v.dump());
      return;
    }
    out = v.get<std::size_t>();
  }

  template <class E, std::size_t N>
  void choice(const std::string& key, E& out, const char* const (&names)[N]) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_string()) {
      for (std::size_t i = 0; i < N; ++i) {
        if (v.get<std::string>() == names[i]) {
          out = static_cast<E>(i);
          return;
        }
      }
    }
    std::vector<std::string> opts(names, names + N);
    errors_.push_back(where(key) + ": expected one of {" + join(opts, ", ") + "}, got " + v.dump());
  }

 private:
  std::string where(const std::string& key) const {
    if (prefix_.empty()) return key;
    return key.empty() ? prefix_ : prefix_ + "." + key;
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::vector<std::string> seen_;
};

const char* const kExperimentNames[] = {"population", "trace-distance", "moments", "single"};
const char* const kDriveNames[] = {"sin", "rwa", "const"};
const char* const kMethodNames[] = {"rk4", "euler"};
const char* const kSchemeNames[] = {"cayley", "euler"};

std::size_t drive_index(DriveKind k) {
  switch (k) {
    case DriveKind::Sinusoidal: return 0;
    case DriveKind::RwaResonant: return 1;
    default: return 2;
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  return kExperimentNames[static_cast<std::size_t>(kind)];
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:\n  " + join(problems, "\n  ")),
      problems_(std::move(problems)) {}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json SimConfig::to_json() const {
  json j;
  j["experiment"] = std::string(to_string(experiment));
  j["calorimeter"] = {{"n_modes", n_modes},
                      {"cap", cap},
                      {"coupling_sq", coupling_sq},
                      {"mode_energy", mode_energy},
                      {"resolution", kResolutionNames[static_cast<std::size_t>(resolution)]}};
  j["drive"] = {{"kind", kDriveNames[drive_index(drive)]},
                {"lambda0", lambda0},
                {"omega_d", omega_d},
                {"tau", tau}};
  j["beta"] = beta;
  j["integrator"] = {{"steps", steps}, {"method", kMethodNames[static_cast<std::size_t>(method)]}};
  j["trajectories"] = {{"count", trajectories},
                       {"N", n_list},
                       {"seed", seed},
                       {"steps", trajectory_steps},
                       {"scheme", kSchemeNames[static_cast<std::size_t>(scheme)]},
                       {"snapshots", snapshots},
                       {"repetitions", repetitions},
                       {"log", log_trajectories}};
  j["moments"] = {{"tau_points", tau_points}};
  j["threads"] = threads;
  j["out"] = out;
  return j;
}

std::string SimConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

json preset(const std::string& name) {
  const json bench_cal = {{"n_modes", 10},
                          {"cap", 1},
                          {"coupling_sq", 0.001},
                          {"mode_energy", 1.0},
                          {"resolution", "microcanonical"}};
  if (name == "fig2") {
    return {{"experiment", "population"},
            {"calorimeter", bench_cal},
            {"drive", {{"kind", "sin"}, {"lambda0", 0.05}, {"omega_d", {0.9, 1.0, 1.1}}, {"tau", 100.0}}}};
  }
  if (name == "fig3") {
    return {{"experiment", "trace-distance"},
            {"calorimeter", bench_cal},
            {"drive", {{"kind", "sin"}, {"lambda0", 0.05}, {"omega_d", {1.0}}, {"tau", 100.0}}},
            {"trajectories", {{"N", {100, 1000, 10000}}, {"repetitions", 5}}}};
  }
  if (name == "fig45") {
    return {{"experiment", "moments"},
            {"calorimeter", bench_cal},
            {"drive", {{"kind", "sin"}, {"lambda0", 0.05}, {"omega_d", {0.9, 1.0, 1.1}}, {"tau", 100.0}}},
            {"trajectories", {{"count", 10000}}},
            {"moments", {{"tau_points", 10}}}};
  }
  throw ConfigError({"unknown preset '" + name + "' (expected fig2, fig3 or fig45)"});
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"config file '" + path + "' is not valid JSON: " + e.what()});
  }
}

LoadedConfig load_config(const std::optional<std::string>& preset_name, const json& file,
                         const json& overrides) {
  json merged = json::object();
  bool tau_from_preset = false;
  if (preset_name) {
    merged = preset(*preset_name);
    tau_from_preset = true;
  }
  auto sets_tau = [](const json& j) {
    return j.is_object() && j.contains("drive") && j["drive"].is_object() &&
           j["drive"].contains("tau");
  };
  if (!file.is_null()) merge_into(merged, file);
  if (!overrides.is_null()) merge_into(merged, overrides);
  if (sets_tau(file) || sets_tau(overrides)) tau_from_preset = false;

  LoadedConfig out;
  SimConfig& c = out.config;
  std::vector<std::string> errors;
  bool have_beta = false;
  bool have_tau = false;
  bool have_experiment = false;
  {
    Reader root(merged, "", errors);
    have_experiment = root.has("experiment");
    root.choice("experiment", c.experiment, kExperimentNames);
    have_beta = root.has("beta");
    root.number("beta", c.beta);
    root.get("threads", c.threads);
    root.get("out", c.out);
    if (const json* cal = root.sub("calorimeter")) {
      Reader r(*cal, "calorimeter", errors);
      r.get("n_modes", c.n_modes);
      r.get("cap", c.cap);
      r.number("coupling_sq", c.coupling_sq);
      r.number("mode_energy", c.mode_energy);
      r.choice("resolution", c.resolution, kResolutionNames);
    }
    if (const json* d = root.sub("drive")) {
      Reader r(*d, "drive", errors);
      std::size_t kind = drive_index(c.drive);
      r.choice("kind", kind, kDriveNames);
      c.drive = kind == 0 ? DriveKind::Sinusoidal : kind == 1 ? DriveKind::RwaResonant : DriveKind::Constant;
      r.number("lambda0", c.lambda0);
      if (r.has("omega_d")) {
        const json& w = d->at("omega_d");
        if (w.is_number()) {
          c.omega_d = {w.get<double>()};
        } else {
          r.get("omega_d", c.omega_d);
        }
      }
      have_tau = r.has("tau");
      r.number("tau", c.tau);
    }
    if (const json* it = root.sub("integrator")) {
      Reader r(*it, "integrator", errors);
      r.count("steps", c.steps);
      r.choice("method", c.method, kMethodNames);
    }
    if (const json* t = root.sub("trajectories")) {
      Reader r(*t, "trajectories", errors);
      r.count("count", c.trajectories);
      r.get("N", c.n_list);
      r.get("seed", c.seed);
      r.count("steps", c.trajectory_steps);
      r.choice("scheme", c.scheme, kSchemeNames);
      r.count("snapshots", c.snapshots);
      r.count("repetitions", c.repetitions);
      r.get("log", c.log_trajectories);
    }
    if (const json* m = root.sub("moments")) {
      Reader r(*m, "moments", errors);
      r.count("tau_points", c.tau_points);
    }
  }

  if (!have_experiment) errors.push_back("experiment: required (population, trace-distance, moments, single)");
  if (!have_tau) {
    errors.push_back("drive.tau: required (total drive time in units of 1/omega_0)");
  } else if (!(c.tau > 0.0)) {
    errors.push_back("drive.tau: must be > 0, got " + std::to_string(c.tau));
  }
  if (c.lambda0 < 0.0) errors.push_back("drive.lambda0: must be >= 0, got " + std::to_string(c.lambda0));
  if (c.omega_d.empty()) errors.push_back("drive.omega_d: needs at least one frequency");
  for (double w : c.omega_d) {
    if (!std::isfinite(w) || w < 0.0) errors.push_back("drive.omega_d: entries must be finite and >= 0");
  }
  if (c.n_modes < 1) errors.push_back("calorimeter.n_modes: must be >= 1");
  if (c.cap < 1) errors.push_back("calorimeter.cap: must be >= 1");
  if (c.coupling_sq < 0.0) errors.push_back("calorimeter.coupling_sq: must be >= 0");
  if (!(c.mode_energy > 0.0)) errors.push_back("calorimeter.mode_energy: must be > 0");
  if (c.beta < 0.0 || std::isnan(c.beta)) errors.push_back("beta: must be >= 0");
  if (c.steps < 1) errors.push_back("integrator.steps: must be >= 1");
  if (c.trajectory_steps < 1) errors.push_back("trajectories.steps: must be >= 1");
  if (c.snapshots < 1) errors.push_back("trajectories.snapshots: must be >= 1");
  if (c.repetitions < 1) errors.push_back("trajectories.repetitions: must be >= 1");
  if (c.tau_points < 1) errors.push_back("moments.tau_points: must be >= 1");
  if (c.threads < 0) errors.push_back("threads: must be >= 0");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] == 0 || (i > 0 && c.n_list[i] <= c.n_list[i - 1])) {
      errors.push_back("trajectories.N: must be strictly increasing positive counts");
      break;
    }
  }
  if (c.experiment == ExperimentKind::TraceDistanceVsN && c.n_list.empty()) {
    errors.push_back("trajectories.N: required for the trace-distance experiment");
  }
  if (!errors.empty()) throw ConfigError(errors);

  if (!have_beta) {
    out.warnings.push_back("beta not given; using beta*hbar*omega_0 = 1");
  }
  if (tau_from_preset) {
    out.warnings.push_back("drive.tau taken from the preset (100/omega_0); pass --tau to choose it");
  }
  return out;
}

}  // namespace feqj
