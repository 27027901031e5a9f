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

// Command-line front end: feqj_sim --preset fig2 --beta 1 --tau 100 --out run/

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "feqj/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Qubit + finite calorimeter: quantum jumps vs. master equation"};
  app.set_version_flag("--version", std::string(feqj::kVersion));

  std::string config_path, preset, experiment, resolution, drive, method, scheme, out;
  std::vector<double> omega_d;
  std::vector<std::size_t> n_list;
  double lambda0 = 0, beta = 0, tau = 0, coupling = 0;
  std::size_t steps = 0, trajectories = 0, traj_steps = 0, snapshots = 0, repetitions = 0,
              tau_points = 0;
  std::uint64_t seed = 0;
  int threads = 0, n_modes = 0, cap = 0;
  bool log_trajectories = false;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "named parameter set")
      ->check(CLI::IsMember({"fig2", "fig3", "fig45"}));
  app.add_option("--experiment", experiment)
      ->check(CLI::IsMember({"population", "trace-distance", "moments", "single"}));
  app.add_option("--omega-d", omega_d, "drive frequencies (comma separated)")->delimiter(',');
  app.add_option("--lambda0", lambda0, "drive amplitude");
  app.add_option("--beta", beta, "inverse temperature");
  app.add_option("--tau", tau, "total drive time");
  app.add_option("--steps", steps, "master-equation steps over tau");
  app.add_option("--method", method)->check(CLI::IsMember({"rk4", "euler"}));
  app.add_option("--trajectories", trajectories, "trajectory count");
  app.add_option("--N", n_list, "nested trajectory counts for trace-distance")->delimiter(',');
  app.add_option("--trajectory-steps", traj_steps, "trajectory time steps over tau");
  app.add_option("--scheme", scheme, "no-jump step")->check(CLI::IsMember({"cayley", "euler"}));
  app.add_option("--snapshots", snapshots, "output/snapshot intervals");
  app.add_option("--repetitions", repetitions, "master seeds for trace-distance");
  app.add_option("--tau-points", tau_points, "tau grid points for moments");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--out", out, "output directory");
  app.add_option("--resolution", resolution)->check(CLI::IsMember({"microstate", "microcanonical"}));
  app.add_option("--drive", drive)->check(CLI::IsMember({"sin", "rwa", "const"}));
  app.add_option("--n-modes", n_modes, "calorimeter modes");
  app.add_option("--cap", cap, "occupation cap per mode");
  app.add_option("--coupling", coupling, "g^2 per mode");
  app.add_flag("--log-trajectories", log_trajectories, "write trajectories.jsonl");

  CLI11_PARSE(app, argc, argv);

  nlohmann::json ov = nlohmann::json::object();
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  if (given("--experiment")) ov["experiment"] = experiment;
  if (given("--beta")) ov["beta"] = beta;
  if (given("--threads")) ov["threads"] = threads;
  if (given("--out")) ov["out"] = out;
  if (given("--n-modes")) ov["calorimeter"]["n_modes"] = n_modes;
  if (given("--cap")) ov["calorimeter"]["cap"] = cap;
  if (given("--coupling")) ov["calorimeter"]["coupling_sq"] = coupling;
  if (given("--resolution")) ov["calorimeter"]["resolution"] = resolution;
  if (given("--drive")) ov["drive"]["kind"] = drive;
  if (given("--lambda0")) ov["drive"]["lambda0"] = lambda0;
  if (given("--omega-d")) ov["drive"]["omega_d"] = omega_d;
  if (given("--tau")) ov["drive"]["tau"] = tau;
  if (given("--steps")) ov["integrator"]["steps"] = steps;
  if (given("--method")) ov["integrator"]["method"] = method;
  if (given("--trajectories")) ov["trajectories"]["count"] = trajectories;
  if (given("--N")) ov["trajectories"]["N"] = n_list;
  if (given("--seed")) ov["trajectories"]["seed"] = seed;
  if (given("--trajectory-steps")) ov["trajectories"]["steps"] = traj_steps;
  if (given("--scheme")) ov["trajectories"]["scheme"] = scheme;
  if (given("--snapshots")) ov["trajectories"]["snapshots"] = snapshots;
  if (given("--repetitions")) ov["trajectories"]["repetitions"] = repetitions;
  if (given("--log-trajectories")) ov["trajectories"]["log"] = log_trajectories;
  if (given("--tau-points")) ov["moments"]["tau_points"] = tau_points;

  feqj::LoadedConfig loaded;
  try {
    nlohmann::json file;
    if (!config_path.empty()) file = feqj::read_json_file(config_path);
    loaded = feqj::load_config(preset.empty() ? std::nullopt : std::optional<std::string>(preset),
                               file, ov);
  } catch (const feqj::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 64;
  }
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';

  const auto& cfg = loaded.config;
  const std::string run_json = (std::filesystem::path(cfg.out) / "run.json").string();
  feqj::RunOutcome outcome;
  try {
    outcome = feqj::run_experiment(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    outcome.exit_code = 1;
    std::filesystem::create_directories(cfg.out);
    feqj::write_run_json(run_json, cfg, loaded.warnings, outcome, e.what());
    return 1;
  }
  feqj::write_run_json(run_json, cfg, loaded.warnings, outcome);
  if (outcome.exit_code != 0) std::cerr << "invariant monitor tripped; see " << run_json << '\n';
  std::cout << "wrote " << outcome.files.size() << " file(s) to " << cfg.out << " in "
            << outcome.seconds << " s\n";
  return outcome.exit_code;
}
