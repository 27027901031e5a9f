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

#include "feqj/experiments.hpp"

#include <chrono>
#include <filesystem>

#include <Eigen/Core>
#include <omp.h>

#include "feqj/output.hpp"

namespace feqj {

namespace {

std::string per_frequency(const SimConfig& cfg, const std::string& stem, double omega) {
  if (cfg.omega_d.size() > 1) return stem + "_wd" + frequency_label(omega) + ".csv";
  return stem + ".csv";
}

nlohmann::json report_json(const InvariantReport& r, const IntegratorConfig& tol) {
  return {{"max_trace_drift", r.max_trace_drift},
          {"max_hermiticity_residual", r.max_hermiticity_residual},
          {"min_eigenvalue", std::isfinite(r.min_eigenvalue) ? r.min_eigenvalue : 0.0},
          {"steps", r.steps},
          {"tolerances",
           {{"trace", tol.trace_tolerance},
            {"hermiticity", tol.hermiticity_tolerance},
            {"positivity", tol.positivity_tolerance}}},
          {"ok", r.within(tol)}};
}

IntegratorConfig integrator_of(const SimConfig& cfg) {
  IntegratorConfig ic;
  ic.n_steps = cfg.steps;
  ic.method = cfg.method;
  return ic;
}

}  // namespace

std::shared_ptr<const SectorSpace> make_space(const SimConfig& cfg) {
  std::vector<CalorimeterMode> modes(static_cast<std::size_t>(cfg.n_modes),
                                     CalorimeterMode{cfg.cap, cfg.mode_energy, cfg.coupling_sq});
  return SectorSpace::make(CalorimeterModel(std::move(modes), cfg.resolution));
}

DriveProtocol make_drive(const SimConfig& cfg, double omega_d) {
  switch (cfg.drive) {
    case DriveKind::Sinusoidal: return DriveProtocol::sinusoidal(cfg.lambda0, omega_d, cfg.tau);
    case DriveKind::RwaResonant: return DriveProtocol::rwa_resonant(cfg.lambda0, cfg.tau);
    default: return DriveProtocol::constant(cfg.lambda0, cfg.tau);
  }
}

ExperimentSetup make_setup(const SimConfig& cfg, double omega_d) {
  ExperimentSetup s;
  s.space = make_space(cfg);
  s.drive = make_drive(cfg, omega_d);
  s.beta = cfg.beta;
  s.integrator = integrator_of(cfg);
  s.trajectory_steps = cfg.trajectory_steps;
  s.scheme = cfg.scheme;
  s.exec = Execution::Parallel;
  return s;
}

RunOutcome run_experiment(const SimConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out);
  const std::string hash = cfg.hash();
  auto path = [&](const std::string& name) { return (fs::path(cfg.out) / name).string(); };

  RunOutcome out;
  std::vector<TrajectoryRecord> records;
  std::shared_ptr<const SectorSpace> log_space;

  switch (cfg.experiment) {
    case ExperimentKind::Population: {
      const auto setup = make_setup(cfg, cfg.omega_d.front());
      log << "population: " << cfg.omega_d.size() << " drive frequencies, " << cfg.steps
          << " steps\n";
      const auto series = population_trace(setup, cfg.omega_d, cfg.snapshots, &out.report);
      write_series_csv(path("population.csv"), hash, series);
      out.files.push_back("population.csv");
      break;
    }
    case ExperimentKind::TraceDistanceVsN: {
      for (double w : cfg.omega_d) {
        const auto setup = make_setup(cfg, w);
        log << "trace distance: omega_d = " << w << ", " << cfg.repetitions << " repetitions\n";
        const auto study =
            trace_distance_study(setup, cfg.n_list, cfg.repetitions, cfg.seed, cfg.snapshots);
        out.report.merge(study.report);
        const std::string name = per_frequency(cfg, "tracedist", w);
        write_series_csv(path(name), hash, study.series);
        out.files.push_back(name);
        log << "  log-log slope " << study.slope << '\n';
      }
      break;
    }
    case ExperimentKind::MomentsVsTau: {
      std::vector<double> taus;
      for (std::size_t j = 1; j <= cfg.tau_points; ++j) {
        taus.push_back(cfg.tau * static_cast<double>(j) / static_cast<double>(cfg.tau_points));
      }
      for (double w : cfg.omega_d) {
        const auto setup = make_setup(cfg, w);
        log << "moments: omega_d = " << w << ", " << cfg.trajectories << " trajectories\n";
        auto study = moments_vs_tau(setup, taus, cfg.trajectories, cfg.seed, cfg.log_trajectories);
        out.report.merge(study.report);
        const std::string name = per_frequency(cfg, "moments", w);
        write_series_csv(path(name), hash, study.series);
        out.files.push_back(name);
        if (cfg.log_trajectories && records.empty()) {
          records = std::move(study.records);
          log_space = setup.space;
        }
      }
      break;
    }
    case ExperimentKind::Single: {
      const auto setup = make_setup(cfg, cfg.omega_d.front());
      log << "single: omega_d = " << cfg.omega_d.front() << ", " << cfg.trajectories
          << " trajectories\n";
      const auto me = master_equation_snapshots(setup, cfg.snapshots, &out.report);
      TrajectoryConfig tc;
      tc.space = setup.space;
      tc.drive = setup.drive;
      tc.beta = setup.beta;
      tc.n_steps = setup.trajectory_steps;
      tc.scheme = setup.scheme;
      tc.record_events = cfg.log_trajectories;
      if (setup.trajectory_steps % cfg.snapshots != 0) {
        throw std::invalid_argument("trajectories.steps must be a multiple of trajectories.snapshots");
      }
      for (std::size_t j = 0; j <= cfg.snapshots; ++j) {
        tc.snapshot_steps.push_back(j * (setup.trajectory_steps / cfg.snapshots));
      }
      const TrajectoryEngine engine(tc);
      EnsembleConfig ec;
      ec.n_trajectories = cfg.trajectories;
      ec.master_seed = cfg.seed;
      ec.keep_records = cfg.log_trajectories;
      auto ens = run_ensemble(engine, ec);
      CsvWriter csv(path("single.csv"), hash, {"t", "pop_me", "pop_qj", "trace_distance"});
      const auto& qj = ens.snapshots.back();
      for (std::size_t j = 0; j < me.size(); ++j) {
        csv.row({me[j].time, excited_population(me[j]), excited_population(qj[j]),
                 trace_distance(me[j], qj[j])});
      }
      out.files.push_back("single.csv");
      records = std::move(ens.records);
      log_space = setup.space;
      break;
    }
  }

  if (cfg.log_trajectories && log_space) {
    write_trajectories_jsonl(path("trajectories.jsonl"), records, *log_space, hash);
    out.files.push_back("trajectories.jsonl");
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.exit_code = out.report.within(integrator_of(cfg)) ? 0 : 2;
  return out;
}

nlohmann::json versions_json() {
  return {{"feqj", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"openmp", _OPENMP},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus}};
}

void write_run_json(const std::string& path, const SimConfig& cfg,
                    const std::vector<std::string>& warnings, const RunOutcome& outcome,
                    const std::string& error) {
  nlohmann::json j;
  j["config"] = cfg.to_json();
  j["config_hash"] = cfg.hash();
  j["versions"] = versions_json();
  j["timing"] = {{"wall_seconds", outcome.seconds}, {"threads", omp_get_max_threads()}};
  j["invariants"] = report_json(outcome.report, integrator_of(cfg));
  j["files"] = outcome.files;
  j["warnings"] = warnings;
  j["exit_code"] = outcome.exit_code;
  if (!error.empty()) j["error"] = error;
  write_json(path, j);
}

}  // namespace feqj
