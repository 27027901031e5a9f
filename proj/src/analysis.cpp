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

#include "feqj/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "feqj/linalg.hpp"

namespace feqj {

namespace {

std::size_t step_of(double t, double total, std::size_t n_steps, const char* what) {
  if (!(total > 0.0)) throw std::invalid_argument("drive total time must be > 0");
  const double x = t / total * static_cast<double>(n_steps);
  const double k = std::round(x);
  if (std::abs(x - k) > 1e-6 || k < 0.0 || k > static_cast<double>(n_steps)) {
    std::ostringstream os;
    os << what << " time " << t << " is not on the " << n_steps << "-step grid over [0, " << total
       << "]";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(k);
}

std::vector<std::size_t> equidistant_steps(std::size_t n_steps, std::size_t n_points,
                                           const char* what) {
  if (n_points < 1 || n_steps % n_points != 0) {
    std::ostringstream os;
    os << what << " steps (" << n_steps << ") must be a multiple of the snapshot count ("
       << n_points << ")";
    throw std::invalid_argument(os.str());
  }
  std::vector<std::size_t> steps;
  for (std::size_t j = 0; j <= n_points; ++j) steps.push_back(j * (n_steps / n_points));
  return steps;
}

}  // namespace

DriveProtocol drive_at_frequency(const DriveProtocol& d, double omega) {
  if (d.kind() == DriveKind::Sinusoidal) {
    return DriveProtocol::sinusoidal(d.amplitude(), omega, d.total_time());
  }
  return d;
}

double trace_distance(const ConditionedState& a, const ConditionedState& b) {
  if (a.resolution != b.resolution || a.size() != b.size()) {
    throw std::invalid_argument("trace_distance: states live in different sector bases");
  }
  double t = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) t += trace_norm(a.blocks[s] - b.blocks[s]);
  return 0.5 * t;
}

ComparisonSeries::ComparisonSeries(std::string abscissa_name, std::vector<std::string> columns)
    : abscissa_name_(std::move(abscissa_name)), columns_(std::move(columns)) {}

void ComparisonSeries::add_row(double x, std::vector<double> values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("row width does not match columns");
  if (!x_.empty() && !(x > x_.back())) {
    throw std::invalid_argument("series abscissa must be strictly increasing");
  }
  x_.push_back(x);
  rows_.push_back(std::move(values));
}

std::vector<double> ComparisonSeries::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == name) {
      std::vector<double> out;
      out.reserve(rows_.size());
      for (const auto& r : rows_) out.push_back(r[c]);
      return out;
    }
  }
  throw std::out_of_range("no column named " + name);
}

std::vector<ConditionedState> master_equation_snapshots(const ExperimentSetup& setup,
                                                        std::size_t n_snapshots,
                                                        InvariantReport* report) {
  const auto steps = equidistant_steps(setup.integrator.n_steps, n_snapshots, "integrator");
  const std::size_t stride = steps.size() > 1 ? steps[1] : 1;
  Liouvillian L(setup.space, setup.drive, setup.exec);
  ConditionedState state = thermal_state(setup.beta, *setup.space);
  std::vector<ConditionedState> out;
  out.reserve(steps.size());
  const auto rep = propagate(L, state, setup.drive.total_time(), setup.integrator,
                             [&](std::size_t k, const ConditionedState& s) {
                               if (k % stride == 0) out.push_back(s);
                             });
  if (report) report->merge(rep);
  return out;
}

ComparisonSeries max_trace_distance_vs_N(const EnsembleResult& ensemble,
                                         const std::vector<ConditionedState>& reference) {
  ComparisonSeries series("N", {"T_max"});
  for (std::size_t c = 0; c < ensemble.checkpoints.size(); ++c) {
    const auto& snaps = ensemble.snapshots[c];
    if (snaps.size() != reference.size()) {
      throw std::invalid_argument("ensemble and reference snapshot counts differ");
    }
    double t_max = 0.0;
    for (std::size_t j = 0; j < snaps.size(); ++j) {
      t_max = std::max(t_max, trace_distance(snaps[j], reference[j]));
    }
    series.add_row(static_cast<double>(ensemble.checkpoints[c]), {t_max});
  }
  return series;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

TraceDistanceStudy trace_distance_study(const ExperimentSetup& setup,
                                        const std::vector<std::size_t>& n_list,
                                        std::size_t repetitions, std::uint64_t seed,
                                        std::size_t n_snapshots) {
  if (n_list.empty()) throw std::invalid_argument("N list is empty");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  TraceDistanceStudy study;
  const auto reference = master_equation_snapshots(setup, n_snapshots, &study.report);

  TrajectoryConfig tc;
  tc.space = setup.space;
  tc.drive = setup.drive;
  tc.beta = setup.beta;
  tc.n_steps = setup.trajectory_steps;
  tc.scheme = setup.scheme;
  tc.snapshot_steps = equidistant_steps(setup.trajectory_steps, n_snapshots, "trajectory");
  tc.record_events = false;
  const TrajectoryEngine engine(tc);

  EnsembleConfig ec;
  ec.n_trajectories = n_list.back();
  ec.checkpoints = n_list;
  ec.exec = setup.exec;
  for (std::size_t r = 0; r < repetitions; ++r) {
    ec.master_seed = seed + r;
    const auto ens = run_ensemble(engine, ec);
    study.per_repetition.push_back(max_trace_distance_vs_N(ens, reference).column("T_max"));
  }

  std::vector<double> xs, means;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    double m = 0.0;
    for (const auto& rep : study.per_repetition) m += rep[i];
    m /= static_cast<double>(repetitions);
    double v = 0.0;
    for (const auto& rep : study.per_repetition) v += (rep[i] - m) * (rep[i] - m);
    const double err = repetitions > 1
                           ? std::sqrt(v / static_cast<double>(repetitions - 1) /
                                       static_cast<double>(repetitions))
                           : std::numeric_limits<double>::quiet_NaN();
    study.series.add_row(static_cast<double>(n_list[i]), {m, err});
    xs.push_back(static_cast<double>(n_list[i]));
    means.push_back(m);
  }
  study.slope = n_list.size() > 1 ? loglog_slope(xs, means) : 0.0;
  return study;
}

std::string frequency_label(double omega) {
  std::ostringstream os;
  os << std::setprecision(12) << omega;
  std::string s = os.str();
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

ComparisonSeries population_trace(const ExperimentSetup& setup,
                                  const std::vector<double>& frequencies, std::size_t n_points,
                                  InvariantReport* report) {
  std::vector<std::string> cols;
  for (double w : frequencies) cols.push_back("pop_" + frequency_label(w));
  ComparisonSeries series("t", cols);
  const auto steps = equidistant_steps(setup.integrator.n_steps, n_points, "integrator");
  std::vector<std::vector<double>> pops(frequencies.size());
  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    ExperimentSetup s = setup;
    s.drive = drive_at_frequency(setup.drive, frequencies[f]);
    for (const auto& st : master_equation_snapshots(s, n_points, report)) {
      pops[f].push_back(excited_population(st));
    }
  }
  const double h = setup.drive.total_time() / static_cast<double>(setup.integrator.n_steps);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    std::vector<double> row;
    for (const auto& p : pops) row.push_back(p[j]);
    series.add_row(static_cast<double>(steps[j]) * h, std::move(row));
  }
  return series;
}

std::vector<std::string> moments_columns() {
  return {"W1_tmp_prop", "W1_tmp_mc", "W1_tmp_mc_err", "W1_poa",   "W2_tmp_prop",
          "W2_tmp_mc",   "W2_tmp_mc_err", "W2_poa",     "diag_eq20"};
}

MomentsStudy moments_vs_tau(const ExperimentSetup& setup, const std::vector<double>& taus,
                            std::size_t n_trajectories, std::uint64_t seed, bool keep_records) {
  MomentsStudy study;
  study.series = ComparisonSeries("tau", moments_columns());
  const double total = setup.drive.total_time();
  std::vector<std::size_t> me_steps;
  std::vector<std::size_t> traj_steps;
  for (double tau : taus) {
    me_steps.push_back(step_of(tau, total, setup.integrator.n_steps, "tau"));
    traj_steps.push_back(step_of(tau, total, setup.trajectory_steps, "tau"));
  }

  WorkConfig wc{setup.space, setup.drive, setup.beta, setup.integrator, setup.exec};
  auto sweep = work_sweep(wc, me_steps, 2);
  study.report = sweep.report;
  study.samples = sweep.samples;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<WorkMoments> sampled(taus.size(), WorkMoments{MomentMethod::TmpTrajectories, nan, nan, nan, nan});
  if (n_trajectories > 0) {
    TrajectoryConfig tc;
    tc.space = setup.space;
    tc.drive = setup.drive;
    tc.beta = setup.beta;
    tc.n_steps = setup.trajectory_steps;
    tc.scheme = setup.scheme;
    tc.measurement_steps = traj_steps;
    tc.record_events = keep_records;
    const TrajectoryEngine engine(tc);
    EnsembleConfig ec;
    ec.n_trajectories = n_trajectories;
    ec.keep_records = keep_records;
    ec.master_seed = seed;
    ec.exec = setup.exec;
    auto ens = run_ensemble(engine, ec);
    std::vector<double> w(n_trajectories);
    for (std::size_t j = 0; j < taus.size(); ++j) {
      for (std::size_t i = 0; i < n_trajectories; ++i) w[i] = ens.work[i][j];
      if (n_trajectories >= 2) sampled[j] = tmp_moments_sampled(w);
    }
    for (auto& w_i : ens.work) w_i.resize(taus.size());
    study.works = std::move(ens.work);
    study.records = std::move(ens.records);
  }

  for (std::size_t j = 0; j < taus.size(); ++j) {
    const WorkSample& s = study.samples[j];
    study.series.add_row(taus[j], {s.tmp[1], sampled[j].first, sampled[j].first_err, s.poa_first,
                                   s.tmp[2], sampled[j].second, sampled[j].second_err, s.poa_second,
                                   s.diagnostic});
  }
  return study;
}

}  // namespace feqj
