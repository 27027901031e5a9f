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

#include "feqj/work.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include "feqj/integrator.hpp"
#include "feqj/linalg.hpp"

namespace feqj {

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= x;
  return r;
}

void check_config(const WorkConfig& cfg) {
  if (!cfg.space) throw std::invalid_argument("work config needs a sector space");
  if (cfg.integrator.n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(cfg.drive.total_time() >= 0.0)) throw std::invalid_argument("drive total time must be >= 0");
}

// Tr{P sigma} for P = lambda' a^dag + conj(lambda') a; sigma need not be hermitian.
inline Complex power_trace(Complex dlambda, const QubitBlock& s) {
  return std::conj(dlambda) * s(1, 0) + dlambda * s(0, 1);
}

inline Complex drive_trace(Complex lambda, const QubitBlock& s) {
  return std::conj(lambda) * s(1, 0) + lambda * s(0, 1);
}

// Block layout: [rho^(0) | ... | rho^(n_max) | rho_P | scalars].
// The scalar block integrates W_poa (0,0), W_poa^2 (0,1), the diagnostic
// (1,0) and the dissipated-power integral (1,1) with the same RK4 stages.
class WorkRhs {
 public:
  WorkRhs(const SectorSpace& space, const DriveProtocol& drive, int n_max, Execution exec)
      : space_(space), drive_(drive), n_(space.size()), n_max_(n_max), exec_(exec) {}

  std::size_t total_blocks() const { return n_ * static_cast<std::size_t>(n_max_ + 2) + 1; }
  std::size_t power_offset() const { return n_ * static_cast<std::size_t>(n_max_ + 1); }
  std::size_t scalar_offset() const { return n_ * static_cast<std::size_t>(n_max_ + 2); }

  void operator()(double t, std::span<const QubitBlock> y, std::span<QubitBlock> dy) const {
    const Complex lam = drive_.value(t);
    const Complex dlam = drive_.derivative(t);
    for (int m = 0; m <= n_max_ + 1; ++m) {
      const std::size_t off = n_ * static_cast<std::size_t>(m);
      apply_liouvillian(space_, lam, y.subspan(off, n_), dy.subspan(off, n_), exec_);
    }
    const std::size_t pof = power_offset();
    Complex w1 = 0.0, w2 = 0.0, diag = 0.0, diss = 0.0;
    const QubitBlock h_q = qubit_hamiltonian(lam);
    for (std::size_t s = 0; s < n_; ++s) {
      const QubitBlock& r = y[s];
      QubitBlock& dp = dy[pof + s];
      // + P rho
      dp(0, 0) += std::conj(dlam) * r(1, 0);
      dp(0, 1) += std::conj(dlam) * r(1, 1);
      dp(1, 0) += dlam * r(0, 0);
      dp(1, 1) += dlam * r(0, 1);

      const auto si = static_cast<SectorIndex>(s);
      w1 += power_trace(dlam, r);
      w2 += power_trace(dlam, y[pof + s]);
      diag -= (space_.up_rate(si) + space_.down_rate(si)) * (lam * r(0, 1)).real();
      const QubitBlock& d = dy[s];
      diss += (h_q * d).trace() + space_.energy(si) * d.trace();
    }
    QubitBlock& acc = dy[scalar_offset()];
    acc(0, 0) = w1.real();
    acc(0, 1) = 2.0 * w2.real();
    acc(1, 0) = diag;
    acc(1, 1) = diss.real();
  }

 private:
  const SectorSpace& space_;
  const DriveProtocol& drive_;
  std::size_t n_;
  int n_max_;
  Execution exec_;
};

}  // namespace

double energy_moment(const SectorSpace& space, const ConditionedState& state, int k) {
  double acc = 0.0;
  for (std::size_t s = 0; s < state.size(); ++s) {
    const double e = space.energy(static_cast<SectorIndex>(s));
    acc += ipow(e, k) * state.blocks[s](0, 0).real() + ipow(e + kQubitGap, k) * state.blocks[s](1, 1).real();
  }
  return acc;
}

WorkSweep work_sweep(const WorkConfig& cfg, const std::vector<std::size_t>& sample_steps, int n_max) {
  check_config(cfg);
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const std::size_t n_steps = cfg.integrator.n_steps;
  for (std::size_t i = 0; i < sample_steps.size(); ++i) {
    if (sample_steps[i] > n_steps || (i > 0 && sample_steps[i] <= sample_steps[i - 1])) {
      throw std::invalid_argument("sample steps must be strictly increasing and <= n_steps");
    }
  }
  const SectorSpace& space = *cfg.space;
  const std::size_t n = space.size();
  WorkRhs rhs(space, cfg.drive, n_max, cfg.exec);

  std::vector<QubitBlock> y(rhs.total_blocks(), QubitBlock::Zero());
  const ConditionedState rho0 = thermal_state(cfg.beta, space);
  for (int m = 0; m <= n_max; ++m) {
    for (std::size_t s = 0; s < n; ++s) {
      const double e = space.energy(static_cast<SectorIndex>(s));
      QubitBlock& b = y[n * static_cast<std::size_t>(m) + s];
      b(0, 0) = ipow(-e, m) * rho0.blocks[s](0, 0);
      b(1, 1) = ipow(-e - kQubitGap, m) * rho0.blocks[s](1, 1);
    }
  }

  const double tau = cfg.drive.total_time();
  const double h = tau / static_cast<double>(n_steps);
  WorkSweep out;
  ConditionedState view{space.resolution(), std::vector<QubitBlock>(n), 0.0};
  double boundary0 = 0.0;
  auto emit = [&](std::size_t k) {
    const double t = k == n_steps ? tau : static_cast<double>(k) * h;
    WorkSample smp;
    smp.time = t;
    smp.tmp.assign(static_cast<std::size_t>(n_max + 1), 0.0);
    std::vector<double> traces(static_cast<std::size_t>(n_max + 1));
    for (int m = 0; m <= n_max; ++m) {
      std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(m)), n,
                  view.blocks.begin());
      for (int p = 0; p + m <= n_max; ++p) {
        // <W^(m+p)> gets C(m+p, m) Tr{H^p rho^(m)}.
        smp.tmp[static_cast<std::size_t>(m + p)] += binomial(m + p, m) * energy_moment(space, view, p);
      }
    }
    const QubitBlock& acc = y[rhs.scalar_offset()];
    smp.poa_first = acc(0, 0).real();
    smp.poa_second = acc(0, 1).real();
    smp.diagnostic = acc(1, 0).real();
    smp.dissipated_power_integral = acc(1, 1).real();
    const Complex lam = cfg.drive.value(t);
    Complex b = 0.0;
    double pop = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      b += drive_trace(lam, y[s]);
      pop += y[s](1, 1).real();
    }
    smp.boundary = b.real() - boundary0;
    smp.excited_population = pop;
    out.samples.push_back(std::move(smp));
  };
  {
    const Complex lam = cfg.drive.value(0.0);
    Complex b = 0.0;
    for (std::size_t s = 0; s < n; ++s) b += drive_trace(lam, y[s]);
    boundary0 = b.real();
  }

  double trace0 = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    trace0 += y[s].trace().real();
    out.report.min_eigenvalue = std::min(out.report.min_eigenvalue, hermitian_eigenvalues(y[s])[0]);
  }
  std::size_t next = 0;
  if (next < sample_steps.size() && sample_steps[next] == 0) {
    emit(0);
    ++next;
  }
  if (h == 0.0 || next == sample_steps.size()) {
    while (next < sample_steps.size()) emit(sample_steps[next++]);
    return out;
  }

  BlockIntegrator integ(y.size());
  InvariantReport scratch;
  for (std::size_t k = 1; k <= n_steps && next < sample_steps.size(); ++k) {
    const double t = static_cast<double>(k - 1) * h;
    const double t_new = k == n_steps ? tau : static_cast<double>(k) * h;
    integ.step(y, t, h, t_new, cfg.integrator.method, rhs);
    finish_density_step(std::span<QubitBlock>(y.data(), n), out.report, true, cfg.integrator, t_new);
    for (int m = 1; m <= n_max; ++m) {
      finish_density_step(std::span<QubitBlock>(y.data() + n * static_cast<std::size_t>(m), n),
                          scratch, false, cfg.integrator, t_new);
    }
    double tr = 0.0;
    for (std::size_t s = 0; s < n; ++s) tr += y[s](0, 0).real() + y[s](1, 1).real();
    out.report.max_trace_drift = std::max(out.report.max_trace_drift, std::abs(tr - trace0));
    ++out.report.steps;
    if (sample_steps[next] == k) {
      emit(k);
      ++next;
    }
  }
  return out;
}

std::vector<double> tmp_moments_propagated(const WorkConfig& cfg, int n_max) {
  return work_sweep(cfg, {cfg.integrator.n_steps}, n_max).samples.back().tmp;
}

WorkMoments tmp_moments_propagated(const WorkConfig& cfg) {
  const auto m = tmp_moments_propagated(cfg, 2);
  return {MomentMethod::TmpPropagated, m[1], m[2], 0.0, 0.0};
}

ConditionedState propagate_chi(const WorkConfig& cfg, int qubit, SectorIndex sector) {
  check_config(cfg);
  if (qubit != 0 && qubit != 1) throw std::invalid_argument("qubit index must be 0 or 1");
  if (sector >= cfg.space->size()) throw std::invalid_argument("sector out of range");
  ConditionedState chi = ConditionedState::zeros(*cfg.space);
  chi.blocks[sector](qubit, qubit) = 1.0;
  Liouvillian L(cfg.space, cfg.drive, cfg.exec);
  propagate(L, chi, cfg.drive.total_time(), cfg.integrator);
  return chi;
}

std::vector<double> tmp_moments_per_initial_state(const WorkConfig& cfg, int n_max, Execution exec) {
  check_config(cfg);
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const SectorSpace& space = *cfg.space;
  const auto q = qubit_thermal_weights(cfg.beta);
  const auto c = space.thermal_weights(cfg.beta);

  struct Job {
    int qubit;
    SectorIndex sector;
    double weight;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (int i = 0; i < 2; ++i) {
      const double w = q[static_cast<std::size_t>(i)] * c[s];
      if (w > 0.0) jobs.push_back({i, static_cast<SectorIndex>(s), w});
    }
  }

  // partial[j][n]: weighted contribution of job j to <W^n>.
  const auto width = static_cast<std::size_t>(n_max + 1);
  std::vector<std::vector<double>> partial(jobs.size(), std::vector<double>(width, 0.0));
  std::vector<std::exception_ptr> errors(jobs.size());
  WorkConfig inner = cfg;
  inner.exec = Execution::Serial;
  auto run_job = [&](std::size_t j) {
    try {
      const Job& job = jobs[j];
      const ConditionedState chi = propagate_chi(exec == Execution::Serial ? cfg : inner, job.qubit, job.sector);
      const double e0 = space.energy(job.sector) + kQubitGap * job.qubit;
      std::vector<double> h_tr(width);
      for (int p = 0; p <= n_max; ++p) h_tr[static_cast<std::size_t>(p)] = energy_moment(space, chi, p);
      for (int order = 0; order <= n_max; ++order) {
        double v = 0.0;
        for (int m = 0; m <= order; ++m) {
          v += binomial(order, m) * ipow(-e0, m) * h_tr[static_cast<std::size_t>(order - m)];
        }
        partial[j][static_cast<std::size_t>(order)] = job.weight * v;
      }
    } catch (...) {
      errors[j] = std::current_exception();
    }
  };
  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < n_jobs; ++j) run_job(static_cast<std::size_t>(j));
  } else {
    for (std::ptrdiff_t j = 0; j < n_jobs; ++j) run_job(static_cast<std::size_t>(j));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<double> moments(width, 0.0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < width; ++k) moments[k] += p[k];
  }
  return moments;
}

WorkMoments tmp_moments_sampled(std::span<const double> works) {
  if (works.size() < 2) throw std::invalid_argument("need at least two work samples");
  const auto n = static_cast<double>(works.size());
  double s1 = 0.0, s2 = 0.0;
  for (double w : works) {
    s1 += w;
    s2 += w * w;
  }
  const double m1 = s1 / n;
  const double m2 = s2 / n;
  double v1 = 0.0, v2 = 0.0;
  for (double w : works) {
    v1 += (w - m1) * (w - m1);
    v2 += (w * w - m2) * (w * w - m2);
  }
  return {MomentMethod::TmpTrajectories, m1, m2, std::sqrt(v1 / (n - 1.0) / n),
          std::sqrt(v2 / (n - 1.0) / n)};
}

WorkMoments tmp_moments_sampled(std::span<const TrajectoryRecord> records) {
  std::vector<double> w;
  w.reserve(records.size());
  for (const auto& r : records) w.push_back(r.work);
  return tmp_moments_sampled(w);
}

WorkMoments poa_moments(const WorkConfig& cfg) {
  const auto s = work_sweep(cfg, {cfg.integrator.n_steps}, 0).samples.back();
  return {MomentMethod::PowerOperator, s.poa_first, s.poa_second, 0.0, 0.0};
}

std::vector<WorkSample> tmp_poa_difference_diagnostic(const WorkConfig& cfg, std::size_t n_samples) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const std::size_t n_steps = cfg.integrator.n_steps;
  std::vector<std::size_t> steps;
  for (std::size_t j = 0; j <= n_samples; ++j) {
    const std::size_t k = j * n_steps / n_samples;
    if (steps.empty() || k > steps.back()) steps.push_back(k);
  }
  return work_sweep(cfg, steps, 2).samples;
}

}  // namespace feqj
