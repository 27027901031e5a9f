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

#include "feqj/ensemble.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>

#include <omp.h>

namespace feqj {

namespace {

constexpr std::size_t kChunk = 64;

struct Chunk {
  std::size_t begin;
  std::size_t end;
};

// Chunks never straddle a checkpoint.
std::vector<Chunk> make_chunks(const std::vector<std::size_t>& checkpoints) {
  std::vector<Chunk> chunks;
  std::size_t begin = 0;
  for (std::size_t cp : checkpoints) {
    while (begin < cp) {
      const std::size_t end = std::min(cp, begin + kChunk);
      chunks.push_back({begin, end});
      begin = end;
    }
  }
  return chunks;
}

std::vector<ConditionedState> averages(const SnapshotAccumulator& acc, std::size_t count,
                                       const TrajectoryEngine& engine) {
  const auto& steps = engine.config().snapshot_steps;
  std::vector<ConditionedState> out;
  out.reserve(steps.size());
  for (std::size_t j = 0; j < steps.size(); ++j) {
    out.push_back(acc.average(j, count, engine.space().resolution(),
                              static_cast<double>(steps[j]) * engine.dt()));
  }
  return out;
}

}  // namespace

EnsembleResult run_ensemble(const TrajectoryEngine& engine, const EnsembleConfig& cfg) {
  if (cfg.n_trajectories < 1) throw std::invalid_argument("n_trajectories must be >= 1");
  EnsembleResult res;
  for (std::size_t cp : cfg.checkpoints) {
    if (cp == 0 || cp > cfg.n_trajectories || (!res.checkpoints.empty() && cp <= res.checkpoints.back())) {
      throw std::invalid_argument("checkpoints must be strictly increasing within [1, n_trajectories]");
    }
    res.checkpoints.push_back(cp);
  }
  if (res.checkpoints.empty() || res.checkpoints.back() != cfg.n_trajectories) {
    res.checkpoints.push_back(cfg.n_trajectories);
  }

  const std::size_t n = cfg.n_trajectories;
  const std::size_t n_snap = engine.config().snapshot_steps.size();
  const std::size_t n_sec = engine.space().size();
  res.work.resize(n);
  if (cfg.keep_records) res.records.resize(n);

  SnapshotAccumulator total(n_snap, n_sec);
  auto store = [&](std::size_t i, TrajectoryRecord&& rec) {
    res.work[i] = rec.work_at;
    if (cfg.keep_records) res.records[i] = std::move(rec);
  };

  if (cfg.exec == Execution::Serial) {
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      store(i, engine.run(cfg.master_seed, i, n_snap ? &total : nullptr));
      if (i + 1 == res.checkpoints[next_cp]) {
        res.snapshots.push_back(averages(total, i + 1, engine));
        ++next_cp;
      }
    }
    return res;
  }

  const auto chunks = make_chunks(res.checkpoints);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, omp_get_max_threads())) * 2;
  std::vector<SnapshotAccumulator> partial(std::min(batch, chunks.size()),
                                           SnapshotAccumulator(n_snap, n_sec));
  std::size_t next_cp = 0;
  for (std::size_t first = 0; first < chunks.size(); first += batch) {
    const std::size_t last = std::min(chunks.size(), first + batch);
    const auto count = static_cast<std::ptrdiff_t>(last - first);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
      const Chunk& ch = chunks[first + static_cast<std::size_t>(c)];
      SnapshotAccumulator& acc = partial[static_cast<std::size_t>(c)];
      try {
        acc.clear();
        for (std::size_t i = ch.begin; i < ch.end; ++i) {
          store(i, engine.run(cfg.master_seed, i, n_snap ? &acc : nullptr));
        }
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t c = first; c < last; ++c) {
      total.add(partial[c - first]);
      if (chunks[c].end == res.checkpoints[next_cp]) {
        res.snapshots.push_back(averages(total, chunks[c].end, engine));
        ++next_cp;
      }
    }
  }
  return res;
}

}  // namespace feqj
