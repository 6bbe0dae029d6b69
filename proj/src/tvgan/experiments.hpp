// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-run drivers: parameter sweeps, model comparisons, plot tables and
// checkpoint evaluation. Runs fan out over a worker pool; each run owns its
// state and random streams, so results do not depend on the worker count.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tvgan/train.hpp"

namespace tvgan::experiments {

// Runs task(0..count-1) on up to `workers` threads. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

struct RunSummary {
  std::filesystem::path directory;
  std::uint64_t seed = 0;
  bool exploded = false;
  std::string explosion_reason;
  double w1 = 0.0;
  double w1_baseline = 0.0;
  std::size_t modes_captured = 0;
  double is_analog_mean = 0.0;
  double is_analog_std = 0.0;
  double extreme_bin_fraction = 0.0;
  double max_gap = 0.0;
  double tail_fluctuation = 0.0;  // tail max of the rolling std of loss_d
  bool diverged = false;          // critic gap above kDivergedGap at some row
};

inline constexpr double kDivergedGap = 1e3;
// Rolling window, in metrics rows, for the loss_d fluctuation summary.
inline constexpr std::size_t kFluctuationWindow = 10;

RunSummary summarize(const train::RunResult& result, std::uint64_t seed);

struct SweepRow {
  std::string value;
  std::size_t runs = 0;
  std::size_t exploded = 0;
  double is_mean = 0.0;        // seed average of the per-run split mean
  double is_mean_std = 0.0;    // std over seeds of the per-run split mean
  double is_split_std = 0.0;   // seed average of the per-run split std
  double w1_mean = 0.0;
  double w1_std = 0.0;
  double modes_mean = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::vector<RunSummary>> runs;  // [value][seed]
};

// Runs base with `param` set to each value, once per seed. Writes
// <out>/<param>_<value>/seed_<s>/ and <out>/aggregate.csv. Requires at least
// two values and one seed; exploded runs are recorded and skipped in the
// metric averages.
SweepResult sweep(const train::GanConfig& base, const std::string& param, const std::vector<std::string>& values,
                  const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out_dir,
                  std::size_t workers);

struct Scenario {
  bool homogeneous = false;
  double lr = 1e-4;

  std::string label() const;
};

struct CompareEntry {
  std::string model;
  Scenario scenario;
  std::vector<RunSummary> runs;  // one per seed
  std::size_t exploded_count() const;
  std::size_t diverged_count() const;
};

struct CompareResult {
  std::vector<CompareEntry> entries;
  std::string ranking;  // CSV text of the ranking table
};

// The config a comparison trains for `model` under `scenario`. Normalized
// scenarios give both nets batch normalization; homogeneous ones none.
train::GanConfig compare_config(const std::string& model, const Scenario& scenario, std::int64_t steps);

// Trains every model under every scenario for every seed. Writes
// <out>/<scenario>/<model>/seed_<s>/, <out>/compare.csv (one row per run) and
// <out>/ranking.csv (models ordered by explosions, then mean tail
// fluctuation, within each scenario). `steps` <= 0 keeps preset lengths.
CompareResult compare(const std::vector<std::string>& models, const std::vector<Scenario>& scenarios,
                      const std::vector<std::uint64_t>& seeds, std::int64_t steps,
                      const std::filesystem::path& out_dir, std::size_t workers);

// Plot tables from a run directory: loss, gap, lipschitz, hist, scatter.
std::string plotdata(const std::filesystem::path& run_dir, const std::string& kind);
const std::vector<std::string>& plot_kinds();

// EvalReport JSON lines for every checkpoint of a run, in step order. Also
// written to <run_dir>/eval.jsonl.
std::vector<metrics::EvalReport> evaluate_run(const std::filesystem::path& run_dir, std::size_t workers);

// Checkpoints of a run directory sorted by step.
std::vector<std::pair<std::int64_t, std::filesystem::path>> list_checkpoints(const std::filesystem::path& run_dir);

}  // namespace tvgan::experiments
