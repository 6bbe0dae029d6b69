// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "tvgan/config.hpp"
#include "tvgan/error.hpp"
#include "tvgan/format.hpp"

namespace tvgan::experiments {

namespace fs = std::filesystem;

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      {
        std::lock_guard lock(error_mutex);
        if (first_error) return;
      }
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

RunSummary summarize(const train::RunResult& result, std::uint64_t seed) {
  RunSummary s;
  s.directory = result.directory;
  s.seed = seed;
  s.exploded = result.exploded;
  s.explosion_reason = result.explosion_reason;
  s.max_gap = result.max_gap;
  s.diverged = result.max_gap > kDivergedGap;
  std::vector<double> loss_d;
  for (const train::MetricsRecord& r : result.records) loss_d.push_back(r.loss_d);
  if (loss_d.size() >= 2) s.tail_fluctuation = train::fluctuation_stat(loss_d, kFluctuationWindow).tail_max;
  if (result.final_eval) {
    const metrics::EvalReport& e = *result.final_eval;
    s.w1 = e.w1;
    s.w1_baseline = e.w1_baseline;
    s.modes_captured = e.modes_captured;
    s.is_analog_mean = e.is_analog_mean;
    s.is_analog_std = e.is_analog_std;
    s.extreme_bin_fraction = e.extreme_bin_fraction;
  } else {
    const double nan = std::nan("");
    s.w1 = s.w1_baseline = s.is_analog_mean = s.is_analog_std = s.extreme_bin_fraction = nan;
  }
  return s;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

std::string summary_csv_header() {
  return "seed,exploded,w1,w1_baseline,modes_captured,is_analog_mean,is_analog_std,extreme_bin_fraction,max_gap,"
         "tail_fluctuation,diverged";
}

std::string summary_csv_row(const RunSummary& s) {
  std::string out = std::to_string(s.seed) + (s.exploded ? ",1," : ",0,");
  out += format_double(s.w1) + ',' + format_double(s.w1_baseline) + ',' + std::to_string(s.modes_captured) + ',';
  out += format_double(s.is_analog_mean) + ',' + format_double(s.is_analog_std) + ',';
  out += format_double(s.extreme_bin_fraction) + ',' + format_double(s.max_gap) + ',';
  out += format_double(s.tail_fluctuation) + (s.diverged ? ",1" : ",0");
  return out;
}

}  // namespace

// ---- sweep -----------------------------------------------------------------

SweepResult sweep(const train::GanConfig& base, const std::string& param, const std::vector<std::string>& values,
                  const std::vector<std::uint64_t>& seeds, const fs::path& out_dir, std::size_t workers) {
  if (values.size() < 2) throw ConfigError("sweep.values", "a sweep needs at least two values");
  if (seeds.empty()) throw ConfigError("sweep.seeds", "a sweep needs at least one seed");
  if (param == "seed") throw ConfigError("sweep.param", "seed is swept through the seed list");

  std::vector<train::GanConfig> configs;
  std::vector<fs::path> dirs;
  for (const std::string& v : values) {
    for (std::uint64_t seed : seeds) {
      train::GanConfig c = base;
      config::set_field(c, param, v);
      c.seed = seed;
      c.validate();
      configs.push_back(c);
      dirs.push_back(out_dir / (param + "_" + v) / ("seed_" + std::to_string(seed)));
    }
  }
  fs::create_directories(out_dir);

  std::vector<RunSummary> summaries(configs.size());
  parallel_for(configs.size(), workers, [&](std::size_t i) {
    summaries[i] = summarize(train::run(configs[i], dirs[i]), configs[i].seed);
  });

  SweepResult result;
  std::string csv = "value,runs,exploded,is_analog_mean,is_analog_mean_std,is_analog_split_std,w1_mean,w1_std,"
                    "modes_mean\n";
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    SweepRow row;
    row.value = values[vi];
    std::vector<RunSummary> runs(summaries.begin() + static_cast<std::ptrdiff_t>(vi * seeds.size()),
                                 summaries.begin() + static_cast<std::ptrdiff_t>((vi + 1) * seeds.size()));
    std::vector<double> is_mean, is_std, w1, modes;
    for (const RunSummary& s : runs) {
      ++row.runs;
      if (s.exploded) {
        ++row.exploded;
        continue;
      }
      is_mean.push_back(s.is_analog_mean);
      is_std.push_back(s.is_analog_std);
      w1.push_back(s.w1);
      modes.push_back(static_cast<double>(s.modes_captured));
    }
    std::tie(row.is_mean, row.is_mean_std) = mean_std(is_mean);
    row.is_split_std = mean_std(is_std).first;
    std::tie(row.w1_mean, row.w1_std) = mean_std(w1);
    row.modes_mean = mean_std(modes).first;
    csv += row.value + ',' + std::to_string(row.runs) + ',' + std::to_string(row.exploded) + ',' +
           format_double(row.is_mean) + ',' + format_double(row.is_mean_std) + ',' +
           format_double(row.is_split_std) + ',' + format_double(row.w1_mean) + ',' + format_double(row.w1_std) +
           ',' + format_double(row.modes_mean) + '\n';
    result.rows.push_back(row);
    result.runs.push_back(std::move(runs));
  }
  write_text(out_dir / "aggregate.csv", csv);
  return result;
}

// ---- compare ---------------------------------------------------------------

std::string Scenario::label() const {
  return std::string(homogeneous ? "homogeneous" : "normalized") + "_lr" + format_double(lr);
}

std::size_t CompareEntry::exploded_count() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunSummary& s) { return s.exploded; }));
}

std::size_t CompareEntry::diverged_count() const {
  return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunSummary& s) { return s.diverged; }));
}

train::GanConfig compare_config(const std::string& model, const Scenario& scenario, std::int64_t steps) {
  train::GanConfig c = config::preset(model);
  c.homogeneous = scenario.homogeneous;
  c.critic_norm = scenario.homogeneous ? train::CriticNorm::off : train::CriticNorm::on;
  c.lr_generator = scenario.lr;
  c.lr_critic = scenario.lr;
  if (steps > 0) c.steps = steps;
  c.validate();
  return c;
}

CompareResult compare(const std::vector<std::string>& models, const std::vector<Scenario>& scenarios,
                      const std::vector<std::uint64_t>& seeds, std::int64_t steps, const fs::path& out_dir,
                      std::size_t workers) {
  if (models.empty()) throw ConfigError("compare.models", "no models given");
  if (scenarios.empty()) throw ConfigError("compare.scenarios", "no scenarios given");
  if (seeds.empty()) throw ConfigError("compare.seeds", "no seeds given");

  struct Job {
    std::size_t entry;
    train::GanConfig config;
    fs::path dir;
  };
  CompareResult result;
  std::vector<Job> jobs;
  for (const Scenario& sc : scenarios) {
    for (const std::string& m : models) {
      result.entries.push_back({m, sc, std::vector<RunSummary>(seeds.size())});
      const train::GanConfig base = compare_config(m, sc, steps);
      for (std::uint64_t seed : seeds) {
        train::GanConfig c = base;
        c.seed = seed;
        jobs.push_back({result.entries.size() - 1, c, out_dir / sc.label() / m / ("seed_" + std::to_string(seed))});
      }
    }
  }
  fs::create_directories(out_dir);
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::size_t slot = i % seeds.size();
    result.entries[job.entry].runs[slot] = summarize(train::run(job.config, job.dir), job.config.seed);
  });

  std::string csv = "scenario,model," + summary_csv_header() + "\n";
  for (const CompareEntry& e : result.entries) {
    for (const RunSummary& s : e.runs) csv += e.scenario.label() + ',' + e.model + ',' + summary_csv_row(s) + '\n';
  }
  write_text(out_dir / "compare.csv", csv);

  std::string ranking = "scenario,rank,model,exploded,diverged,tail_fluctuation_mean,w1_mean,modes_mean\n";
  for (const Scenario& sc : scenarios) {
    struct Row {
      std::string model;
      std::size_t exploded, diverged;
      double fluct, w1, modes;
    };
    std::vector<Row> rows;
    for (const CompareEntry& e : result.entries) {
      if (e.scenario.label() != sc.label()) continue;
      std::vector<double> fl, w1, modes;
      for (const RunSummary& s : e.runs) {
        fl.push_back(s.exploded ? std::numeric_limits<double>::infinity() : s.tail_fluctuation);
        if (!s.exploded) {
          w1.push_back(s.w1);
          modes.push_back(static_cast<double>(s.modes_captured));
        }
      }
      rows.push_back({e.model, e.exploded_count(), e.diverged_count(), mean_std(fl).first, mean_std(w1).first,
                      mean_std(modes).first});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.exploded != b.exploded) return a.exploded < b.exploded;
      return a.fluct < b.fluct;
    });
    for (std::size_t r = 0; r < rows.size(); ++r) {
      ranking += sc.label() + ',' + std::to_string(r + 1) + ',' + rows[r].model + ',' +
                 std::to_string(rows[r].exploded) + ',' + std::to_string(rows[r].diverged) + ',' +
                 format_double(rows[r].fluct) + ',' + format_double(rows[r].w1) + ',' +
                 format_double(rows[r].modes) + '\n';
    }
  }
  write_text(out_dir / "ranking.csv", ranking);
  result.ranking = ranking;
  return result;
}

// ---- plot data -------------------------------------------------------------

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

// Selected columns of a CSV file, renamed.
std::string project_csv(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& columns) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  const std::vector<std::string> header = split(line, ',');
  std::vector<std::size_t> idx;
  std::string out;
  for (const auto& [src, dst] : columns) {
    auto it = std::find(header.begin(), header.end(), src);
    if (it == header.end()) throw IoError(path.string() + " has no column '" + src + "'");
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
    out += (out.empty() ? "" : ",") + dst;
  }
  out += '\n';
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= cells.size()) throw IoError(path.string() + " has a short row");
      out += (k == 0 ? "" : ",") + cells[idx[k]];
    }
    out += '\n';
  }
  return out;
}

train::TrainState state_for_run(const fs::path& run_dir) {
  return train::TrainState(config::load(run_dir / "config.snapshot"));
}

}  // namespace

const std::vector<std::string>& plot_kinds() {
  static const std::vector<std::string> k = {"loss", "gap", "lipschitz", "hist", "scatter"};
  return k;
}

std::vector<std::pair<std::int64_t, fs::path>> list_checkpoints(const fs::path& run_dir) {
  std::vector<std::pair<std::int64_t, fs::path>> out;
  if (!fs::is_directory(run_dir)) throw IoError("no run directory " + run_dir.string());
  for (const fs::directory_entry& e : fs::directory_iterator(run_dir)) {
    const std::string name = e.path().filename().string();
    if (!name.starts_with("ckpt_") || !name.ends_with(".bin")) continue;
    const std::string digits = name.substr(5, name.size() - 9);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      continue;
    }
    out.emplace_back(std::stoll(digits), e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string plotdata(const fs::path& run_dir, const std::string& kind) {
  const fs::path metrics = run_dir / "metrics.csv";
  if (kind == "loss") return project_csv(metrics, {{"step", "step"}, {"loss_d", "L_D"}, {"loss_g", "L_G"}});
  if (kind == "gap") {
    return project_csv(metrics, {{"step", "step"}, {"d_real_mean", "d_real_mean"}, {"d_fake_mean", "d_fake_mean"},
                                 {"gap", "gap"}});
  }
  if (kind == "lipschitz") {
    return project_csv(metrics, {{"step", "step"}, {"lipschitz_pairwise", "lipschitz_pairwise"},
                                 {"lipschitz_grad", "lipschitz_grad"}});
  }
  if (kind == "scatter") return project_csv(run_dir / "samples_final.csv", {{"x", "x"}, {"y", "y"}});
  if (kind == "hist") {
    const auto ckpts = list_checkpoints(run_dir);
    if (ckpts.empty()) throw IoError("no checkpoints in " + run_dir.string());
    train::TrainState state = state_for_run(run_dir);
    train::load_state_checkpoint(state, ckpts.back().second);
    const std::vector<double> w = nets::pooled_weights(state.critic);
    double lo = *std::min_element(w.begin(), w.end());
    double hi = *std::max_element(w.begin(), w.end());
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    constexpr std::size_t kBins = 50;
    const std::vector<std::size_t> counts = nets::weight_histogram(state.critic, kBins, lo, hi);
    std::string out = "bin_center,count\n";
    const double width = (hi - lo) / static_cast<double>(kBins);
    for (std::size_t b = 0; b < kBins; ++b) {
      out += format_double(lo + (static_cast<double>(b) + 0.5) * width) + ',' + std::to_string(counts[b]) + '\n';
    }
    return out;
  }
  std::string known;
  for (const std::string& k : plot_kinds()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError("kind", "unknown plot kind '" + kind + "' (expected one of " + known + ")");
}

// ---- evaluation ------------------------------------------------------------

std::vector<metrics::EvalReport> evaluate_run(const fs::path& run_dir, std::size_t workers) {
  const auto ckpts = list_checkpoints(run_dir);
  if (ckpts.empty()) throw IoError("no checkpoints in " + run_dir.string());
  const train::GanConfig cfg = config::load(run_dir / "config.snapshot");
  std::vector<metrics::EvalReport> reports(ckpts.size());
  parallel_for(ckpts.size(), workers, [&](std::size_t i) {
    train::TrainState state(cfg);
    train::load_state_checkpoint(state, ckpts[i].second);
    state.generator_steps = ckpts[i].first;
    metrics::EvalReport rep = train::evaluate_state(state, cfg.eval_samples);
    rep.checkpoint = ckpts[i].second.filename().string();
    reports[i] = rep;
  });
  std::string lines;
  for (const metrics::EvalReport& r : reports) lines += r.to_json() + '\n';
  write_text(run_dir / "eval.jsonl", lines);
  return reports;
}

}  // namespace tvgan::experiments
