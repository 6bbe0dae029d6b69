// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver over the C API.
//
//   tvgan train    --preset tv-ring8 --out-dir runs/tv --delta 10
//   tvgan sweep    --preset tv-ring8 --param delta --values 0,5,10 --seeds 1,2,3
//   tvgan compare  --models tv,gp --scenarios homogeneous:1e-4,normalized:1e-5
//   tvgan plotdata runs/tv --kind loss
//   tvgan eval     runs/tv
//
// Exit status: 0 success, 1 invalid input or failure, 2 training exploded.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tvgan/tvgan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExploded = 2;

struct ConfigDeleter {
  void operator()(tvgan_config* c) const { tvgan_config_free(c); }
};
using ConfigPtr = std::unique_ptr<tvgan_config, ConfigDeleter>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { tvgan_string_free(p); }
  std::string str() const { return p == nullptr ? std::string() : std::string(p); }
};

int report(tvgan_status status) {
  std::string msg = tvgan_last_error();
  const std::string field = tvgan_last_error_field();
  std::cerr << "tvgan: error: " << msg << '\n';
  if (!field.empty()) std::cerr << "tvgan: field: " << field << '\n';
  return status == TVGAN_EXPLODED ? kExitExploded : kExitError;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<uint64_t> parse_seeds(const std::string& s) {
  std::vector<uint64_t> out;
  for (const std::string& item : split_list(s)) out.push_back(std::stoull(item));
  return out;
}

// Config source and field overrides shared by train and sweep.
struct ConfigOptions {
  std::string preset;
  std::string config_path;
  std::vector<std::string> sets;
  std::string delta, lambda, steps, regularizer, lr;
  std::string seed;

  void add_to(CLI::App* cmd) {
    auto* p = cmd->add_option("--preset", preset, "Named preset (see `tvgan presets`)");
    auto* c = cmd->add_option("--config", config_path, "Config file (key = value lines)");
    p->excludes(c);
    cmd->add_option("--set", sets, "Override a field: key=value (repeatable)");
    cmd->add_option("--delta", delta, "Margin factor");
    cmd->add_option("--lambda", lambda, "Regularizer weight");
    cmd->add_option("--steps", steps, "Generator steps");
    cmd->add_option("--regularizer", regularizer, "none, clip, gp or tv");
    cmd->add_option("--lr", lr, "Learning rate for both nets");
    cmd->add_option("--seed", seed, "Random seed");
  }

  // Returns a status; on success *out holds the configured handle.
  tvgan_status build(ConfigPtr* out) const {
    tvgan_config* raw = nullptr;
    tvgan_status st = TVGAN_OK;
    if (!config_path.empty()) {
      st = tvgan_config_load(config_path.c_str(), &raw);
    } else {
      st = tvgan_config_from_preset(preset.empty() ? "tv-ring8" : preset.c_str(), &raw);
    }
    if (st != TVGAN_OK) return st;
    ConfigPtr cfg(raw);
    std::vector<std::pair<std::string, std::string>> fields;
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        // Route through the library so the diagnostics look the same.
        return tvgan_config_set(cfg.get(), s.c_str(), "");
      }
      fields.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!delta.empty()) fields.emplace_back("delta", delta);
    if (!lambda.empty()) fields.emplace_back("lambda", lambda);
    if (!steps.empty()) fields.emplace_back("steps", steps);
    if (!regularizer.empty()) fields.emplace_back("regularizer", regularizer);
    if (!lr.empty()) {
      fields.emplace_back("lr_generator", lr);
      fields.emplace_back("lr_critic", lr);
    }
    if (!seed.empty()) fields.emplace_back("seed", seed);
    for (const auto& [k, v] : fields) {
      st = tvgan_config_set(cfg.get(), k.c_str(), v.c_str());
      if (st != TVGAN_OK) return st;
    }
    *out = std::move(cfg);
    return TVGAN_OK;
  }
};

int cmd_train(const ConfigOptions& opts, const std::string& out_dir) {
  ConfigPtr cfg;
  if (tvgan_status st = opts.build(&cfg); st != TVGAN_OK) return report(st);
  tvgan_run_summary s{};
  const tvgan_status st = tvgan_train(cfg.get(), out_dir.c_str(), &s);
  if (st != TVGAN_OK && st != TVGAN_EXPLODED) return report(st);
  if (s.has_eval) {
    std::printf("run %s: steps=%lld w1=%.6g w1_baseline=%.6g modes=%zu is=%.4g+-%.3g exploded=0\n",
                out_dir.c_str(), static_cast<long long>(s.generator_steps), s.w1, s.w1_baseline, s.modes_captured,
                s.is_analog_mean, s.is_analog_std);
  } else {
    std::printf("run %s: steps=%lld exploded=1 (%s)\n", out_dir.c_str(), static_cast<long long>(s.generator_steps),
                tvgan_last_error());
  }
  return st == TVGAN_EXPLODED ? kExitExploded : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tvgan: toy-scale GAN training with Lipschitz regularizers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tvgan_version()));

  ConfigOptions train_opts;
  std::string train_out = "runs/train";
  auto* train = app.add_subcommand("train", "Train one model");
  train_opts.add_to(train);
  train->add_option("--out-dir", train_out, "Run directory")->capture_default_str();

  ConfigOptions sweep_opts;
  std::string sweep_out = "runs/sweep", sweep_param = "delta", sweep_values = "0,5,10", sweep_seeds = "1,2,3";
  std::size_t sweep_workers = 1;
  auto* sweep = app.add_subcommand("sweep", "Sweep one config field over several values and seeds");
  sweep_opts.add_to(sweep);
  sweep->add_option("--param", sweep_param, "Field to sweep")->capture_default_str();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->capture_default_str();
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds")->capture_default_str();
  sweep->add_option("--out-dir", sweep_out, "Sweep directory")->capture_default_str();
  sweep->add_option("--workers", sweep_workers, "Parallel runs")->capture_default_str();

  std::string cmp_models = "tv,gp,clip,none,vanilla";
  std::string cmp_scenarios = "homogeneous:1e-4,homogeneous:1e-5,normalized:1e-4,normalized:1e-5";
  std::string cmp_seeds = "1,2,3,4,5", cmp_out = "runs/compare";
  long long cmp_steps = 0;
  std::size_t cmp_workers = 1;
  auto* compare = app.add_subcommand("compare", "Compare models across scenarios and seeds");
  compare->add_option("--models", cmp_models, "Comma-separated models or presets")->capture_default_str();
  compare->add_option("--scenarios", cmp_scenarios, "Comma-separated homogeneous|normalized:lr")
      ->capture_default_str();
  compare->add_option("--seeds", cmp_seeds, "Comma-separated seeds")->capture_default_str();
  compare->add_option("--steps", cmp_steps, "Generator steps per run (0 keeps preset)")->capture_default_str();
  compare->add_option("--out-dir", cmp_out, "Comparison directory")->capture_default_str();
  compare->add_option("--workers", cmp_workers, "Parallel runs")->capture_default_str();

  std::string plot_dir, plot_kind;
  auto* plot = app.add_subcommand("plotdata", "Print a plot table from a run directory");
  plot->add_option("run_dir", plot_dir, "Run directory")->required();
  plot->add_option("--kind", plot_kind, "loss, gap, lipschitz, hist or scatter")->required();

  std::string eval_dir;
  std::size_t eval_workers = 1;
  auto* eval = app.add_subcommand("eval", "Evaluate every checkpoint of a run (JSON lines)");
  eval->add_option("run_dir", eval_dir, "Run directory")->required();
  eval->add_option("--workers", eval_workers, "Parallel evaluations")->capture_default_str();

  auto* presets = app.add_subcommand("presets", "List presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (train->parsed()) return cmd_train(train_opts, train_out);

    if (sweep->parsed()) {
      ConfigPtr cfg;
      if (tvgan_status st = sweep_opts.build(&cfg); st != TVGAN_OK) return report(st);
      const std::vector<std::string> values = split_list(sweep_values);
      std::vector<const char*> value_ptrs;
      for (const std::string& v : values) value_ptrs.push_back(v.c_str());
      const std::vector<uint64_t> seeds = parse_seeds(sweep_seeds);
      OwnedString csv;
      const tvgan_status st = tvgan_sweep(cfg.get(), sweep_param.c_str(), value_ptrs.data(), value_ptrs.size(),
                                          seeds.data(), seeds.size(), sweep_out.c_str(), sweep_workers, &csv.p);
      if (st != TVGAN_OK) return report(st);
      std::cout << csv.str();
      return kExitOk;
    }

    if (compare->parsed()) {
      const std::vector<std::string> models = split_list(cmp_models);
      std::vector<const char*> model_ptrs;
      for (const std::string& m : models) model_ptrs.push_back(m.c_str());
      std::vector<tvgan_scenario> scenarios;
      for (const std::string& item : split_list(cmp_scenarios)) {
        const auto colon = item.find(':');
        const std::string kind = item.substr(0, colon);
        if (kind != "homogeneous" && kind != "normalized") {
          std::cerr << "tvgan: error: unknown scenario '" << item << "' (expected homogeneous:<lr> or normalized:<lr>)\n";
          return kExitError;
        }
        const double lr = colon == std::string::npos ? 1e-4 : std::stod(item.substr(colon + 1));
        scenarios.push_back({kind == "homogeneous" ? 1 : 0, lr});
      }
      const std::vector<uint64_t> seeds = parse_seeds(cmp_seeds);
      OwnedString ranking;
      const tvgan_status st =
          tvgan_compare(model_ptrs.data(), model_ptrs.size(), scenarios.data(), scenarios.size(), seeds.data(),
                        seeds.size(), cmp_steps, cmp_out.c_str(), cmp_workers, &ranking.p);
      if (st != TVGAN_OK) return report(st);
      std::cout << ranking.str();
      return kExitOk;
    }

    if (plot->parsed()) {
      OwnedString table;
      const tvgan_status st = tvgan_plotdata(plot_dir.c_str(), plot_kind.c_str(), &table.p);
      if (st != TVGAN_OK) return report(st);
      std::cout << table.str();
      return kExitOk;
    }

    if (eval->parsed()) {
      OwnedString lines;
      const tvgan_status st = tvgan_eval(eval_dir.c_str(), eval_workers, &lines.p);
      if (st != TVGAN_OK) return report(st);
      std::cout << lines.str();
      return kExitOk;
    }

    if (presets->parsed()) {
      for (std::size_t i = 0; i < tvgan_preset_count(); ++i) {
        const char* name = nullptr;
        const char* description = nullptr;
        tvgan_preset_info(i, &name, &description);
        std::printf("%-14s %s\n", name, description);
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    // Malformed numbers in list options.
    std::cerr << "tvgan: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
