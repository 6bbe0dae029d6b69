// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvgan/data.hpp"
#include "tvgan/losses.hpp"
#include "tvgan/metrics.hpp"
#include "tvgan/nets.hpp"
#include "tvgan/optim.hpp"
#include "tvgan/rng.hpp"

namespace tvgan::train {

enum class Objective { wasserstein, vanilla };
enum class OptimizerKind { adam, sgd };
// Whether the critic normalizes its hidden layers. `automatic` follows the
// architecture, except that gradient-penalty critics never normalize.
enum class CriticNorm { automatic, on, off };

struct GanConfig {
  std::string name = "custom";
  Objective objective = Objective::wasserstein;
  losses::LossConfig loss;
  std::string dataset = "ring8";
  data::LatentSpec latent;
  bool homogeneous = false;  // no normalization in any layer
  CriticNorm critic_norm = CriticNorm::automatic;
  std::size_t hidden_width = 128;
  std::size_t hidden_layers = 3;
  std::size_t batch_size = 64;
  std::size_t n_critic = 5;
  std::int64_t steps = 20000;  // generator steps
  OptimizerKind optimizer = OptimizerKind::adam;
  double lr_generator = 1e-4;
  double lr_critic = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  std::uint64_t seed = 1;
  std::size_t metrics_every = 50;       // generator steps between metrics rows
  std::size_t checkpoint_every = 5000;  // generator steps between checkpoints
  std::size_t probe_size = 256;
  std::size_t eval_samples = 2000;

  void validate() const;
  bool generator_normalizes() const { return !homogeneous; }
  bool critic_normalizes() const;
  nets::MlpSpec generator_spec() const;
  nets::MlpSpec critic_spec() const;
  data::MixtureSpec mixture() const { return data::mixture_by_name(dataset); }
};

// One metrics row. Diagnostic fields are evaluated on the frozen probe batch
// during the last critic update before the row is written.
struct MetricsRecord {
  std::int64_t step = 0;
  std::int64_t critic_steps = 0;
  double loss_d = 0.0;
  double loss_g = 0.0;
  double d_real_mean = 0.0;
  double d_fake_mean = 0.0;
  double reg_term = 0.0;
  double critic_grad_norm = 0.0;
  double generator_grad_norm = 0.0;
  double lipschitz_pairwise = 0.0;
  double lipschitz_grad = 0.0;
  double margin_residual = 0.0;  // |mean(d_real - d_fake) - delta|
  double bound_q50 = 0.0;        // quantiles of |d_real - d_fake - delta| over the batch
  double bound_q90 = 0.0;
  double probe_real_change = 0.0;  // D_{n+1} - D_n, mean over the real probe
  double probe_fake_change = 0.0;
  double taylor_residual_real = 0.0;
  double taylor_residual_fake = 0.0;
  bool exploded = false;

  double gap() const { return d_real_mean - d_fake_mean; }
};

std::vector<std::string> metrics_columns();
std::string metrics_header();
std::string metrics_row(const MetricsRecord& record);

struct TrainState {
  GanConfig config;
  nets::MlpSpec generator_spec;
  nets::MlpSpec critic_spec;
  nets::ParamSet generator;
  nets::ParamSet critic;
  optim::AdamState generator_opt;
  optim::AdamState critic_opt;
  data::MixtureSpec mixture;
  Rng data_rng;
  Rng latent_rng;
  Rng gp_rng;
  Tensor probe_real;
  Tensor probe_latent;
  std::int64_t generator_steps = 0;
  std::int64_t critic_steps = 0;

  explicit TrainState(const GanConfig& config);
};

struct CriticStepResult {
  double loss = 0.0;
  double d_real_mean = 0.0;
  double d_fake_mean = 0.0;
  double reg_term = 0.0;
  double grad_norm = 0.0;
  double margin_residual = 0.0;
  double bound_q50 = 0.0;
  double bound_q90 = 0.0;
  // Probe diagnostics, filled when requested.
  double probe_real_change = 0.0;
  double probe_fake_change = 0.0;
  double taylor_residual_real = 0.0;
  double taylor_residual_fake = 0.0;
};

struct GeneratorStepResult {
  double loss = 0.0;
  double grad_norm = 0.0;
  double d_fake_mean = 0.0;
};

// One critic update. Throws NonFiniteError on a non-finite loss or gradient.
CriticStepResult critic_step(TrainState& state, bool probe_diagnostics = false);
// One generator update with the critic frozen.
GeneratorStepResult generator_step(TrainState& state);

// Generated points from the current generator (eval mode).
Tensor generate(const TrainState& state, const Tensor& latent);

struct TaylorCheck {
  double actual = 0.0;     // mean D_after(probe) - mean D_before(probe)
  double predicted = 0.0;  // grad_theta mean D_before(probe) . (theta_after - theta_before)
  double residual = 0.0;   // |actual - predicted|
};

// First-order prediction of the change in the mean score over probe rows
// [begin, end) caused by moving the critic from `before` to `after`. The
// whole probe is scored as one batch with batch statistics and no
// running-statistics update.
TaylorCheck taylor_check(const nets::MlpSpec& spec, const nets::ParamSet& before, const nets::ParamSet& after,
                         const Tensor& probe, std::size_t begin = 0, std::size_t end = SIZE_MAX);

struct LipschitzEstimate {
  double pairwise_ratio_max = 0.0;
  double grad_norm_max = 0.0;
};

// Max |D(a) - D(b)| / |a - b| over all pairs of probe points (pairs closer
// than 1e-9 are skipped) and max row gradient norm of D, in eval mode.
LipschitzEstimate lipschitz_estimate(const nets::MlpSpec& spec, const nets::ParamSet& params,
                                     std::span<const Tensor> probe_batches);

struct MonitorReport {
  bool valid = false;
  std::size_t steps = 0;
  double taylor_residual_mean = 0.0;
  double taylor_residual_max = 0.0;
  double real_increase_fraction = 0.0;  // share of steps with probe_real_change >= 0
  double fake_decrease_fraction = 0.0;  // share of steps with probe_fake_change <= 0
  double mean_real_change = 0.0;
  double mean_fake_change = 0.0;
  double bound_median = 0.0;  // median over steps of the batch median of |gap - delta|
  double bound_q90 = 0.0;     // median over steps of the batch q90
  // Share of steps whose change difference |dReal - dFake| stays below
  // 2 * bound_q90, the step-size-free form of the gradient-difference bound.
  double change_gap_within_bound = 0.0;
};

// Summary of the Taylor, sign and margin monitors over a window of rows.
// Fewer than 2 rows gives an invalid (empty) report.
MonitorReport proposition_monitors(std::span<const MetricsRecord> window);

struct Fluctuation {
  std::vector<double> rolling_std;  // sample std of each full window
  double tail_max = 0.0;            // max over windows ending in the final 25%
};

Fluctuation fluctuation_stat(std::span<const double> series, std::size_t window);

inline constexpr double kExplodedGradNorm = 1e6;
inline constexpr double kExplodedScore = 1e9;

// True when a loss is not finite, the critic gradient norm exceeds 1e6, or a
// mean score exceeds 1e9 in magnitude.
bool explosion_detector(const MetricsRecord& record);

struct RunResult {
  std::filesystem::path directory;
  bool exploded = false;
  std::string explosion_reason;
  std::int64_t generator_steps = 0;
  std::int64_t critic_steps = 0;
  std::vector<MetricsRecord> records;
  std::optional<metrics::EvalReport> final_eval;
  double max_gap = 0.0;  // over every critic step
};

// Runs the schedule and writes the run directory:
//   config.snapshot, metrics.csv, ckpt_<step>.bin, samples_final.csv,
//   eval.json
RunResult run(const GanConfig& config, const std::filesystem::path& out_dir);

// Evaluation of generator/critic snapshots against fresh real samples.
metrics::EvalReport evaluate_state(const TrainState& state, std::size_t n_samples);

// Checkpoint records: "generator/<name>" and "critic/<name>".
void save_state_checkpoint(const TrainState& state, const std::filesystem::path& path);
void load_state_checkpoint(TrainState& state, const std::filesystem::path& path);

std::string_view objective_name(Objective o);
Objective objective_from_name(std::string_view name);
std::string_view optimizer_name(OptimizerKind o);
OptimizerKind optimizer_from_name(std::string_view name);
std::string_view critic_norm_name(CriticNorm c);
CriticNorm critic_norm_from_name(std::string_view name);

}  // namespace tvgan::train
