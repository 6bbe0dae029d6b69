// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tvgan/checkpoint.hpp"
#include "tvgan/config.hpp"
#include "tvgan/error.hpp"
#include "tvgan/format.hpp"

namespace tvgan::train {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double mean_of(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v;
  return s / static_cast<double>(t.size());
}

std::uint64_t derived_seed(std::uint64_t seed, std::string_view tag) { return Rng(seed, tag).next_u64(); }

void apply_update(optim::AdamState& opt, OptimizerKind kind, nets::ParamSet& params, const nets::NamedGrads& grads) {
  if (kind == OptimizerKind::adam) {
    optim::adam_step(opt, params, grads);
  } else {
    optim::sgd_step(params, grads, opt.hyper.lr);
  }
}

// Mean critic score over rows [begin, end) of the probe, scored as one batch
// so normalization statistics come from the whole probe.
ad::Var probe_rows_mean(const nets::MlpSpec& spec, const nets::ParamSet& params, nets::BoundParams& bound,
                        ad::Graph& g, const Tensor& probe, std::size_t begin, std::size_t end) {
  ad::Var scores = nets::forward(spec, params, bound, g.constant(probe), nets::Mode::train, nullptr);
  return ad::mean(ad::slice_rows(scores, begin, end - begin));
}

// Scores real and fake rows as one batch, so both sides share the
// normalization statistics. Returns (D(real), D(fake)).
std::pair<ad::Var, ad::Var> score_joint(const nets::MlpSpec& spec, const nets::ParamSet& params,
                                        nets::BoundParams& bound, ad::Var real, ad::Var fake,
                                        nets::ParamSet* stats) {
  const std::size_t n = real.value().rows(), m = fake.value().rows();
  const ad::Var parts[] = {real, fake};
  ad::Var scores = nets::forward(spec, params, bound, ad::concat_rows(parts), nets::Mode::train, stats);
  return {ad::slice_rows(scores, 0, n), ad::slice_rows(scores, n, m)};
}

}  // namespace

// ---- configuration ---------------------------------------------------------

void GanConfig::validate() const {
  loss.validate();
  data::mixture_by_name(dataset);
  latent.validate();
  if (hidden_width == 0) throw ConfigError("hidden_width", "must be positive");
  if (hidden_layers == 0) throw ConfigError("hidden_layers", "must be positive");
  if (batch_size < 2) throw ConfigError("batch_size", "must be at least 2");
  if (n_critic < 1) throw ConfigError("n_critic", "must be at least 1");
  if (steps < 0) throw ConfigError("steps", "must be nonnegative");
  if (!(lr_generator > 0.0) || !std::isfinite(lr_generator)) throw ConfigError("lr_generator", "must be positive");
  if (!(lr_critic > 0.0) || !std::isfinite(lr_critic)) throw ConfigError("lr_critic", "must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1", "must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2", "must lie in [0, 1)");
  if (metrics_every < 1) throw ConfigError("metrics_every", "must be at least 1");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every", "must be at least 1");
  if (probe_size < 2) throw ConfigError("probe_size", "must be at least 2");
  if (eval_samples < 10 || eval_samples % 10 != 0 || eval_samples > metrics::kMaxAssignmentSize) {
    throw ConfigError("eval_samples", "must be a multiple of 10 between 10 and " +
                                          std::to_string(metrics::kMaxAssignmentSize));
  }
  if (objective == Objective::vanilla && loss.regularizer != losses::Regularizer::none) {
    throw ConfigError("regularizer", "the vanilla objective takes no Lipschitz regularizer (use none)");
  }
}

bool GanConfig::critic_normalizes() const {
  if (homogeneous) return false;
  switch (critic_norm) {
    case CriticNorm::on: return true;
    case CriticNorm::off: return false;
    case CriticNorm::automatic: return loss.regularizer != losses::Regularizer::gp;
  }
  return false;
}

nets::MlpSpec GanConfig::generator_spec() const {
  return nets::make_generator(latent.dim, hidden_width, hidden_layers, 2, generator_normalizes());
}

nets::MlpSpec GanConfig::critic_spec() const {
  return nets::make_critic(2, hidden_width, hidden_layers, critic_normalizes());
}

// ---- metrics rows ----------------------------------------------------------

std::vector<std::string> metrics_columns() {
  return {"step",
          "critic_steps",
          "loss_d",
          "loss_g",
          "d_real_mean",
          "d_fake_mean",
          "gap",
          "reg_term",
          "critic_grad_norm",
          "generator_grad_norm",
          "lipschitz_pairwise",
          "lipschitz_grad",
          "margin_residual",
          "bound_q50",
          "bound_q90",
          "probe_real_change",
          "probe_fake_change",
          "taylor_residual_real",
          "taylor_residual_fake",
          "exploded"};
}

std::string metrics_header() {
  std::string out;
  for (const std::string& c : metrics_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string metrics_row(const MetricsRecord& r) {
  std::string out = std::to_string(r.step) + ',' + std::to_string(r.critic_steps);
  for (double v : {r.loss_d, r.loss_g, r.d_real_mean, r.d_fake_mean, r.gap(), r.reg_term, r.critic_grad_norm,
                   r.generator_grad_norm, r.lipschitz_pairwise, r.lipschitz_grad, r.margin_residual, r.bound_q50,
                   r.bound_q90, r.probe_real_change, r.probe_fake_change, r.taylor_residual_real,
                   r.taylor_residual_fake}) {
    out += ',';
    out += format_double(v);
  }
  out += r.exploded ? ",1" : ",0";
  return out;
}

// ---- state -----------------------------------------------------------------

TrainState::TrainState(const GanConfig& cfg)
    : config(cfg),
      data_rng(cfg.seed, "data"),
      latent_rng(cfg.seed, "latent"),
      gp_rng(cfg.seed, "gp") {
  config.validate();
  generator_spec = config.generator_spec();
  critic_spec = config.critic_spec();
  generator = nets::build(generator_spec, derived_seed(config.seed, "init.generator"));
  critic = nets::build(critic_spec, derived_seed(config.seed, "init.critic"));
  generator_opt = optim::AdamState({config.lr_generator, config.beta1, config.beta2, 1e-8});
  critic_opt = optim::AdamState({config.lr_critic, config.beta1, config.beta2, 1e-8});
  mixture = config.mixture();
  probe_real = data::sample(mixture, config.probe_size, config.seed, "probe.real");
  probe_latent = data::sample(config.latent, config.probe_size, config.seed, "probe.latent");
}

Tensor generate(const TrainState& state, const Tensor& latent) {
  return nets::evaluate(state.generator_spec, state.generator, latent);
}

namespace {

// The real probe stacked over generated probe samples.
Tensor joint_probe(const TrainState& state) {
  const Tensor fake = generate(state, state.probe_latent);
  std::vector<double> v(state.probe_real.data().begin(), state.probe_real.data().end());
  v.insert(v.end(), fake.data().begin(), fake.data().end());
  return Tensor({state.probe_real.rows() + fake.rows(), state.probe_real.cols()}, std::move(v));
}

}  // namespace

TaylorCheck taylor_check(const nets::MlpSpec& spec, const nets::ParamSet& before, const nets::ParamSet& after,
                         const Tensor& probe, std::size_t begin, std::size_t end) {
  end = std::min(end, probe.rows());
  if (begin >= end) throw Error("taylor_check: empty row range");
  ad::Graph g;
  nets::BoundParams b = nets::bind(g, before, true);
  ad::Var score = probe_rows_mean(spec, before, b, g, probe, begin, end);
  const nets::NamedGrads grads = nets::collect_grads(g.backward(score), before, b);
  TaylorCheck out;
  for (const auto& [name, grad] : grads) {
    const Tensor& t0 = before.get(name);
    const Tensor& t1 = after.get(name);
    for (std::size_t i = 0; i < grad.size(); ++i) out.predicted += grad[i] * (t1[i] - t0[i]);
  }
  ad::Graph ga;
  nets::BoundParams ba = nets::bind(ga, after, false);
  out.actual = probe_rows_mean(spec, after, ba, ga, probe, begin, end).value().item() - score.value().item();
  out.residual = std::abs(out.actual - out.predicted);
  return out;
}

CriticStepResult critic_step(TrainState& state, bool probe_diagnostics) {
  const GanConfig& cfg = state.config;
  const Tensor x_real = data::sample(state.mixture, cfg.batch_size, state.data_rng);
  const Tensor z = data::sample(cfg.latent, cfg.batch_size, state.latent_rng);

  ad::Graph g;
  nets::BoundParams gen_bound = nets::bind(g, state.generator, false);
  const Tensor x_fake =
      nets::forward(state.generator_spec, state.generator, gen_bound, g.constant(z), nets::Mode::train, nullptr)
          .value();

  nets::BoundParams bound = nets::bind(g, state.critic, true);
  const auto [d_real, d_fake] =
      score_joint(state.critic_spec, state.critic, bound, g.constant(x_real), g.constant(x_fake), &state.critic);

  CriticStepResult out;
  out.d_real_mean = mean_of(d_real.value());
  out.d_fake_mean = mean_of(d_fake.value());
  if (!std::isfinite(out.d_real_mean) || !std::isfinite(out.d_fake_mean)) {
    throw NonFiniteError("critic scores", "critic produced non-finite scores");
  }

  ad::Var loss;
  const losses::LossConfig& lc = cfg.loss;
  if (cfg.objective == Objective::vanilla) {
    loss = losses::vanilla_losses(d_real, d_fake, d_fake).critic;
  } else {
    switch (lc.regularizer) {
      case losses::Regularizer::none:
      case losses::Regularizer::clip:
        loss = losses::wgan_critic_core(d_real, d_fake);
        break;
      case losses::Regularizer::gp: {
        const nets::ParamSet& critic = state.critic;
        const nets::MlpSpec& spec = state.critic_spec;
        auto critic_fn = [&](ad::Var x) {
          return nets::forward(spec, critic, bound, x, nets::Mode::train, nullptr);
        };
        ad::Var penalty = losses::gp_term(critic_fn, x_real, x_fake, g, state.gp_rng);
        out.reg_term = penalty.value().item();
        loss = ad::add(losses::wgan_critic_core(d_real, d_fake), ad::scalar_mul(penalty, lc.lambda));
        break;
      }
      case losses::Regularizer::tv: {
        ad::Var term = losses::tv_term(d_real, d_fake, lc.delta, lc.pairing);
        out.reg_term = term.value().item();
        loss = losses::tv_losses(d_real, d_fake, lc.lambda, lc.delta, lc.pairing).critic;
        break;
      }
    }
  }
  out.loss = loss.value().item();

  {
    const Tensor& r = d_real.value();
    const Tensor& f = d_fake.value();
    std::vector<double> residuals(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) residuals[i] = std::abs(r[i] - f[i] - lc.delta);
    out.margin_residual = std::abs(out.d_real_mean - out.d_fake_mean - lc.delta);
    out.bound_q50 = quantile(residuals, 0.5);
    out.bound_q90 = quantile(residuals, 0.9);
  }
  if (!std::isfinite(out.loss)) throw NonFiniteError("loss_d", "critic loss is not finite");

  const nets::NamedGrads grads = nets::collect_grads(g.backward(loss), state.critic, bound);
  out.grad_norm = optim::global_norm(grads);

  const nets::ParamSet before = state.critic;
  apply_update(state.critic_opt, cfg.optimizer, state.critic, grads);
  if (lc.regularizer == losses::Regularizer::clip) optim::clip_weights(state.critic, lc.clip);
  ++state.critic_steps;

  if (probe_diagnostics) {
    const Tensor probe = joint_probe(state);
    const std::size_t n = state.probe_real.rows();
    const TaylorCheck real = taylor_check(state.critic_spec, before, state.critic, probe, 0, n);
    const TaylorCheck fake = taylor_check(state.critic_spec, before, state.critic, probe, n, probe.rows());
    out.probe_real_change = real.actual;
    out.probe_fake_change = fake.actual;
    out.taylor_residual_real = real.residual;
    out.taylor_residual_fake = fake.residual;
  }
  return out;
}

GeneratorStepResult generator_step(TrainState& state) {
  const GanConfig& cfg = state.config;
  const Tensor x_real = data::sample(state.mixture, cfg.batch_size, state.data_rng);
  const Tensor z = data::sample(cfg.latent, cfg.batch_size, state.latent_rng);

  ad::Graph g;
  nets::BoundParams gen_bound = nets::bind(g, state.generator, true);
  ad::Var x_fake = nets::forward(state.generator_spec, state.generator, gen_bound, g.constant(z), nets::Mode::train,
                                 &state.generator);
  // The fakes are scored alongside a real batch, as in the critic update.
  nets::BoundParams critic_bound = nets::bind(g, state.critic, false);
  const ad::Var d_fake =
      score_joint(state.critic_spec, state.critic, critic_bound, g.constant(x_real), x_fake, nullptr).second;

  GeneratorStepResult out;
  out.d_fake_mean = mean_of(d_fake.value());
  ad::Var loss = cfg.objective == Objective::vanilla ? losses::vanilla_losses(d_fake, d_fake, d_fake).generator
                                                     : losses::wgan_generator_loss(d_fake);
  out.loss = loss.value().item();
  if (!std::isfinite(out.loss)) throw NonFiniteError("loss_g", "generator loss is not finite");
  const nets::NamedGrads grads = nets::collect_grads(g.backward(loss), state.generator, gen_bound);
  out.grad_norm = optim::global_norm(grads);
  apply_update(state.generator_opt, cfg.optimizer, state.generator, grads);
  ++state.generator_steps;
  return out;
}

// ---- diagnostics -----------------------------------------------------------

LipschitzEstimate lipschitz_estimate(const nets::MlpSpec& spec, const nets::ParamSet& params,
                                     std::span<const Tensor> probe_batches) {
  if (probe_batches.empty()) throw Error("lipschitz_estimate: no probe batches");
  ad::Graph g;
  std::vector<ad::Var> parts;
  for (const Tensor& b : probe_batches) parts.push_back(g.constant(b));
  const Tensor points = ad::concat_rows(parts).value();
  const std::size_t n = points.rows(), d = points.cols();

  nets::BoundParams bound = nets::bind(g, params, false);
  ad::Var x = g.leaf(points, true);
  ad::Var scores = nets::forward(spec, params, bound, x, nets::Mode::eval);
  const ad::Var wrt[] = {x};
  const Tensor grad = g.grad(ad::sum(scores), wrt, false).front().value();
  const Tensor& s = scores.value();

  LipschitzEstimate out;
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += grad[i * d + j] * grad[i * d + j];
    out.grad_norm_max = std::max(out.grad_norm_max, std::sqrt(sq));
    for (std::size_t k = i + 1; k < n; ++k) {
      double dist2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = points[i * d + j] - points[k * d + j];
        dist2 += diff * diff;
      }
      const double dist = std::sqrt(dist2);
      if (dist < 1e-9) continue;
      out.pairwise_ratio_max = std::max(out.pairwise_ratio_max, std::abs(s[i] - s[k]) / dist);
    }
  }
  return out;
}

MonitorReport proposition_monitors(std::span<const MetricsRecord> window) {
  MonitorReport rep;
  if (window.size() < 2) return rep;
  rep.valid = true;
  rep.steps = window.size();
  const double n = static_cast<double>(window.size());
  std::vector<double> q50, q90;
  std::size_t real_up = 0, fake_down = 0, within = 0;
  for (const MetricsRecord& r : window) {
    rep.taylor_residual_mean += 0.5 * (r.taylor_residual_real + r.taylor_residual_fake);
    rep.taylor_residual_max = std::max({rep.taylor_residual_max, r.taylor_residual_real, r.taylor_residual_fake});
    if (r.probe_real_change >= 0.0) ++real_up;
    if (r.probe_fake_change <= 0.0) ++fake_down;
    rep.mean_real_change += r.probe_real_change;
    rep.mean_fake_change += r.probe_fake_change;
    if (std::abs(r.probe_real_change - r.probe_fake_change) < 2.0 * r.bound_q90) ++within;
    q50.push_back(r.bound_q50);
    q90.push_back(r.bound_q90);
  }
  rep.taylor_residual_mean /= n;
  rep.mean_real_change /= n;
  rep.mean_fake_change /= n;
  rep.real_increase_fraction = static_cast<double>(real_up) / n;
  rep.fake_decrease_fraction = static_cast<double>(fake_down) / n;
  rep.change_gap_within_bound = static_cast<double>(within) / n;
  rep.bound_median = quantile(q50, 0.5);
  rep.bound_q90 = quantile(q90, 0.5);
  return rep;
}

Fluctuation fluctuation_stat(std::span<const double> series, std::size_t window) {
  if (window < 2) throw Error("fluctuation_stat: window must be at least 2");
  Fluctuation out;
  if (series.size() < 2) return out;
  auto sample_std = [](std::span<const double> w) {
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(w.size() - 1));
  };
  if (series.size() < window) {
    out.rolling_std.push_back(sample_std(series));
    out.tail_max = out.rolling_std.back();
    return out;
  }
  const std::size_t n = series.size();
  const std::size_t tail_start = n - (n + 3) / 4;  // first index of the final 25%
  bool any_tail = false;
  for (std::size_t end = window - 1; end < n; ++end) {
    const double s = sample_std(series.subspan(end + 1 - window, window));
    out.rolling_std.push_back(s);
    if (end >= tail_start) {
      out.tail_max = any_tail ? std::max(out.tail_max, s) : s;
      any_tail = true;
    }
  }
  return out;
}

bool explosion_detector(const MetricsRecord& r) {
  if (!std::isfinite(r.loss_d) || !std::isfinite(r.loss_g)) return true;
  if (!(r.critic_grad_norm <= kExplodedGradNorm)) return true;
  if (!(std::abs(r.d_real_mean) <= kExplodedScore) || !(std::abs(r.d_fake_mean) <= kExplodedScore)) return true;
  return false;
}

// ---- checkpoints and evaluation --------------------------------------------

void save_state_checkpoint(const TrainState& state, const std::filesystem::path& path) {
  nets::NamedTensors records;
  for (const nets::Param& p : state.generator.entries()) records.emplace_back("generator/" + p.name, p.value);
  for (const nets::Param& p : state.critic.entries()) records.emplace_back("critic/" + p.name, p.value);
  nets::save_checkpoint(path, records);
}

void load_state_checkpoint(TrainState& state, const std::filesystem::path& path) {
  for (auto& [name, tensor] : nets::load_checkpoint(path)) {
    if (name.starts_with("generator/")) {
      state.generator.set(std::string_view(name).substr(10), tensor);
    } else if (name.starts_with("critic/")) {
      state.critic.set(std::string_view(name).substr(7), tensor);
    } else {
      throw IoError("checkpoint: unexpected record '" + name + "' in " + path.string());
    }
  }
}

metrics::EvalReport evaluate_state(const TrainState& state, std::size_t n_samples) {
  const GanConfig& cfg = state.config;
  metrics::EvalReport rep;
  rep.step = static_cast<std::size_t>(state.generator_steps);
  rep.samples = n_samples;
  const Tensor latent = data::sample(cfg.latent, n_samples, cfg.seed, "eval.latent");
  const Tensor fake = generate(state, latent);
  const Tensor real = data::sample(state.mixture, n_samples, cfg.seed, "eval.real");
  const Tensor real_ref = data::sample(state.mixture, n_samples, cfg.seed, "eval.real.baseline");
  rep.w1_baseline = metrics::w1_exact_2d(real_ref, real);
  const metrics::HistogramStats hist = metrics::histogram_stats(state.critic);
  rep.extreme_bin_fraction = hist.extreme_bin_fraction;
  rep.excess_kurtosis = hist.excess_kurtosis;
  if (!fake.all_finite()) {
    rep.w1 = std::numeric_limits<double>::infinity();
    rep.is_analog_mean = rep.is_analog_std = kNaN;
    return rep;
  }
  rep.w1 = metrics::w1_exact_2d(fake, real);
  const metrics::Coverage cov = metrics::mode_coverage(fake, state.mixture);
  rep.modes_captured = cov.modes_captured;
  rep.high_quality_fraction = cov.high_quality_fraction;
  const metrics::ScoreSummary score = metrics::is_analog(fake, state.mixture, 10);
  rep.is_analog_mean = score.mean;
  rep.is_analog_std = score.std;
  return rep;
}

// ---- run -------------------------------------------------------------------

namespace {

std::string checkpoint_name(std::int64_t step) { return "ckpt_" + std::to_string(step) + ".bin"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

MetricsRecord make_record(const TrainState& state, const CriticStepResult& c, const GeneratorStepResult& gen) {
  MetricsRecord r;
  r.step = state.generator_steps;
  r.critic_steps = state.critic_steps;
  r.loss_d = c.loss;
  r.loss_g = gen.loss;
  r.d_real_mean = c.d_real_mean;
  r.d_fake_mean = c.d_fake_mean;
  r.reg_term = c.reg_term;
  r.critic_grad_norm = c.grad_norm;
  r.generator_grad_norm = gen.grad_norm;
  r.margin_residual = c.margin_residual;
  r.bound_q50 = c.bound_q50;
  r.bound_q90 = c.bound_q90;
  r.probe_real_change = c.probe_real_change;
  r.probe_fake_change = c.probe_fake_change;
  r.taylor_residual_real = c.taylor_residual_real;
  r.taylor_residual_fake = c.taylor_residual_fake;
  return r;
}

}  // namespace

RunResult run(const GanConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "config.snapshot", config::serialize(config));

  TrainState state(config);
  RunResult result;
  result.directory = out_dir;

  std::ofstream metrics_out(out_dir / "metrics.csv", std::ios::binary | std::ios::trunc);
  if (!metrics_out) throw IoError("cannot write " + (out_dir / "metrics.csv").string());
  metrics_out << metrics_header() << '\n';
  save_state_checkpoint(state, out_dir / checkpoint_name(0));
  std::int64_t last_checkpoint = 0;

  auto emit = [&](MetricsRecord r) {
    metrics_out << metrics_row(r) << '\n';
    result.max_gap = std::max(result.max_gap, r.gap());
    result.records.push_back(std::move(r));
  };

  for (std::int64_t step = 1; step <= config.steps; ++step) {
    const bool row_due = step % static_cast<std::int64_t>(config.metrics_every) == 0 || step == config.steps;
    CriticStepResult c;
    GeneratorStepResult gen;
    gen.loss = kNaN;
    gen.grad_norm = kNaN;
    try {
      for (std::size_t k = 0; k < config.n_critic; ++k) {
        c = critic_step(state, row_due && k + 1 == config.n_critic);
        MetricsRecord probe = make_record(state, c, gen);
        probe.loss_g = 0.0;
        if (std::isfinite(probe.gap())) result.max_gap = std::max(result.max_gap, probe.gap());
        if (explosion_detector(probe)) {
          result.exploded = true;
          result.explosion_reason = "critic step " + std::to_string(state.critic_steps) + " crossed a threshold";
          break;
        }
      }
      if (!result.exploded) {
        gen = generator_step(state);
        if (!std::isfinite(gen.loss)) {
          result.exploded = true;
          result.explosion_reason = "generator loss not finite";
        }
      }
    } catch (const NonFiniteError& e) {
      result.exploded = true;
      result.explosion_reason = e.what();
      if (std::string_view(e.where()) != "loss_g") c.loss = kNaN;
    }

    if (result.exploded) {
      MetricsRecord r = make_record(state, c, gen);
      r.step = step;
      r.exploded = true;
      emit(std::move(r));
      save_state_checkpoint(state, out_dir / checkpoint_name(step));
      last_checkpoint = step;
      break;
    }
    if (row_due) {
      MetricsRecord r = make_record(state, c, gen);
      const Tensor probe_fake = generate(state, state.probe_latent);
      if (probe_fake.all_finite()) {
        // Real probe, fake probe, and midpoints of the paired points.
        std::vector<double> mid(probe_fake.size());
        for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (state.probe_real[i] + probe_fake[i]);
        const Tensor probes[] = {state.probe_real, probe_fake, Tensor(probe_fake.shape(), std::move(mid))};
        const LipschitzEstimate lip = lipschitz_estimate(state.critic_spec, state.critic, probes);
        r.lipschitz_pairwise = lip.pairwise_ratio_max;
        r.lipschitz_grad = lip.grad_norm_max;
      } else {
        r.lipschitz_pairwise = r.lipschitz_grad = kNaN;
      }
      emit(std::move(r));
    }
    if (step % static_cast<std::int64_t>(config.checkpoint_every) == 0) {
      save_state_checkpoint(state, out_dir / checkpoint_name(step));
      last_checkpoint = step;
    }
  }
  metrics_out.flush();
  if (!metrics_out) throw IoError("write failed for " + (out_dir / "metrics.csv").string());

  if (!result.exploded && last_checkpoint != state.generator_steps) {
    save_state_checkpoint(state, out_dir / checkpoint_name(state.generator_steps));
  }
  result.generator_steps = state.generator_steps;
  result.critic_steps = state.critic_steps;

  const Tensor latent = data::sample(config.latent, config.eval_samples, config.seed, "eval.latent");
  const Tensor samples = generate(state, latent);
  std::ostringstream csv;
  csv << "x,y\n";
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    csv << format_double(samples.at(i, 0)) << ',' << format_double(samples.at(i, 1)) << '\n';
  }
  write_text(out_dir / "samples_final.csv", csv.str());

  if (!result.exploded) {
    metrics::EvalReport rep = evaluate_state(state, config.eval_samples);
    rep.checkpoint = checkpoint_name(state.generator_steps);
    write_text(out_dir / "eval.json", rep.to_json() + "\n");
    result.final_eval = rep;
  }
  return result;
}

// ---- names -----------------------------------------------------------------

std::string_view objective_name(Objective o) { return o == Objective::wasserstein ? "wasserstein" : "vanilla"; }

Objective objective_from_name(std::string_view name) {
  if (name == "wasserstein") return Objective::wasserstein;
  if (name == "vanilla") return Objective::vanilla;
  throw ConfigError("objective", "unknown objective '" + std::string(name) + "' (expected wasserstein or vanilla)");
}

std::string_view optimizer_name(OptimizerKind o) { return o == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind optimizer_from_name(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd") return OptimizerKind::sgd;
  throw ConfigError("optimizer", "unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

std::string_view critic_norm_name(CriticNorm c) {
  switch (c) {
    case CriticNorm::automatic: return "auto";
    case CriticNorm::on: return "true";
    case CriticNorm::off: return "false";
  }
  return "auto";
}

CriticNorm critic_norm_from_name(std::string_view name) {
  if (name == "auto") return CriticNorm::automatic;
  if (name == "true") return CriticNorm::on;
  if (name == "false") return CriticNorm::off;
  throw ConfigError("critic_batchnorm", "expected auto, true or false, got '" + std::string(name) + "'");
}

}  // namespace tvgan::train
