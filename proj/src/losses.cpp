// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/losses.hpp"

#include <cmath>
#include <string>

#include "tvgan/error.hpp"

namespace tvgan::losses {

void LossConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be a finite value >= 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "must be a finite value >= 0");
  if (!(clip > 0.0) || !std::isfinite(clip)) throw ConfigError("clip", "must be a finite value > 0");
}

namespace {

void require_scores(ad::Var v, std::string_view op) {
  const Tensor& t = v.value();
  if (t.rank() != 2 || t.cols() != 1) {
    throw ShapeError(std::string(op) + ": scores must have shape (batch x 1), got " + shape_str(t.shape()));
  }
  if (!t.all_finite()) throw NonFiniteError(std::string(op), std::string(op) + ": non-finite score");
}

void require_paired(ad::Var a, ad::Var b, std::string_view op) {
  require_scores(a, op);
  require_scores(b, op);
  if (a.value().rows() != b.value().rows()) {
    throw ShapeError(std::string(op) + ": batch mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

}  // namespace

LossPair vanilla_losses(ad::Var d_real, ad::Var d_fake_for_d, ad::Var d_fake_for_g) {
  require_scores(d_real, "vanilla_losses");
  require_scores(d_fake_for_d, "vanilla_losses");
  require_scores(d_fake_for_g, "vanilla_losses");
  ad::Var critic = ad::add(ad::mean(ad::softplus(ad::scalar_mul(d_real, -1.0))), ad::mean(ad::softplus(d_fake_for_d)));
  ad::Var generator = ad::mean(ad::softplus(ad::scalar_mul(d_fake_for_g, -1.0)));
  return {critic, generator};
}

ad::Var wgan_critic_core(ad::Var d_real, ad::Var d_fake) {
  require_paired(d_real, d_fake, "wgan_critic_core");
  return ad::sub(ad::mean(d_fake), ad::mean(d_real));
}

ad::Var wgan_generator_loss(ad::Var d_fake) {
  require_scores(d_fake, "wgan_generator_loss");
  return ad::scalar_mul(ad::mean(d_fake), -1.0);
}

ad::Var gradient_penalty_at(const CriticFn& critic, const Tensor& points, ad::Graph& graph) {
  ad::Var x = graph.leaf(points, true);
  ad::Var scores = critic(x);
  ad::Var grad = graph.grad_wrt_input(ad::sum(scores), x);
  ad::Var norms = ad::l2_norm_rows(grad);
  return ad::mean(ad::square(ad::scale_shift(norms, 1.0, -1.0)));
}

ad::Var gp_term(const CriticFn& critic, const Tensor& x_real, const Tensor& x_fake, ad::Graph& graph, Rng& rng) {
  if (x_real.shape() != x_fake.shape() || x_real.rank() != 2) {
    throw ShapeError("gp_term: batch mismatch " + shape_str(x_real.shape()) + " vs " + shape_str(x_fake.shape()));
  }
  const std::size_t n = x_real.rows(), d = x_real.cols();
  std::vector<double> mixed(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = rng.uniform();
    for (std::size_t j = 0; j < d; ++j) {
      mixed[i * d + j] = e * x_real[i * d + j] + (1.0 - e) * x_fake[i * d + j];
    }
  }
  return gradient_penalty_at(critic, Tensor({n, d}, std::move(mixed)), graph);
}

ad::Var tv_term(ad::Var d_real, ad::Var d_fake, double delta, TvPairing pairing) {
  require_paired(d_real, d_fake, "tv_term");
  if (pairing == TvPairing::batch_mean) {
    return ad::abs(ad::scale_shift(ad::sub(ad::mean(d_real), ad::mean(d_fake)), 1.0, -delta));
  }
  return ad::mean(ad::abs(ad::scale_shift(ad::sub(d_real, d_fake), 1.0, -delta)));
}

LossPair tv_losses(ad::Var d_real, ad::Var d_fake, double lambda, double delta, TvPairing pairing) {
  ad::Var core = wgan_critic_core(d_real, d_fake);
  ad::Var critic = core;
  if (lambda != 0.0) critic = ad::add(core, ad::scalar_mul(tv_term(d_real, d_fake, delta, pairing), lambda));
  return {critic, wgan_generator_loss(d_fake)};
}

std::string_view regularizer_name(Regularizer r) {
  switch (r) {
    case Regularizer::none: return "none";
    case Regularizer::clip: return "clip";
    case Regularizer::gp: return "gp";
    case Regularizer::tv: return "tv";
  }
  return "none";
}

Regularizer regularizer_from_name(std::string_view name) {
  if (name == "none") return Regularizer::none;
  if (name == "clip") return Regularizer::clip;
  if (name == "gp") return Regularizer::gp;
  if (name == "tv") return Regularizer::tv;
  throw ConfigError("regularizer", "unknown regularizer '" + std::string(name) + "' (expected none, clip, gp or tv)");
}

std::string_view pairing_name(TvPairing p) { return p == TvPairing::per_sample ? "per_sample" : "batch_mean"; }

TvPairing pairing_from_name(std::string_view name) {
  if (name == "per_sample") return TvPairing::per_sample;
  if (name == "batch_mean") return TvPairing::batch_mean;
  throw ConfigError("tv_pairing", "unknown pairing '" + std::string(name) + "' (expected per_sample or batch_mean)");
}

}  // namespace tvgan::losses
