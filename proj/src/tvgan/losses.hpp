// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string_view>

#include "tvgan/autodiff.hpp"
#include "tvgan/rng.hpp"

namespace tvgan::losses {

enum class Regularizer { none, clip, gp, tv };

// How the TV-margin term pairs real and fake scores: per minibatch row inside
// the absolute value (default), or the absolute value of the mean gap.
enum class TvPairing { per_sample, batch_mean };

struct LossConfig {
  Regularizer regularizer = Regularizer::tv;
  double lambda = 1.0;
  double delta = 0.0;
  double clip = 0.01;
  TvPairing pairing = TvPairing::per_sample;

  void validate() const;
};

struct LossPair {
  ad::Var critic;
  ad::Var generator;
};

// Non-saturating GAN losses on pre-sigmoid logits:
//   L_D = mean softplus(-real) + mean softplus(fake_for_d)
//   L_G = mean softplus(-fake_for_g)
LossPair vanilla_losses(ad::Var d_real, ad::Var d_fake_for_d, ad::Var d_fake_for_g);

// -mean(d_real) + mean(d_fake): the negated Kantorovich dual objective.
ad::Var wgan_critic_core(ad::Var d_real, ad::Var d_fake);

// -mean(d_fake)
ad::Var wgan_generator_loss(ad::Var d_fake);

using CriticFn = std::function<ad::Var(ad::Var)>;

// mean over rows of (||grad_x critic(x_hat)||_2 - 1)^2 at x_hat = e*x_real +
// (1-e)*x_fake, one e ~ U(0,1) per row. Differentiable with respect to the
// critic parameters captured by `critic`. Unscaled (no lambda).
ad::Var gp_term(const CriticFn& critic, const Tensor& x_real, const Tensor& x_fake, ad::Graph& graph, Rng& rng);

// Gradient-norm penalty at given points (no interpolation).
ad::Var gradient_penalty_at(const CriticFn& critic, const Tensor& points, ad::Graph& graph);

// mean_i |d_real[i] - d_fake[i] - delta| (per_sample) or
// |mean d_real - mean d_fake - delta| (batch_mean).
ad::Var tv_term(ad::Var d_real, ad::Var d_fake, double delta, TvPairing pairing = TvPairing::per_sample);

// L_D = core + lambda * tv_term, L_G = -mean d_fake. With lambda == 0 the
// critic loss is exactly the core.
LossPair tv_losses(ad::Var d_real, ad::Var d_fake, double lambda, double delta,
                   TvPairing pairing = TvPairing::per_sample);

std::string_view regularizer_name(Regularizer r);
Regularizer regularizer_from_name(std::string_view name);
std::string_view pairing_name(TvPairing p);
TvPairing pairing_from_name(std::string_view name);

}  // namespace tvgan::losses
