// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Update rules. All of them descend the loss: theta <- theta - step.

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "tvgan/nets.hpp"

namespace tvgan::optim {

struct AdamHyper {
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::int64_t t = 0;
  std::map<std::string, Tensor, std::less<>> m;
  std::map<std::string, Tensor, std::less<>> v;

  AdamState() = default;
  explicit AdamState(AdamHyper h) : hyper(h) {}
};

// Bias-corrected Adam. Parameters missing from `grads` are left untouched.
// Throws NonFiniteError naming the parameter when a gradient is not finite;
// nothing is modified in that case.
void adam_step(AdamState& state, nets::ParamSet& params, const nets::NamedGrads& grads);

void sgd_step(nets::ParamSet& params, const nets::NamedGrads& grads, double lr);

// Clamps every trainable entry (weights, biases, normalization scale/shift)
// into [-c, c].
void clip_weights(nets::ParamSet& params, double c);

// Global L2 norm over all gradients.
double global_norm(const nets::NamedGrads& grads);

}  // namespace tvgan::optim
