// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/optim.hpp"

#include <algorithm>
#include <cmath>

#include "tvgan/error.hpp"

namespace tvgan::optim {

namespace {

void check_grads(const nets::ParamSet& params, const nets::NamedGrads& grads) {
  for (const auto& [name, g] : grads) {
    if (!params.contains(name)) throw Error("optimizer: gradient for unknown parameter '" + name + "'");
    if (g.shape() != params.get(name).shape()) {
      throw ShapeError("optimizer: gradient for '" + name + "' has shape " + shape_str(g.shape()) +
                       ", parameter has " + shape_str(params.get(name).shape()));
    }
    if (!g.all_finite()) throw NonFiniteError(name, "non-finite gradient for parameter '" + name + "'");
  }
}

}  // namespace

void adam_step(AdamState& state, nets::ParamSet& params, const nets::NamedGrads& grads) {
  check_grads(params, grads);
  const AdamHyper& h = state.hyper;
  state.t += 1;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
  for (const auto& [name, g] : grads) {
    const Tensor& theta = params.get(name);
    const std::size_t n = theta.size();
    auto m_it = state.m.find(name);
    if (m_it == state.m.end()) {
      m_it = state.m.emplace(name, Tensor::zeros(theta.shape())).first;
      state.v.emplace(name, Tensor::zeros(theta.shape()));
    }
    const Tensor& m_old = m_it->second;
    const Tensor& v_old = state.v.at(name);
    std::vector<double> m(n), v(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = h.beta1 * m_old[i] + (1.0 - h.beta1) * g[i];
      v[i] = h.beta2 * v_old[i] + (1.0 - h.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      out[i] = theta[i] - h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
    }
    m_it->second = Tensor(theta.shape(), std::move(m));
    state.v.at(name) = Tensor(theta.shape(), std::move(v));
    params.set(name, Tensor(theta.shape(), std::move(out)));
  }
}

void sgd_step(nets::ParamSet& params, const nets::NamedGrads& grads, double lr) {
  check_grads(params, grads);
  for (const auto& [name, g] : grads) {
    const Tensor& theta = params.get(name);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta[i] - lr * g[i];
    params.set(name, Tensor(theta.shape(), std::move(out)));
  }
}

void clip_weights(nets::ParamSet& params, double c) {
  if (!(c > 0.0)) throw Error("clip_weights: bound must be positive");
  std::vector<std::pair<std::string, Tensor>> updates;
  for (const nets::Param& p : params.entries()) {
    if (!p.trainable) continue;
    std::vector<double> out(p.value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(p.value[i], -c, c);
    updates.emplace_back(p.name, Tensor(p.value.shape(), std::move(out)));
  }
  for (auto& [name, t] : updates) params.set(name, std::move(t));
}

double global_norm(const nets::NamedGrads& grads) {
  double s = 0.0;
  for (const auto& [name, g] : grads) {
    for (double v : g.data()) s += v * v;
  }
  return std::sqrt(s);
}

}  // namespace tvgan::optim
