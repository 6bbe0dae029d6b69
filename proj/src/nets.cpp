// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/nets.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "tvgan/error.hpp"
#include "tvgan/rng.hpp"

namespace tvgan::nets {

void MlpSpec::validate() const {
  if (layers.empty()) throw ConfigError("network.layers", "at least one layer is required");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    if (l.in_dim == 0 || l.out_dim == 0) {
      throw ConfigError("network.layers[" + std::to_string(i) + "]", "dimensions must be positive");
    }
    if (i > 0 && layers[i - 1].out_dim != l.in_dim) {
      throw ConfigError("network.layers[" + std::to_string(i) + "]",
                        "in_dim " + std::to_string(l.in_dim) + " does not chain from " +
                            std::to_string(layers[i - 1].out_dim));
    }
  }
  if (kind == NetKind::critic) {
    const LayerSpec& last = layers.back();
    if (last.out_dim != 1 || last.activation != Activation::none || last.normalize) {
      throw ConfigError("network.layers", "a critic must end in an unnormalized linear layer with one output");
    }
  }
}

bool MlpSpec::normalizes() const {
  return std::any_of(layers.begin(), layers.end(), [](const LayerSpec& l) { return l.normalize; });
}

MlpSpec make_generator(std::size_t latent_dim, std::size_t width, std::size_t hidden_layers,
                       std::size_t out_dim, bool normalize) {
  MlpSpec spec;
  spec.kind = NetKind::generator;
  std::size_t in = latent_dim;
  for (std::size_t i = 0; i < hidden_layers; ++i) {
    spec.layers.push_back({in, width, Activation::relu, normalize});
    in = width;
  }
  spec.layers.push_back({in, out_dim, Activation::none, false});
  spec.validate();
  return spec;
}

MlpSpec make_critic(std::size_t in_dim, std::size_t width, std::size_t hidden_layers, bool normalize) {
  MlpSpec spec;
  spec.kind = NetKind::critic;
  std::size_t in = in_dim;
  for (std::size_t i = 0; i < hidden_layers; ++i) {
    spec.layers.push_back({in, width, Activation::leaky_relu, normalize});
    in = width;
  }
  spec.layers.push_back({in, 1, Activation::none, false});
  spec.validate();
  return spec;
}

void ParamSet::add(std::string name, Tensor value, bool trainable) {
  if (index_.contains(name)) throw Error("param set: duplicate name '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(value), trainable});
}

bool ParamSet::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t ParamSet::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("param set: no parameter '" + std::string(name) + "'");
  return it->second;
}

const Tensor& ParamSet::get(std::string_view name) const { return entries_[index_of(name)].value; }

void ParamSet::set(std::string_view name, Tensor value) {
  Param& p = entries_[index_of(name)];
  if (p.value.shape() != value.shape()) {
    throw ShapeError("param set: '" + p.name + "' has shape " + shape_str(p.value.shape()) + ", got " +
                     shape_str(value.shape()));
  }
  p.value = std::move(value);
}

bool ParamSet::identical(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Param& a = entries_[i];
    const Param& b = other.entries_[i];
    if (a.name != b.name || a.trainable != b.trainable || !a.value.identical(b.value)) return false;
  }
  return true;
}

bool is_weight_name(std::string_view name) { return name.ends_with(".weight"); }

double init_bound(const LayerSpec& layer) {
  const double fan_in = static_cast<double>(layer.in_dim);
  const double fan_out = static_cast<double>(layer.out_dim);
  switch (layer.activation) {
    case Activation::relu:
    case Activation::leaky_relu:
      return std::sqrt(6.0 / fan_in);
    default:
      return std::sqrt(6.0 / (fan_in + fan_out));
  }
}

ParamSet build(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed, "init");
  ParamSet params;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string prefix = "l" + std::to_string(i) + ".";
    const double bound = init_bound(l);
    std::vector<double> w(l.in_dim * l.out_dim);
    for (double& v : w) v = rng.uniform(-bound, bound);
    params.add(prefix + "weight", Tensor({l.in_dim, l.out_dim}, std::move(w)));
    params.add(prefix + "bias", Tensor::zeros({1, l.out_dim}));
    if (l.normalize) {
      params.add(prefix + "bn_scale", Tensor::filled({1, l.out_dim}, 1.0));
      params.add(prefix + "bn_shift", Tensor::zeros({1, l.out_dim}));
      params.add(prefix + "bn_mean", Tensor::zeros({1, l.out_dim}), false);
      params.add(prefix + "bn_var", Tensor::filled({1, l.out_dim}, 1.0), false);
    }
  }
  return params;
}

BoundParams bind(ad::Graph& graph, const ParamSet& params, bool requires_grad) {
  BoundParams bound;
  bound.vars.reserve(params.size());
  for (const Param& p : params.entries()) {
    bound.vars.push_back(graph.leaf(p.value, requires_grad && p.trainable));
  }
  return bound;
}

namespace {

ad::Var activate(ad::Var x, Activation a) {
  switch (a) {
    case Activation::relu: return ad::relu(x);
    case Activation::leaky_relu: return ad::leaky_relu(x, kLeakySlope);
    case Activation::tanh: return ad::tanh(x);
    case Activation::sigmoid: return ad::sigmoid(x);
    case Activation::none: return x;
  }
  return x;
}

// Column means and population variances of a rank-2 tensor.
std::pair<std::vector<double>, std::vector<double>> column_stats(const Tensor& x) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[i * d + j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x[i * d + j] - mean[j];
      var[j] += c * c;
    }
  }
  for (double& v : var) v /= static_cast<double>(n);
  return {mean, var};
}

}  // namespace

ad::Var forward(const MlpSpec& spec, const ParamSet& params, const BoundParams& bound, ad::Var input,
                Mode mode, ParamSet* stats) {
  const Tensor& in = input.value();
  if (in.rank() != 2 || in.cols() != spec.in_dim()) {
    throw ShapeError("forward: input " + shape_str(in.shape()) + " does not match network input width " +
                     std::to_string(spec.in_dim()));
  }
  if (bound.vars.size() != params.size()) throw Error("forward: parameters are not bound to this graph");
  if (mode == Mode::train && spec.normalizes() && in.rows() < 2) {
    throw ShapeError("forward: batchnorm in train mode needs a batch of at least 2, got 1");
  }
  ad::Graph& graph = *input.graph;
  auto var_of = [&](const std::string& name) { return bound.vars[params.index_of(name)]; };

  ad::Var h = input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string prefix = "l" + std::to_string(i) + ".";
    h = ad::affine(h, var_of(prefix + "weight"), var_of(prefix + "bias"));
    if (l.normalize) {
      const std::size_t n = h.value().rows();
      if (mode == Mode::train) {
        if (stats != nullptr) {
          auto [mean, var] = column_stats(h.value());
          const Tensor& rm = stats->get(prefix + "bn_mean");
          const Tensor& rv = stats->get(prefix + "bn_var");
          std::vector<double> new_mean(l.out_dim), new_var(l.out_dim);
          for (std::size_t j = 0; j < l.out_dim; ++j) {
            new_mean[j] = kBatchnormMomentum * rm[j] + (1.0 - kBatchnormMomentum) * mean[j];
            new_var[j] = kBatchnormMomentum * rv[j] + (1.0 - kBatchnormMomentum) * var[j];
          }
          stats->set(prefix + "bn_mean", Tensor({1, l.out_dim}, std::move(new_mean)));
          stats->set(prefix + "bn_var", Tensor({1, l.out_dim}, std::move(new_var)));
        }
        h = ad::batchnorm(h, var_of(prefix + "bn_scale"), var_of(prefix + "bn_shift"), kBatchnormEps);
      } else {
        const Tensor& rm = params.get(prefix + "bn_mean");
        const Tensor& rv = params.get(prefix + "bn_var");
        std::vector<double> inv_sd(l.out_dim), neg_mean(l.out_dim);
        for (std::size_t j = 0; j < l.out_dim; ++j) {
          inv_sd[j] = 1.0 / std::sqrt(rv[j] + kBatchnormEps);
          neg_mean[j] = -rm[j];
        }
        ad::Var centered =
            ad::add(h, ad::broadcast_rows(graph.constant(Tensor({1, l.out_dim}, std::move(neg_mean))), n));
        ad::Var xhat =
            ad::mul(centered, ad::broadcast_rows(graph.constant(Tensor({1, l.out_dim}, std::move(inv_sd))), n));
        h = ad::add(ad::mul(xhat, ad::broadcast_rows(var_of(prefix + "bn_scale"), n)),
                    ad::broadcast_rows(var_of(prefix + "bn_shift"), n));
      }
    }
    h = activate(h, l.activation);
  }
  return h;
}

Tensor evaluate(const MlpSpec& spec, const ParamSet& params, const Tensor& input) {
  ad::Graph graph;
  BoundParams bound = bind(graph, params, false);
  return forward(spec, params, bound, graph.constant(input), Mode::eval).value();
}

NamedGrads collect_grads(const ad::GradientMap& grads, const ParamSet& params, const BoundParams& bound) {
  NamedGrads out;
  const auto entries = params.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].trainable) continue;
    auto it = grads.find(bound.vars[i].id);
    if (it != grads.end()) out.emplace(entries[i].name, it->second);
  }
  return out;
}

std::vector<double> pooled_weights(const ParamSet& params) {
  std::vector<double> out;
  for (const Param& p : params.entries()) {
    if (is_weight_name(p.name)) out.insert(out.end(), p.value.data().begin(), p.value.data().end());
  }
  return out;
}

std::vector<std::size_t> weight_histogram(const ParamSet& params, std::size_t bins, double lo, double hi) {
  if (bins < 2) throw Error("weight_histogram: need at least 2 bins");
  if (!(hi > lo)) throw Error("weight_histogram: empty range");
  std::vector<std::size_t> counts(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double v : pooled_weights(params)) {
    const double pos = std::floor((v - lo) * scale);
    const double clamped = std::clamp(pos, 0.0, static_cast<double>(bins - 1));
    ++counts[static_cast<std::size_t>(clamped)];
  }
  return counts;
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::none: return "none";
  }
  return "none";
}

}  // namespace tvgan::nets
