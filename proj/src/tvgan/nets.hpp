// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvgan/autodiff.hpp"
#include "tvgan/tensor.hpp"

namespace tvgan::nets {

enum class Activation { relu, leaky_relu, tanh, sigmoid, none };

inline constexpr double kLeakySlope = 0.2;
inline constexpr double kBatchnormEps = 1e-5;
inline constexpr double kBatchnormMomentum = 0.9;

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::none;
  bool normalize = false;  // batchnorm between the affine map and the activation
};

enum class NetKind { generator, critic };

struct MlpSpec {
  std::vector<LayerSpec> layers;
  NetKind kind = NetKind::generator;

  void validate() const;
  std::size_t in_dim() const { return layers.front().in_dim; }
  std::size_t out_dim() const { return layers.back().out_dim; }
  bool normalizes() const;
};

// latent -> hidden_layers x (width, relu) -> out_dim (linear)
MlpSpec make_generator(std::size_t latent_dim, std::size_t width, std::size_t hidden_layers,
                       std::size_t out_dim, bool normalize);
// in_dim -> hidden_layers x (width, leaky_relu 0.2) -> 1 (linear score)
MlpSpec make_critic(std::size_t in_dim, std::size_t width, std::size_t hidden_layers, bool normalize);

struct Param {
  std::string name;
  Tensor value;
  bool trainable = true;
};

// Ordered named tensors of one network. Layer k owns "lk.weight", "lk.bias"
// and, when normalized, "lk.bn_scale", "lk.bn_shift" plus the non-trainable
// running statistics "lk.bn_mean", "lk.bn_var".
class ParamSet {
 public:
  void add(std::string name, Tensor value, bool trainable = true);
  bool contains(std::string_view name) const;
  const Tensor& get(std::string_view name) const;
  void set(std::string_view name, Tensor value);
  std::span<const Param> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t index_of(std::string_view name) const;

  // Bitwise comparison of names, flags and contents.
  bool identical(const ParamSet& other) const;

 private:
  std::vector<Param> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using NamedGrads = std::map<std::string, Tensor, std::less<>>;

bool is_weight_name(std::string_view name);

// He-uniform weights for relu-family layers, Xavier-uniform otherwise,
// zero biases, unit batchnorm scale. Deterministic in seed.
ParamSet build(const MlpSpec& spec, std::uint64_t seed);
double init_bound(const LayerSpec& layer);

enum class Mode { train, eval };

// Graph leaves for every parameter, aligned with ParamSet::entries().
struct BoundParams {
  std::vector<ad::Var> vars;
};

BoundParams bind(ad::Graph& graph, const ParamSet& params, bool requires_grad);

// Records the network on input's graph. Train mode normalizes with batch
// statistics and, when `stats` is non-null, folds them into the running
// statistics stored there (momentum 0.9). Eval mode uses running statistics
// and never mutates anything.
ad::Var forward(const MlpSpec& spec, const ParamSet& params, const BoundParams& bound, ad::Var input,
                Mode mode, ParamSet* stats = nullptr);

// Convenience: eval-mode forward on a fresh graph, returning the values.
Tensor evaluate(const MlpSpec& spec, const ParamSet& params, const Tensor& input);

// Trainable-parameter gradients by name.
NamedGrads collect_grads(const ad::GradientMap& grads, const ParamSet& params, const BoundParams& bound);

// All weight-matrix entries (biases and normalization parameters excluded).
std::vector<double> pooled_weights(const ParamSet& params);

// Counts of weight-matrix entries over `bins` equal bins spanning [lo, hi];
// values outside the range land in the end bins.
std::vector<std::size_t> weight_histogram(const ParamSet& params, std::size_t bins, double lo, double hi);

std::string_view activation_name(Activation a);

}  // namespace tvgan::nets
