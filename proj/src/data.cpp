// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/data.hpp"

#include <cmath>
#include <numbers>

#include "tvgan/error.hpp"

namespace tvgan::data {

void MixtureSpec::validate() const {
  if (centers.empty()) throw ConfigError("dataset.centers", "mixture needs at least one center");
  if (weights.size() != centers.size()) {
    throw ConfigError("dataset.weights", "expected " + std::to_string(centers.size()) + " weights, got " +
                                             std::to_string(weights.size()));
  }
  if (!(sigma > 0.0)) throw ConfigError("dataset.sigma", "must be positive");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("dataset.weights", "weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("dataset.weights", "weights must sum to 1");
}

void LatentSpec::validate() const {
  if (dim == 0) throw ConfigError("latent_dim", "must be positive");
}

MixtureSpec ring8() {
  MixtureSpec spec{"ring8", {}, 0.02, std::vector<double>(8, 1.0 / 8.0)};
  for (int k = 0; k < 8; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / 8.0;
    // Snap the axis-aligned centers so (2, 0), (0, 2), ... are exact.
    auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
    spec.centers.push_back({snap(2.0 * std::cos(angle)), snap(2.0 * std::sin(angle))});
  }
  return spec;
}

MixtureSpec grid25() {
  MixtureSpec spec{"grid25", {}, 0.05, std::vector<double>(25, 1.0 / 25.0)};
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) spec.centers.push_back({double(i), double(j)});
  }
  return spec;
}

MixtureSpec mixture_by_name(std::string_view name) {
  if (name == "ring8") return ring8();
  if (name == "grid25") return grid25();
  throw ConfigError("dataset", "unknown dataset '" + std::string(name) + "' (expected ring8 or grid25)");
}

namespace {

std::size_t pick_component(const MixtureSpec& spec, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < spec.weights.size(); ++k) {
    acc += spec.weights[k];
    if (u < acc) return k;
  }
  return spec.weights.size() - 1;
}

}  // namespace

std::vector<std::size_t> sample_components(const MixtureSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  std::vector<std::size_t> out(n);
  for (auto& k : out) {
    k = pick_component(spec, rng);
    rng.normal();
    rng.normal();
  }
  return out;
}

Tensor sample(const MixtureSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n == 0) throw Error("sample: n must be at least 1");
  std::vector<double> out(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& c = spec.centers[pick_component(spec, rng)];
    out[2 * i] = c[0] + spec.sigma * rng.normal();
    out[2 * i + 1] = c[1] + spec.sigma * rng.normal();
  }
  return Tensor({n, 2}, std::move(out));
}

Tensor sample(const LatentSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n == 0) throw Error("sample: n must be at least 1");
  std::vector<double> out(n * spec.dim);
  for (double& v : out) {
    v = spec.kind == LatentKind::standard_normal ? rng.normal() : rng.uniform(-1.0, 1.0);
  }
  return Tensor({n, spec.dim}, std::move(out));
}

Tensor sample(const MixtureSpec& spec, std::size_t n, std::uint64_t seed, std::string_view tag) {
  Rng rng(seed, tag);
  return sample(spec, n, rng);
}

Tensor sample(const LatentSpec& spec, std::size_t n, std::uint64_t seed, std::string_view tag) {
  Rng rng(seed, tag);
  return sample(spec, n, rng);
}

std::string_view latent_kind_name(LatentKind kind) {
  return kind == LatentKind::standard_normal ? "standard_normal" : "uniform";
}

LatentKind latent_kind_from_name(std::string_view name) {
  if (name == "standard_normal") return LatentKind::standard_normal;
  if (name == "uniform") return LatentKind::uniform;
  throw ConfigError("latent_kind", "unknown latent kind '" + std::string(name) + "'");
}

}  // namespace tvgan::data
