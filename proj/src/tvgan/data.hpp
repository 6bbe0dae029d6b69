// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tvgan/rng.hpp"
#include "tvgan/tensor.hpp"

namespace tvgan::data {

using Point = std::array<double, 2>;

// Equal-variance isotropic Gaussian mixture in the plane.
struct MixtureSpec {
  std::string name;
  std::vector<Point> centers;
  double sigma = 0.0;
  std::vector<double> weights;

  void validate() const;
};

enum class LatentKind { standard_normal, uniform };

struct LatentSpec {
  std::size_t dim = 8;
  LatentKind kind = LatentKind::standard_normal;

  void validate() const;
};

// Eight equal-weight modes on the circle of radius 2, sigma 0.02.
MixtureSpec ring8();
// 5x5 grid of equal-weight modes over [-2, 2]^2, sigma 0.05.
MixtureSpec grid25();
// Lookup by name ("ring8", "grid25").
MixtureSpec mixture_by_name(std::string_view name);

Tensor sample(const MixtureSpec& spec, std::size_t n, Rng& rng);
Tensor sample(const LatentSpec& spec, std::size_t n, Rng& rng);

// Pure form: draws from the stream (seed, tag).
Tensor sample(const MixtureSpec& spec, std::size_t n, std::uint64_t seed, std::string_view tag = "data");
Tensor sample(const LatentSpec& spec, std::size_t n, std::uint64_t seed, std::string_view tag = "latent");

// Component index of each draw, in the order sample() would produce them.
std::vector<std::size_t> sample_components(const MixtureSpec& spec, std::size_t n, Rng& rng);

std::string_view latent_kind_name(LatentKind kind);
LatentKind latent_kind_from_name(std::string_view name);

}  // namespace tvgan::data
