// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvgan/data.hpp"
#include "tvgan/nets.hpp"
#include "tvgan/tensor.hpp"

namespace tvgan::metrics {

// Largest point set accepted by w1_exact_2d.
inline constexpr std::size_t kMaxAssignmentSize = 2048;

// Exact W1 between equal-weight empirical measures on the line.
double w1_exact_1d(std::span<const double> a, std::span<const double> b);

// Exact W1 between two equal-size planar point sets (n x 2): the minimum mean
// Euclidean cost over perfect matchings.
double w1_exact_2d(const Tensor& a, const Tensor& b);

// Minimum-cost perfect matching of a dense n x n row-major cost matrix.
// Returns, for each row, the assigned column.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

struct Coverage {
  std::size_t modes_captured = 0;
  double high_quality_fraction = 0.0;
};

Coverage mode_coverage(const Tensor& samples, const data::MixtureSpec& spec, double radius_mult = 3.0);

struct ScoreSummary {
  double mean = 0.0;
  double std = 0.0;
};

// exp(E_x KL(p(y|x) || p(y))) with the mixture responsibilities as p(y|x),
// computed per split; mean and population std over splits.
ScoreSummary is_analog(const Tensor& samples, const data::MixtureSpec& spec, std::size_t splits = 10);

struct HistogramStats {
  double extreme_bin_fraction = 0.0;
  double excess_kurtosis = 0.0;
};

// Over pooled weight-matrix entries: the fraction lying within 2% of the
// observed range from the minimum or the maximum, and the excess kurtosis.
HistogramStats histogram_stats(const nets::ParamSet& params);
HistogramStats histogram_stats(std::span<const double> values);

struct EvalReport {
  std::string checkpoint;
  std::size_t step = 0;
  std::size_t samples = 0;
  double w1 = 0.0;
  double w1_baseline = 0.0;
  std::size_t modes_captured = 0;
  double high_quality_fraction = 0.0;
  double is_analog_mean = 0.0;
  double is_analog_std = 0.0;
  double extreme_bin_fraction = 0.0;
  double excess_kurtosis = 0.0;

  std::string to_json() const;
};

}  // namespace tvgan::metrics
