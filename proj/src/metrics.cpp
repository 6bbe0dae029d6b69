// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "tvgan/error.hpp"

namespace tvgan::metrics {

double w1_exact_1d(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("w1_exact_1d: length mismatch " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.empty()) return 0.0;
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
  return total / static_cast<double>(sa.size());
}

// Shortest augmenting path with row/column potentials (Kuhn-Munkres in the
// O(n^3) form). Rows are inserted one at a time; each insertion grows a
// Dijkstra-like tree over columns until a free column is reached.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw ShapeError("solve_assignment: cost matrix is not n x n");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  // Columns are 1-based below; column 0 is the virtual root.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, kNone), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t row = 0; row < n; ++row) {
    owner[0] = row;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      const double* crow = cost.data() + i0 * n;
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = crow[j - 1] - u[i0 + 1] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j] + 1] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != kNone);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[owner[j]] = j - 1;
  return assignment;
}

double w1_exact_2d(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != 2 || b.cols() != 2) {
    throw ShapeError("w1_exact_2d: expected (n x 2) point sets, got " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));
  }
  if (a.rows() != b.rows()) {
    throw ShapeError("w1_exact_2d: point counts differ (" + std::to_string(a.rows()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  const std::size_t n = a.rows();
  if (n > kMaxAssignmentSize) {
    throw Error("w1_exact_2d: " + std::to_string(n) + " points exceeds the exact solver cap of " +
                std::to_string(kMaxAssignmentSize) + "; subsample both sets first");
  }
  if (n == 0) return 0.0;
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = std::hypot(a.at(i, 0) - b.at(j, 0), a.at(i, 1) - b.at(j, 1));
    }
  }
  const std::vector<std::size_t> match = solve_assignment(cost, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + match[i]];
  return total / static_cast<double>(n);
}

namespace {

std::size_t nearest_center(double x, double y, const data::MixtureSpec& spec, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spec.centers.size(); ++k) {
    const double d = std::hypot(x - spec.centers[k][0], y - spec.centers[k][1]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  *dist = best_d;
  return best;
}

void require_points(const Tensor& samples, const char* op) {
  if (samples.rank() != 2 || samples.cols() != 2) {
    throw ShapeError(std::string(op) + ": expected (n x 2) samples, got " + shape_str(samples.shape()));
  }
}

}  // namespace

Coverage mode_coverage(const Tensor& samples, const data::MixtureSpec& spec, double radius_mult) {
  require_points(samples, "mode_coverage");
  spec.validate();
  const std::size_t n = samples.rows();
  const std::size_t k = spec.centers.size();
  const double radius = radius_mult * spec.sigma;
  std::vector<std::size_t> counts(k, 0);
  std::size_t good = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dist = 0.0;
    const std::size_t c = nearest_center(samples.at(i, 0), samples.at(i, 1), spec, &dist);
    if (dist <= radius) {
      ++counts[c];
      ++good;
    }
  }
  const std::size_t need = std::max<std::size_t>(1, n / (4 * k));
  Coverage out;
  out.modes_captured = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                              [need](std::size_t c) { return c >= need; }));
  out.high_quality_fraction = n ? static_cast<double>(good) / static_cast<double>(n) : 0.0;
  return out;
}

ScoreSummary is_analog(const Tensor& samples, const data::MixtureSpec& spec, std::size_t splits) {
  require_points(samples, "is_analog");
  spec.validate();
  const std::size_t n = samples.rows();
  if (splits == 0 || n == 0 || n % splits != 0) {
    throw Error("is_analog: " + std::to_string(n) + " samples do not divide into " + std::to_string(splits) +
                " splits");
  }
  const std::size_t k = spec.centers.size();
  const double inv_two_var = 1.0 / (2.0 * spec.sigma * spec.sigma);
  // Responsibilities in log space; the shared normalizer cancels.
  std::vector<double> resp(n * k);
  std::vector<double> logits(k);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = samples.at(i, 0), y = samples.at(i, 1);
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw NonFiniteError("is_analog", "is_analog: non-finite sample at row " + std::to_string(i));
    }
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double dx = x - spec.centers[c][0], dy = y - spec.centers[c][1];
      logits[c] = spec.weights[c] > 0.0 ? std::log(spec.weights[c]) - (dx * dx + dy * dy) * inv_two_var
                                        : -std::numeric_limits<double>::infinity();
      top = std::max(top, logits[c]);
    }
    if (!std::isfinite(top)) throw Error("is_analog: zero posterior mass for sample " + std::to_string(i));
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += std::exp(logits[c] - top);
    for (std::size_t c = 0; c < k; ++c) resp[i * k + c] = std::exp(logits[c] - top) / z;
  }

  const std::size_t per = n / splits;
  std::vector<double> scores(splits);
  for (std::size_t s = 0; s < splits; ++s) {
    std::vector<double> marginal(k, 0.0);
    for (std::size_t i = s * per; i < (s + 1) * per; ++i) {
      for (std::size_t c = 0; c < k; ++c) marginal[c] += resp[i * k + c];
    }
    for (double& m : marginal) m /= static_cast<double>(per);
    double kl_sum = 0.0;
    for (std::size_t i = s * per; i < (s + 1) * per; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        const double p = resp[i * k + c];
        if (p > 0.0) kl_sum += p * (std::log(p) - std::log(marginal[c]));
      }
    }
    scores[s] = std::exp(kl_sum / static_cast<double>(per));
  }
  ScoreSummary out;
  for (double v : scores) out.mean += v;
  out.mean /= static_cast<double>(splits);
  for (double v : scores) out.std += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(out.std / static_cast<double>(splits));
  return out;
}

HistogramStats histogram_stats(std::span<const double> values) {
  HistogramStats out;
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double band = 0.02 * (hi - lo);
  std::size_t extreme = 0;
  double mean = 0.0;
  for (double v : values) {
    if (v <= lo + band || v >= hi - band) ++extreme;
    mean += v;
  }
  const double n = static_cast<double>(values.size());
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double c = (v - mean) * (v - mean);
    m2 += c;
    m4 += c * c;
  }
  m2 /= n;
  m4 /= n;
  out.extreme_bin_fraction = static_cast<double>(extreme) / n;
  out.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  return out;
}

HistogramStats histogram_stats(const nets::ParamSet& params) {
  const std::vector<double> w = nets::pooled_weights(params);
  return histogram_stats(w);
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["checkpoint"] = checkpoint;
  j["step"] = step;
  j["samples"] = samples;
  j["w1"] = w1;
  j["w1_baseline"] = w1_baseline;
  j["modes_captured"] = modes_captured;
  j["high_quality_fraction"] = high_quality_fraction;
  j["is_analog_mean"] = is_analog_mean;
  j["is_analog_std"] = is_analog_std;
  j["extreme_bin_fraction"] = extreme_bin_fraction;
  j["excess_kurtosis"] = excess_kurtosis;
  return j.dump();
}

}  // namespace tvgan::metrics
