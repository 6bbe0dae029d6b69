// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Finite-difference oracles shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tvgan/autodiff.hpp"
#include "tvgan/nets.hpp"
#include "tvgan/rng.hpp"

namespace tvgan::testing {

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor(std::move(shape), std::move(v));
}

// |a - f| / max(|a|, |f|, floor): relative error, with magnitudes below
// `floor` compared on an absolute scale.
inline double rel_err(double a, double f, double floor = 1e-3) {
  return std::abs(a - f) / std::max({std::abs(a), std::abs(f), floor});
}

// A scalar function of a list of leaf tensors, rebuilt from scratch on a
// fresh graph for every evaluation.
using ScalarFn = std::function<ad::Var(ad::Graph&, const std::vector<ad::Var>&)>;

struct FdReport {
  double max_rel_err = 0.0;      // over coordinates away from kinks
  double max_rel_err_near = 0.0; // over coordinates within 1e-3 of a kink
  std::size_t checked = 0;
  std::size_t skipped = 0;       // a perturbation crossed a kink
  std::string worst;
};

namespace detail {

// Inputs of every relu, leaky_relu and abs node, flattened.
inline std::vector<double> kink_inputs(const ad::Graph& g) {
  std::vector<double> out;
  for (std::size_t id = 0; id < g.size(); ++id) {
    const ad::OpKind k = g.kind(id);
    if (k != ad::OpKind::relu && k != ad::OpKind::leaky_relu && k != ad::OpKind::abs) continue;
    const Tensor& in = g.value(g.inputs(id)[0]);
    out.insert(out.end(), in.data().begin(), in.data().end());
  }
  return out;
}

inline bool same_signs(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] > 0.0) != (b[i] > 0.0) || (a[i] < 0.0) != (b[i] < 0.0)) return false;
  }
  return true;
}

}  // namespace detail

// Analytic gradient of fn with respect to every leaf against central
// differences with step h * max(1, |x|).
inline FdReport check_gradients(const ScalarFn& fn, const std::vector<Tensor>& leaves, double h = 1e-5) {
  FdReport rep;
  std::vector<double> base_kinks;
  std::vector<Tensor> analytic;
  {
    ad::Graph g;
    std::vector<ad::Var> vars;
    for (const Tensor& t : leaves) vars.push_back(g.leaf(t, true));
    ad::Var out = fn(g, vars);
    base_kinks = detail::kink_inputs(g);
    const ad::GradientMap grads = g.backward(out);
    for (ad::Var v : vars) analytic.push_back(grads.at(v.id));
  }
  double near = std::numeric_limits<double>::infinity();
  for (double v : base_kinks) near = std::min(near, std::abs(v));
  const bool near_kink = near < 1e-3;

  auto eval = [&](const std::vector<Tensor>& ls, std::vector<double>* kinks) {
    ad::Graph g;
    std::vector<ad::Var> vars;
    for (const Tensor& t : ls) vars.push_back(g.leaf(t, true));
    const double value = fn(g, vars).value().item();
    if (kinks != nullptr) *kinks = detail::kink_inputs(g);
    return value;
  };

  for (std::size_t li = 0; li < leaves.size(); ++li) {
    for (std::size_t k = 0; k < leaves[li].size(); ++k) {
      const double x = leaves[li][k];
      const double step = h * std::max(1.0, std::abs(x));
      std::vector<Tensor> plus = leaves, minus = leaves;
      std::vector<double> v = leaves[li].to_vector();
      v[k] = x + step;
      plus[li] = Tensor(leaves[li].shape(), v);
      v[k] = x - step;
      minus[li] = Tensor(leaves[li].shape(), v);
      std::vector<double> kp, km;
      const double fp = eval(plus, &kp);
      const double fm = eval(minus, &km);
      if (!detail::same_signs(base_kinks, kp) || !detail::same_signs(base_kinks, km)) {
        ++rep.skipped;
        continue;
      }
      const double fd = (fp - fm) / (2.0 * step);
      const double err = rel_err(analytic[li][k], fd);
      ++rep.checked;
      double& slot = near_kink ? rep.max_rel_err_near : rep.max_rel_err;
      if (err > slot) {
        slot = err;
        rep.worst = "leaf " + std::to_string(li) + "[" + std::to_string(k) + "] analytic " +
                    std::to_string(analytic[li][k]) + " fd " + std::to_string(fd);
      }
    }
  }
  return rep;
}

// ---- random graphs ---------------------------------------------------------

// The op kinds every random-graph check must cover.
inline const std::vector<ad::OpKind>& public_op_kinds() {
  static const std::vector<ad::OpKind> k = {
      ad::OpKind::add,  ad::OpKind::sub,     ad::OpKind::mul,    ad::OpKind::scalar_mul,   ad::OpKind::matmul,
      ad::OpKind::affine, ad::OpKind::relu,  ad::OpKind::leaky_relu, ad::OpKind::tanh,     ad::OpKind::sigmoid,
      ad::OpKind::abs,  ad::OpKind::square,  ad::OpKind::sqrt,   ad::OpKind::sum,          ad::OpKind::mean,
      ad::OpKind::l2_norm_rows, ad::OpKind::concat_rows, ad::OpKind::batchnorm};
  return k;
}

struct PlanStep {
  ad::OpKind kind;
  double param = 0.0;
  std::size_t aux = 0;  // index of the first auxiliary leaf
};

// A random layered graph: leaf 0 is the input, later leaves are operands
// introduced by the steps. The output is sum(h * R) for a fixed random R.
struct RandomGraph {
  std::vector<Tensor> leaves;
  std::vector<PlanStep> steps;
  Tensor readout;

  ad::Var build(ad::Graph& g, const std::vector<ad::Var>& v) const {
    ad::Var h = v[0];
    for (const PlanStep& s : steps) {
      const std::size_t n = h.value().rows(), d = h.value().cols();
      switch (s.kind) {
        case ad::OpKind::add: h = ad::add(h, v[s.aux]); break;
        case ad::OpKind::sub: h = ad::sub(h, v[s.aux]); break;
        case ad::OpKind::mul: h = ad::mul(h, v[s.aux]); break;
        case ad::OpKind::scalar_mul: h = ad::scalar_mul(h, s.param); break;
        case ad::OpKind::matmul: h = ad::matmul(h, v[s.aux]); break;
        case ad::OpKind::affine: h = ad::affine(h, v[s.aux], v[s.aux + 1]); break;
        case ad::OpKind::relu: h = ad::relu(h); break;
        case ad::OpKind::leaky_relu: h = ad::leaky_relu(h, s.param); break;
        case ad::OpKind::tanh: h = ad::tanh(h); break;
        case ad::OpKind::sigmoid: h = ad::sigmoid(h); break;
        case ad::OpKind::abs: h = ad::abs(h); break;
        case ad::OpKind::square: h = ad::square(h); break;
        case ad::OpKind::sqrt: h = ad::sqrt(ad::scale_shift(ad::square(h), 1.0, s.param)); break;
        case ad::OpKind::sum: h = ad::mul(h, ad::expand(ad::scalar_mul(ad::sum(h), s.param), h.shape())); break;
        case ad::OpKind::mean: h = ad::add(h, ad::expand(ad::square(ad::mean(h)), h.shape())); break;
        case ad::OpKind::l2_norm_rows: h = ad::mul(h, ad::broadcast_cols(ad::l2_norm_rows(h), d)); break;
        case ad::OpKind::concat_rows: {
          const ad::Var parts[] = {v[s.aux], h};
          h = ad::slice_rows(ad::concat_rows(parts), 1, n);
          break;
        }
        case ad::OpKind::batchnorm: h = ad::batchnorm(h, v[s.aux], v[s.aux + 1], 1e-5); break;
        default: break;
      }
    }
    return ad::sum(ad::mul(h, g.constant(readout)));
  }
};

// `first` forces the kind of the first step so a sweep covers every kind.
inline RandomGraph make_random_graph(Rng& rng, ad::OpKind first) {
  RandomGraph rg;
  std::size_t n = 2 + rng.below(7);  // 2..8 rows
  std::size_t d = 1 + rng.below(8);  // 1..8 columns
  rg.leaves.push_back(random_tensor(rng, {n, d}));
  const std::size_t layers = 1 + rng.below(4);
  const auto& kinds = public_op_kinds();
  for (std::size_t i = 0; i < layers; ++i) {
    PlanStep s;
    s.kind = i == 0 ? first : kinds[rng.below(kinds.size())];
    s.aux = rg.leaves.size();
    switch (s.kind) {
      case ad::OpKind::add:
      case ad::OpKind::sub:
      case ad::OpKind::mul:
        rg.leaves.push_back(random_tensor(rng, {n, d}));
        break;
      case ad::OpKind::scalar_mul: s.param = rng.uniform(-2.0, 2.0); break;
      case ad::OpKind::matmul: {
        const std::size_t d2 = 1 + rng.below(8);
        rg.leaves.push_back(random_tensor(rng, {d, d2}));
        d = d2;
        break;
      }
      case ad::OpKind::affine: {
        const std::size_t d2 = 1 + rng.below(8);
        rg.leaves.push_back(random_tensor(rng, {d, d2}));
        rg.leaves.push_back(random_tensor(rng, {1, d2}));
        d = d2;
        break;
      }
      case ad::OpKind::leaky_relu: s.param = rng.uniform(0.05, 0.5); break;
      case ad::OpKind::sqrt: s.param = rng.uniform(0.5, 1.5); break;
      case ad::OpKind::sum: s.param = rng.uniform(-0.5, 0.5); break;
      case ad::OpKind::concat_rows: rg.leaves.push_back(random_tensor(rng, {1, d})); break;
      case ad::OpKind::batchnorm:
        rg.leaves.push_back(random_tensor(rng, {1, d}, 0.5, 1.5));
        rg.leaves.push_back(random_tensor(rng, {1, d}));
        break;
      default: break;
    }
    rg.steps.push_back(s);
  }
  rg.readout = random_tensor(rng, {n, d});
  return rg;
}

inline FdReport check_random_graph(const RandomGraph& rg) {
  return check_gradients([&](ad::Graph& g, const std::vector<ad::Var>& v) { return rg.build(g, v); }, rg.leaves);
}

// ---- second order ----------------------------------------------------------

// Two-layer tanh critic x -> tanh(x W1 + b1) W2 + b2 as a function of the
// leaves (W1, b1, W2, b2).
inline ad::Var tanh_critic(const std::vector<ad::Var>& p, ad::Var x) {
  return ad::affine(ad::tanh(ad::affine(x, p[0], p[1])), p[2], p[3]);
}

}  // namespace tvgan::testing
