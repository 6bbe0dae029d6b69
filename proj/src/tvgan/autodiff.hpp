// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Define-by-run reverse-mode automatic differentiation over rank-2 tensors.
//
// Every backward rule is expressed with the same recorded operations used in
// the forward pass. Differentiating with `create_graph = true` therefore
// records the gradient computation on the tape, and the resulting gradient
// variables can themselves be differentiated (reverse-over-reverse). This is
// how the gradient-penalty term is trained.
//
// Conventions: d|x|/dx at 0 is 0, relu'(0) is 0, and elementwise division by
// an exact zero yields 0 (reachable only through sqrt / row norms at the
// origin, where the subgradient 0 is chosen).

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "tvgan/tensor.hpp"

namespace tvgan::ad {

using NodeId = std::size_t;

enum class OpKind {
  leaf,
  // public op kinds
  add,
  sub,
  mul,
  scalar_mul,
  matmul,
  affine,
  relu,
  leaky_relu,
  tanh,
  sigmoid,
  abs,
  square,
  sqrt,
  sum,
  mean,
  l2_norm_rows,
  concat_rows,
  batchnorm,
  // helpers used by backward rules and losses
  div,
  scale_shift,
  softplus,
  transpose,
  slice_rows,
  sum_rows,
  sum_cols,
  broadcast_rows,
  broadcast_cols,
  expand,
};

std::string_view op_name(OpKind kind);

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
struct Var {
  Graph* graph = nullptr;
  NodeId id = 0;

  const Tensor& value() const;
  // By value: recording further ops may move node storage.
  Shape shape() const { return value().shape(); }
  bool requires_grad() const;
};

// Gradients of a scalar output, keyed by leaf node id.
using GradientMap = std::map<NodeId, Tensor>;

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // A differentiable input (parameter or data leaf).
  Var leaf(Tensor value, bool requires_grad = true);
  // A value that never receives a gradient.
  Var constant(Tensor value);

  // Generic entry point: records `kind` on `inputs`. `param` carries the
  // scalar attribute of scalar_mul (factor), leaky_relu (alpha) and
  // batchnorm (epsilon). batchnorm takes (x, scale, shift).
  Var record(OpKind kind, std::span<const Var> inputs, double param = 0.0);

  // Gradients of `output` (single element) with respect to every leaf that
  // requires a gradient. Nothing new stays differentiable.
  GradientMap backward(Var output);

  // Gradients of `output` with respect to `wrt`. With create_graph the
  // returned variables are recorded on this graph and can be differentiated
  // again; otherwise they are constants. Unreachable inputs get zeros.
  std::vector<Var> grad(Var output, std::span<const Var> wrt, bool create_graph);

  // d output / d input, differentiable with respect to everything `output`
  // depends on. `input` must be a leaf.
  Var grad_wrt_input(Var output, Var input);

  std::size_t size() const noexcept { return nodes_.size(); }
  OpKind kind(NodeId id) const { return nodes_.at(id).kind; }
  std::span<const NodeId> inputs(NodeId id) const { return nodes_.at(id).inputs; }
  const Tensor& value(NodeId id) const { return nodes_.at(id).value; }
  bool requires_grad(NodeId id) const { return nodes_.at(id).requires_grad; }

 private:
  friend struct OpRecorder;

  struct Node {
    OpKind kind = OpKind::leaf;
    std::vector<NodeId> inputs;
    Tensor value;
    double a = 0.0;      // scalar attribute
    double b = 0.0;      // second scalar attribute (scale_shift)
    std::size_t i0 = 0;  // slice start / broadcast extent
    std::size_t i1 = 0;  // slice length
    bool requires_grad = false;
  };

  Var push(Node node);
  void check_owned(Var v, std::string_view op) const;
  std::vector<Var> input_grads(const Node& node, NodeId id, Var upstream, bool create_graph,
                               const std::vector<char>& relevant);

  std::vector<Node> nodes_;
};

// Recorded operations. All inputs must belong to the same graph.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var scalar_mul(Var a, double factor);
// factor * a + offset, elementwise.
Var scale_shift(Var a, double factor, double offset);
Var matmul(Var a, Var b);
// x (n x in) * w (in x out) + bias (1 x out) broadcast over rows.
Var affine(Var x, Var w, Var bias);
Var relu(Var a);
Var leaky_relu(Var a, double alpha);
Var tanh(Var a);
Var sigmoid(Var a);
// log(1 + exp(a)), evaluated without overflow.
Var softplus(Var a);
Var abs(Var a);
Var square(Var a);
Var sqrt(Var a);
Var sum(Var a);
Var mean(Var a);
// (n x d) -> (n x 1) Euclidean norm of each row.
Var l2_norm_rows(Var a);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t start, std::size_t count);
Var transpose(Var a);
// (n x d) -> (1 x d)
Var sum_rows(Var a);
// (n x d) -> (n x 1)
Var sum_cols(Var a);
// (1 x d) -> (n x d)
Var broadcast_rows(Var a, std::size_t n);
// (n x 1) -> (n x d)
Var broadcast_cols(Var a, std::size_t d);
// (1 x 1) -> shape
Var expand(Var a, const Shape& shape);
// Per-column standardization with batch statistics (population variance),
// followed by scale (1 x d) and shift (1 x d). Composed from primitive ops
// so both first and second derivatives flow through the statistics.
Var batchnorm(Var x, Var scale, Var shift, double eps);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double s, Var a) { return scalar_mul(a, s); }

}  // namespace tvgan::ad
