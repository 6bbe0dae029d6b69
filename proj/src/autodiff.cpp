// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "tvgan/error.hpp"

namespace tvgan::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

[[noreturn]] void shape_fail(std::string_view op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": " + detail);
}

void require_rank2(std::string_view op, const Tensor& t) {
  if (t.rank() != 2) shape_fail(op, "expected a rank-2 operand, got " + shape_str(t.shape()));
}

void require_same(std::string_view op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    shape_fail(op, "shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

template <class F>
Tensor map_unary(const Tensor& x, F f) {
  std::vector<double> out(x.size());
  const double* p = x.ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(p[i]);
  return Tensor(x.shape(), std::move(out));
}

template <class F>
Tensor map_binary(const Tensor& x, const Tensor& y, F f) {
  std::vector<double> out(x.size());
  const double* p = x.ptr();
  const double* q = y.ptr();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(p[i], q[i]);
  return Tensor(x.shape(), std::move(out));
}

Graph& graph_of(Var a, std::string_view op) {
  if (a.graph == nullptr) throw Error(std::string(op) + ": variable is not attached to a graph");
  return *a.graph;
}

Graph& graph_of(Var a, Var b, std::string_view op) {
  Graph& g = graph_of(a, op);
  if (b.graph != a.graph) throw Error(std::string(op) + ": operands belong to different graphs");
  return g;
}

}  // namespace

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::leaf: return "leaf";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::scalar_mul: return "scalar_mul";
    case OpKind::matmul: return "matmul";
    case OpKind::affine: return "affine";
    case OpKind::relu: return "relu";
    case OpKind::leaky_relu: return "leaky_relu";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::abs: return "abs";
    case OpKind::square: return "square";
    case OpKind::sqrt: return "sqrt";
    case OpKind::sum: return "sum";
    case OpKind::mean: return "mean";
    case OpKind::l2_norm_rows: return "l2_norm_rows";
    case OpKind::concat_rows: return "concat_rows";
    case OpKind::batchnorm: return "batchnorm";
    case OpKind::div: return "div";
    case OpKind::scale_shift: return "scale_shift";
    case OpKind::softplus: return "softplus";
    case OpKind::transpose: return "transpose";
    case OpKind::slice_rows: return "slice_rows";
    case OpKind::sum_rows: return "sum_rows";
    case OpKind::sum_cols: return "sum_cols";
    case OpKind::broadcast_rows: return "broadcast_rows";
    case OpKind::broadcast_cols: return "broadcast_cols";
    case OpKind::expand: return "expand";
  }
  return "unknown";
}

const Tensor& Var::value() const { return graph_of(*this, "value").value(id); }

bool Var::requires_grad() const { return graph_of(*this, "requires_grad").requires_grad(id); }

// Appends nodes on behalf of the free op functions.
struct OpRecorder {
  static Var make(Graph& g, OpKind kind, std::vector<NodeId> inputs, Tensor value,
                  double a = 0.0, double b = 0.0, std::size_t i0 = 0, std::size_t i1 = 0) {
    Graph::Node node;
    node.kind = kind;
    node.value = std::move(value);
    node.a = a;
    node.b = b;
    node.i0 = i0;
    node.i1 = i1;
    for (NodeId in : inputs) node.requires_grad = node.requires_grad || g.nodes_[in].requires_grad;
    node.inputs = std::move(inputs);
    return g.push(std::move(node));
  }
};

Var Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

void Graph::check_owned(Var v, std::string_view op) const {
  if (v.graph != this || v.id >= nodes_.size()) {
    throw Error(std::string(op) + ": node " + std::to_string(v.id) + " is not part of this graph");
  }
}

Var Graph::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.kind = OpKind::leaf;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  return push(std::move(node));
}

Var Graph::constant(Tensor value) { return leaf(std::move(value), false); }

Var Graph::record(OpKind kind, std::span<const Var> in, double param) {
  auto arity = [&](std::size_t n) {
    if (in.size() != n) {
      throw Error(std::string(op_name(kind)) + ": expected " + std::to_string(n) + " inputs, got " +
                  std::to_string(in.size()));
    }
  };
  for (Var v : in) check_owned(v, op_name(kind));
  switch (kind) {
    case OpKind::add: arity(2); return add(in[0], in[1]);
    case OpKind::sub: arity(2); return sub(in[0], in[1]);
    case OpKind::mul: arity(2); return mul(in[0], in[1]);
    case OpKind::div: arity(2); return div(in[0], in[1]);
    case OpKind::scalar_mul: arity(1); return scalar_mul(in[0], param);
    case OpKind::matmul: arity(2); return matmul(in[0], in[1]);
    case OpKind::affine: arity(3); return affine(in[0], in[1], in[2]);
    case OpKind::relu: arity(1); return relu(in[0]);
    case OpKind::leaky_relu: arity(1); return leaky_relu(in[0], param);
    case OpKind::tanh: arity(1); return tanh(in[0]);
    case OpKind::sigmoid: arity(1); return sigmoid(in[0]);
    case OpKind::softplus: arity(1); return softplus(in[0]);
    case OpKind::abs: arity(1); return abs(in[0]);
    case OpKind::square: arity(1); return square(in[0]);
    case OpKind::sqrt: arity(1); return sqrt(in[0]);
    case OpKind::sum: arity(1); return sum(in[0]);
    case OpKind::mean: arity(1); return mean(in[0]);
    case OpKind::l2_norm_rows: arity(1); return l2_norm_rows(in[0]);
    case OpKind::concat_rows: return concat_rows(in);
    case OpKind::batchnorm: arity(3); return batchnorm(in[0], in[1], in[2], param);
    case OpKind::transpose: arity(1); return transpose(in[0]);
    case OpKind::sum_rows: arity(1); return sum_rows(in[0]);
    case OpKind::sum_cols: arity(1); return sum_cols(in[0]);
    default:
      throw Error(std::string(op_name(kind)) + ": cannot be recorded through the generic entry point");
  }
}

// Backward rules. Each returns one entry per input; entries for inputs that
// do not need a gradient are left detached (graph == nullptr).
std::vector<Var> Graph::input_grads(const Node& node, NodeId id, Var g, bool create_graph,
                                    const std::vector<char>& relevant) {
  std::vector<Var> out(node.inputs.size());
  auto needs = [&](std::size_t k) {
    const NodeId in = node.inputs[k];
    return nodes_[in].requires_grad && relevant[in];
  };
  // Forward values enter the backward computation either as live nodes
  // (differentiable) or as detached copies.
  auto val = [&](std::size_t k) -> Var {
    const NodeId in = node.inputs[k];
    return create_graph ? Var{this, in} : constant(nodes_[in].value);
  };
  auto result = [&]() -> Var { return create_graph ? Var{this, id} : constant(node.value); };
  const Tensor x0 = nodes_[node.inputs.at(0)].value;  // copy: nodes_ grows below

  switch (node.kind) {
    case OpKind::leaf:
      break;
    case OpKind::add:
      if (needs(0)) out[0] = g;
      if (needs(1)) out[1] = g;
      break;
    case OpKind::sub:
      if (needs(0)) out[0] = g;
      if (needs(1)) out[1] = scalar_mul(g, -1.0);
      break;
    case OpKind::mul:
      if (needs(0)) out[0] = mul(g, val(1));
      if (needs(1)) out[1] = mul(g, val(0));
      break;
    case OpKind::div:
      if (needs(0)) out[0] = div(g, val(1));
      if (needs(1)) out[1] = scalar_mul(div(mul(g, result()), val(1)), -1.0);
      break;
    case OpKind::scalar_mul:
      out[0] = scalar_mul(g, node.a);
      break;
    case OpKind::scale_shift:
      out[0] = scalar_mul(g, node.a);
      break;
    case OpKind::matmul:
      if (needs(0)) out[0] = matmul(g, transpose(val(1)));
      if (needs(1)) out[1] = matmul(transpose(val(0)), g);
      break;
    case OpKind::affine:
      if (needs(0)) out[0] = matmul(g, transpose(val(1)));
      if (needs(1)) out[1] = matmul(transpose(val(0)), g);
      if (needs(2)) out[2] = sum_rows(g);
      break;
    case OpKind::relu:
      out[0] = mul(g, constant(map_unary(x0, [](double v) { return v > 0.0 ? 1.0 : 0.0; })));
      break;
    case OpKind::leaky_relu: {
      const double alpha = node.a;
      out[0] = mul(g, constant(map_unary(x0, [alpha](double v) { return v > 0.0 ? 1.0 : alpha; })));
      break;
    }
    case OpKind::tanh:
      out[0] = mul(g, scale_shift(square(result()), -1.0, 1.0));
      break;
    case OpKind::sigmoid: {
      Var y = result();
      out[0] = mul(g, sub(y, square(y)));
      break;
    }
    case OpKind::softplus:
      out[0] = mul(g, sigmoid(val(0)));
      break;
    case OpKind::abs:
      out[0] = mul(g, constant(map_unary(x0, [](double v) {
                     return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
                   })));
      break;
    case OpKind::square:
      out[0] = mul(g, scalar_mul(val(0), 2.0));
      break;
    case OpKind::sqrt:
      out[0] = div(scalar_mul(g, 0.5), result());
      break;
    case OpKind::sum:
      out[0] = expand(g, x0.shape());
      break;
    case OpKind::mean:
      out[0] = scalar_mul(expand(g, x0.shape()), 1.0 / static_cast<double>(x0.size()));
      break;
    case OpKind::l2_norm_rows: {
      const std::size_t d = x0.cols();
      out[0] = div(mul(broadcast_cols(g, d), val(0)), broadcast_cols(result(), d));
      break;
    }
    case OpKind::concat_rows: {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        const std::size_t r = nodes_[node.inputs[k]].value.rows();
        if (needs(k)) out[k] = slice_rows(g, offset, r);
        offset += r;
      }
      break;
    }
    case OpKind::slice_rows: {
      const std::size_t start = node.i0, count = node.i1, cols = x0.cols();
      std::vector<Var> parts;
      if (start > 0) parts.push_back(constant(Tensor::zeros({start, cols})));
      parts.push_back(g);
      const std::size_t tail = x0.rows() - start - count;
      if (tail > 0) parts.push_back(constant(Tensor::zeros({tail, cols})));
      out[0] = parts.size() == 1 ? g : concat_rows(parts);
      break;
    }
    case OpKind::transpose:
      out[0] = transpose(g);
      break;
    case OpKind::sum_rows:
      out[0] = broadcast_rows(g, x0.rows());
      break;
    case OpKind::sum_cols:
      out[0] = broadcast_cols(g, x0.cols());
      break;
    case OpKind::broadcast_rows:
      out[0] = sum_rows(g);
      break;
    case OpKind::broadcast_cols:
      out[0] = sum_cols(g);
      break;
    case OpKind::expand:
      out[0] = sum(g);
      break;
    case OpKind::batchnorm:
      // batchnorm never appears as a node; it is recorded as its primitives.
      throw Error("second-order unsupported for op batchnorm node");
  }
  return out;
}

std::vector<Var> Graph::grad(Var output, std::span<const Var> wrt, bool create_graph) {
  check_owned(output, "grad");
  for (Var w : wrt) check_owned(w, "grad");
  const Tensor& out_value = nodes_[output.id].value;
  if (out_value.size() != 1) {
    throw ShapeError("backward: output must be a single element, got shape " +
                     shape_str(out_value.shape()));
  }

  const NodeId last = output.id;
  // Only nodes lying on a path from a target to the output need adjoints.
  std::vector<char> relevant(last + 1, 0);
  for (Var w : wrt) {
    if (w.id <= last) relevant[w.id] = 1;
  }
  for (NodeId id = 0; id <= last; ++id) {
    if (relevant[id]) continue;
    for (NodeId in : nodes_[id].inputs) {
      if (relevant[in]) {
        relevant[id] = 1;
        break;
      }
    }
  }

  std::vector<Var> adj(last + 1);
  adj[last] = constant(Tensor::filled(out_value.shape(), 1.0));
  for (NodeId id = last + 1; id-- > 0;) {
    if (adj[id].graph == nullptr || !relevant[id]) continue;
    if (nodes_[id].kind == OpKind::leaf) continue;
    const Node node = nodes_[id];  // copy: the rules append to nodes_
    std::vector<Var> grads = input_grads(node, id, adj[id], create_graph, relevant);
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      const NodeId in = node.inputs[k];
      if (grads[k].graph == nullptr || !relevant[in]) continue;
      adj[in] = adj[in].graph == nullptr ? grads[k] : add(adj[in], grads[k]);
    }
  }

  std::vector<Var> result;
  result.reserve(wrt.size());
  for (Var w : wrt) {
    if (w.id <= last && adj[w.id].graph != nullptr) {
      result.push_back(adj[w.id]);
    } else {
      result.push_back(constant(Tensor::zeros(nodes_[w.id].value.shape())));
    }
  }
  return result;
}

GradientMap Graph::backward(Var output) {
  check_owned(output, "backward");
  std::vector<Var> leaves;
  for (NodeId id = 0; id <= output.id; ++id) {
    if (nodes_[id].kind == OpKind::leaf && nodes_[id].requires_grad) leaves.push_back(Var{this, id});
  }
  std::vector<Var> grads = grad(output, leaves, false);
  GradientMap map;
  for (std::size_t i = 0; i < leaves.size(); ++i) map.emplace(leaves[i].id, grads[i].value());
  return map;
}

Var Graph::grad_wrt_input(Var output, Var input) {
  check_owned(input, "grad_wrt_input");
  if (nodes_[input.id].kind != OpKind::leaf) {
    throw Error("grad_wrt_input: node " + std::to_string(input.id) + " is not a leaf");
  }
  if (!nodes_[input.id].requires_grad) {
    throw Error("grad_wrt_input: leaf " + std::to_string(input.id) + " does not require a gradient");
  }
  const Var wrt[] = {input};
  return grad(output, wrt, true).front();
}

// ---- recorded operations ---------------------------------------------------

Var add(Var a, Var b) {
  Graph& g = graph_of(a, b, "add");
  require_same("add", a.value(), b.value());
  return OpRecorder::make(g, OpKind::add, {a.id, b.id},
                          map_binary(a.value(), b.value(), [](double x, double y) { return x + y; }));
}

Var sub(Var a, Var b) {
  Graph& g = graph_of(a, b, "sub");
  require_same("sub", a.value(), b.value());
  return OpRecorder::make(g, OpKind::sub, {a.id, b.id},
                          map_binary(a.value(), b.value(), [](double x, double y) { return x - y; }));
}

Var mul(Var a, Var b) {
  Graph& g = graph_of(a, b, "mul");
  require_same("mul", a.value(), b.value());
  return OpRecorder::make(g, OpKind::mul, {a.id, b.id},
                          map_binary(a.value(), b.value(), [](double x, double y) { return x * y; }));
}

Var div(Var a, Var b) {
  Graph& g = graph_of(a, b, "div");
  require_same("div", a.value(), b.value());
  return OpRecorder::make(g, OpKind::div, {a.id, b.id},
                          map_binary(a.value(), b.value(),
                                     [](double x, double y) { return y == 0.0 ? 0.0 : x / y; }));
}

Var scalar_mul(Var a, double factor) {
  Graph& g = graph_of(a, "scalar_mul");
  return OpRecorder::make(g, OpKind::scalar_mul, {a.id},
                          map_unary(a.value(), [factor](double x) { return factor * x; }), factor);
}

Var scale_shift(Var a, double factor, double offset) {
  Graph& g = graph_of(a, "scale_shift");
  return OpRecorder::make(g, OpKind::scale_shift, {a.id},
                          map_unary(a.value(), [=](double x) { return factor * x + offset; }), factor,
                          offset);
}

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a, b, "matmul");
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require_rank2("matmul", x);
  require_rank2("matmul", y);
  if (x.cols() != y.rows()) {
    shape_fail("matmul", "inner dimensions differ: " + shape_str(x.shape()) + " * " + shape_str(y.shape()));
  }
  const auto m = static_cast<Eigen::Index>(x.rows());
  const auto k = static_cast<Eigen::Index>(x.cols());
  const auto n = static_cast<Eigen::Index>(y.cols());
  std::vector<double> out(static_cast<std::size_t>(m * n));
  MutMap(out.data(), m, n).noalias() = ConstMap(x.ptr(), m, k) * ConstMap(y.ptr(), k, n);
  return OpRecorder::make(g, OpKind::matmul, {a.id, b.id},
                          Tensor({x.rows(), y.cols()}, std::move(out)));
}

Var affine(Var x, Var w, Var bias) {
  Graph& g = graph_of(x, w, "affine");
  graph_of(x, bias, "affine");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = bias.value();
  require_rank2("affine", xv);
  require_rank2("affine", wv);
  if (xv.cols() != wv.rows() || bv.rank() != 2 || bv.rows() != 1 || bv.cols() != wv.cols()) {
    shape_fail("affine", "incompatible shapes x" + shape_str(xv.shape()) + " w" + shape_str(wv.shape()) +
                             " b" + shape_str(bv.shape()));
  }
  const auto m = static_cast<Eigen::Index>(xv.rows());
  const auto k = static_cast<Eigen::Index>(xv.cols());
  const auto n = static_cast<Eigen::Index>(wv.cols());
  std::vector<double> out(static_cast<std::size_t>(m * n));
  MutMap c(out.data(), m, n);
  c.noalias() = ConstMap(xv.ptr(), m, k) * ConstMap(wv.ptr(), k, n);
  c.rowwise() += ConstMap(bv.ptr(), 1, n).row(0);
  return OpRecorder::make(g, OpKind::affine, {x.id, w.id, bias.id},
                          Tensor({xv.rows(), wv.cols()}, std::move(out)));
}

Var relu(Var a) {
  Graph& g = graph_of(a, "relu");
  return OpRecorder::make(g, OpKind::relu, {a.id},
                          map_unary(a.value(), [](double x) { return x > 0.0 ? x : 0.0; }));
}

Var leaky_relu(Var a, double alpha) {
  Graph& g = graph_of(a, "leaky_relu");
  return OpRecorder::make(g, OpKind::leaky_relu, {a.id},
                          map_unary(a.value(), [alpha](double x) { return x > 0.0 ? x : alpha * x; }),
                          alpha);
}

Var tanh(Var a) {
  Graph& g = graph_of(a, "tanh");
  return OpRecorder::make(g, OpKind::tanh, {a.id},
                          map_unary(a.value(), [](double x) { return std::tanh(x); }));
}

Var sigmoid(Var a) {
  Graph& g = graph_of(a, "sigmoid");
  return OpRecorder::make(g, OpKind::sigmoid, {a.id}, map_unary(a.value(), [](double x) {
                            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
                            const double e = std::exp(x);
                            return e / (1.0 + e);
                          }));
}

Var softplus(Var a) {
  Graph& g = graph_of(a, "softplus");
  return OpRecorder::make(g, OpKind::softplus, {a.id}, map_unary(a.value(), [](double x) {
                            return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
                          }));
}

Var abs(Var a) {
  Graph& g = graph_of(a, "abs");
  return OpRecorder::make(g, OpKind::abs, {a.id},
                          map_unary(a.value(), [](double x) { return std::abs(x); }));
}

Var square(Var a) {
  Graph& g = graph_of(a, "square");
  return OpRecorder::make(g, OpKind::square, {a.id},
                          map_unary(a.value(), [](double x) { return x * x; }));
}

Var sqrt(Var a) {
  Graph& g = graph_of(a, "sqrt");
  for (double v : a.value().data()) {
    if (v < 0.0) throw Error("sqrt: negative operand " + std::to_string(v));
  }
  return OpRecorder::make(g, OpKind::sqrt, {a.id},
                          map_unary(a.value(), [](double x) { return std::sqrt(x); }));
}

Var sum(Var a) {
  Graph& g = graph_of(a, "sum");
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return OpRecorder::make(g, OpKind::sum, {a.id}, Tensor::scalar(s));
}

Var mean(Var a) {
  Graph& g = graph_of(a, "mean");
  const Tensor& x = a.value();
  if (x.size() == 0) shape_fail("mean", "empty operand");
  double s = 0.0;
  for (double v : x.data()) s += v;
  return OpRecorder::make(g, OpKind::mean, {a.id}, Tensor::scalar(s / static_cast<double>(x.size())));
}

Var l2_norm_rows(Var a) {
  Graph& g = graph_of(a, "l2_norm_rows");
  const Tensor& x = a.value();
  require_rank2("l2_norm_rows", x);
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += x[i * d + j] * x[i * d + j];
    out[i] = std::sqrt(s);
  }
  return OpRecorder::make(g, OpKind::l2_norm_rows, {a.id}, Tensor({n, 1}, std::move(out)));
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw Error("concat_rows: no operands");
  Graph& g = graph_of(parts.front(), "concat_rows");
  const std::size_t d = parts.front().value().cols();
  std::size_t rows = 0;
  std::vector<NodeId> ids;
  for (Var p : parts) {
    graph_of(parts.front(), p, "concat_rows");
    const Tensor& t = p.value();
    require_rank2("concat_rows", t);
    if (t.cols() != d) {
      shape_fail("concat_rows", "column count mismatch " + shape_str(parts.front().shape()) + " vs " +
                                    shape_str(t.shape()));
    }
    rows += t.rows();
    ids.push_back(p.id);
  }
  std::vector<double> out;
  out.reserve(rows * d);
  for (Var p : parts) out.insert(out.end(), p.value().data().begin(), p.value().data().end());
  return OpRecorder::make(g, OpKind::concat_rows, std::move(ids), Tensor({rows, d}, std::move(out)));
}

Var slice_rows(Var a, std::size_t start, std::size_t count) {
  Graph& g = graph_of(a, "slice_rows");
  const Tensor& x = a.value();
  require_rank2("slice_rows", x);
  if (start + count > x.rows()) {
    shape_fail("slice_rows", "rows [" + std::to_string(start) + ", " + std::to_string(start + count) +
                                 ") out of range for " + shape_str(x.shape()));
  }
  const std::size_t d = x.cols();
  std::vector<double> out(x.data().begin() + static_cast<std::ptrdiff_t>(start * d),
                          x.data().begin() + static_cast<std::ptrdiff_t>((start + count) * d));
  return OpRecorder::make(g, OpKind::slice_rows, {a.id}, Tensor({count, d}, std::move(out)), 0.0, 0.0,
                          start, count);
}

Var transpose(Var a) {
  Graph& g = graph_of(a, "transpose");
  const Tensor& x = a.value();
  require_rank2("transpose", x);
  const auto r = static_cast<Eigen::Index>(x.rows());
  const auto c = static_cast<Eigen::Index>(x.cols());
  std::vector<double> out(x.size());
  MutMap(out.data(), c, r) = ConstMap(x.ptr(), r, c).transpose();
  return OpRecorder::make(g, OpKind::transpose, {a.id}, Tensor({x.cols(), x.rows()}, std::move(out)));
}

Var sum_rows(Var a) {
  Graph& g = graph_of(a, "sum_rows");
  const Tensor& x = a.value();
  require_rank2("sum_rows", x);
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> out(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[j] += x[i * d + j];
  }
  return OpRecorder::make(g, OpKind::sum_rows, {a.id}, Tensor({1, d}, std::move(out)));
}

Var sum_cols(Var a) {
  Graph& g = graph_of(a, "sum_cols");
  const Tensor& x = a.value();
  require_rank2("sum_cols", x);
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i] += x[i * d + j];
  }
  return OpRecorder::make(g, OpKind::sum_cols, {a.id}, Tensor({n, 1}, std::move(out)));
}

Var broadcast_rows(Var a, std::size_t n) {
  Graph& g = graph_of(a, "broadcast_rows");
  const Tensor& x = a.value();
  if (x.rank() != 2 || x.rows() != 1) shape_fail("broadcast_rows", "expected (1xd), got " + shape_str(x.shape()));
  const std::size_t d = x.cols();
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) std::copy(x.ptr(), x.ptr() + d, out.begin() + static_cast<std::ptrdiff_t>(i * d));
  return OpRecorder::make(g, OpKind::broadcast_rows, {a.id}, Tensor({n, d}, std::move(out)), 0.0, 0.0, n);
}

Var broadcast_cols(Var a, std::size_t d) {
  Graph& g = graph_of(a, "broadcast_cols");
  const Tensor& x = a.value();
  if (x.rank() != 2 || x.cols() != 1) shape_fail("broadcast_cols", "expected (nx1), got " + shape_str(x.shape()));
  const std::size_t n = x.rows();
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i * d), d, x[i]);
  return OpRecorder::make(g, OpKind::broadcast_cols, {a.id}, Tensor({n, d}, std::move(out)), 0.0, 0.0, d);
}

Var expand(Var a, const Shape& shape) {
  Graph& g = graph_of(a, "expand");
  return OpRecorder::make(g, OpKind::expand, {a.id}, Tensor::filled(shape, a.value().item()));
}

Var batchnorm(Var x, Var scale, Var shift, double eps) {
  const Tensor& xv = x.value();
  require_rank2("batchnorm", xv);
  const std::size_t n = xv.rows(), d = xv.cols();
  if (n < 2) shape_fail("batchnorm", "batch statistics need at least 2 rows, got " + shape_str(xv.shape()));
  for (Var p : {scale, shift}) {
    const Tensor& pv = p.value();
    if (pv.rank() != 2 || pv.rows() != 1 || pv.cols() != d) {
      shape_fail("batchnorm", "parameter " + shape_str(pv.shape()) + " does not match input " + shape_str(xv.shape()));
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Var mu = scalar_mul(sum_rows(x), inv_n);
  Var centered = sub(x, broadcast_rows(mu, n));
  Var var = scalar_mul(sum_rows(square(centered)), inv_n);
  Var sd = sqrt(scale_shift(var, 1.0, eps));
  Var xhat = div(centered, broadcast_rows(sd, n));
  return add(mul(xhat, broadcast_rows(scale, n)), broadcast_rows(shift, n));
}

}  // namespace tvgan::ad
