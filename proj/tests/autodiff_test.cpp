// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "tvgan/autodiff.hpp"
#include "tvgan/error.hpp"
#include "tvgan/losses.hpp"

namespace tvgan {
namespace {

using ad::Graph;
using ad::Var;
using testing::check_gradients;
using testing::random_tensor;

TEST(Tensor, ShapeAndAccess) {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t.at(1, 2), 6.0);
  EXPECT_EQ(shape_str(t.shape()), "(2x3)");
  EXPECT_THROW(Tensor({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_TRUE(Tensor::filled({2, 2}, 1.5).identical(Tensor({2, 2}, {1.5, 1.5, 1.5, 1.5})));
}

TEST(Autodiff, RecordShapes) {
  Graph g;
  Var a = g.leaf(Tensor::filled({2, 3}, 1.0));
  Var b = g.leaf(Tensor::filled({3, 4}, 1.0));
  EXPECT_EQ(ad::matmul(a, b).shape(), (Shape{2, 4}));
  try {
    ad::matmul(a, a);
    FAIL() << "expected a shape error";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos);
    EXPECT_NE(msg.find("(2x3)"), std::string::npos);
  }
}

TEST(Autodiff, ElementwiseExamples) {
  Graph g;
  Var x = g.leaf(Tensor({1, 2}, {-1.0, 2.0}));
  EXPECT_TRUE(ad::relu(x).value().identical(Tensor({1, 2}, {0.0, 2.0})));
  Var y = g.leaf(Tensor({1, 1}, {-3.0}));
  EXPECT_EQ(ad::abs(y).value().item(), 3.0);
}

TEST(Autodiff, GenericEntryPoint) {
  Graph g;
  Var x = g.leaf(Tensor({1, 2}, {-1.0, 2.0}));
  const Var in[] = {x};
  EXPECT_TRUE(g.record(ad::OpKind::leaky_relu, in, 0.5).value().identical(Tensor({1, 2}, {-0.5, 2.0})));
  EXPECT_THROW(g.record(ad::OpKind::add, in), Error);
}

TEST(Autodiff, SquareAndAbsGradients) {
  Graph g;
  Var x = g.leaf(Tensor::scalar(3.0));
  EXPECT_EQ(g.backward(ad::square(x)).at(x.id).item(), 6.0);

  Graph g2;
  Var y = g2.leaf(Tensor::scalar(-2.0));
  EXPECT_EQ(g2.backward(ad::abs(y)).at(y.id).item(), -1.0);

  Graph g3;
  Var z = g3.leaf(Tensor({1, 2}, {0.0, 0.0}));
  const ad::GradientMap gz = g3.backward(ad::sum(ad::add(ad::abs(z), ad::relu(z))));
  EXPECT_TRUE(gz.at(z.id).identical(Tensor({1, 2}, {0.0, 0.0})));
}

TEST(Autodiff, NonScalarOutputRejected) {
  Graph g;
  Var x = g.leaf(Tensor::filled({2, 2}, 1.0));
  EXPECT_THROW(g.backward(ad::relu(x)), ShapeError);
}

TEST(Autodiff, ForeignNodeRejected) {
  Graph g, h;
  Var x = g.leaf(Tensor::scalar(1.0));
  Var y = h.leaf(Tensor::scalar(1.0));
  EXPECT_THROW(ad::add(x, y), Error);
  Var bogus{&g, 99};
  EXPECT_THROW(g.backward(bogus), Error);
}

TEST(Autodiff, BatchnormNeedsTwoRows) {
  Graph g;
  Var x = g.leaf(Tensor({1, 2}, {1.0, 2.0}));
  Var s = g.leaf(Tensor::filled({1, 2}, 1.0));
  Var b = g.leaf(Tensor::zeros({1, 2}));
  EXPECT_THROW(ad::batchnorm(x, s, b, 1e-5), ShapeError);
}

TEST(Autodiff, MlpMatchesFiniteDifferences) {
  Rng rng(11, "test");
  const std::vector<Tensor> leaves = {random_tensor(rng, {5, 3}), random_tensor(rng, {3, 6}),
                                      random_tensor(rng, {1, 6}), random_tensor(rng, {6, 4}),
                                      random_tensor(rng, {1, 4}), random_tensor(rng, {4, 1}),
                                      random_tensor(rng, {1, 1})};
  auto fn = [](Graph&, const std::vector<Var>& v) {
    Var h = ad::tanh(ad::affine(v[0], v[1], v[2]));
    h = ad::sigmoid(ad::affine(h, v[3], v[4]));
    return ad::mean(ad::affine(h, v[5], v[6]));
  };
  const testing::FdReport rep = check_gradients(fn, leaves);
  EXPECT_LT(rep.max_rel_err, 1e-6) << rep.worst;
  EXPECT_EQ(rep.skipped, 0u);
}

// Each op on its own, composed with a random readout.
TEST(Autodiff, EveryOpMatchesFiniteDifferences) {
  Rng rng(12, "test");
  for (ad::OpKind kind : testing::public_op_kinds()) {
    for (int rep = 0; rep < 3; ++rep) {
      SCOPED_TRACE(ad::op_name(kind));
      testing::RandomGraph rg = testing::make_random_graph(rng, kind);
      rg.steps.resize(1);
      const std::size_t n = rg.leaves[0].rows();
      const std::size_t d = kind == ad::OpKind::matmul || kind == ad::OpKind::affine
                                ? rg.leaves[rg.steps[0].aux].cols()
                                : rg.leaves[0].cols();
      rg.readout = random_tensor(rng, {n, d});
      const testing::FdReport r = testing::check_random_graph(rg);
      EXPECT_LT(r.max_rel_err, 1e-5) << ad::op_name(kind) << ": " << r.worst;
      EXPECT_LT(r.max_rel_err_near, 1e-3) << ad::op_name(kind) << ": " << r.worst;
    }
  }
}

TEST(Autodiff, Linearity) {
  Rng rng(13, "test");
  const Tensor xv = random_tensor(rng, {4, 3});
  const Tensor wv = random_tensor(rng, {3, 2});
  const double a = 0.7, b = -1.3;
  auto f = [](Var x, Var w) { return ad::sum(ad::tanh(ad::matmul(x, w))); };
  auto g2 = [](Var x, Var w) { return ad::mean(ad::square(ad::matmul(x, w))); };

  Graph g;
  Var x = g.leaf(xv), w = g.leaf(wv);
  const ad::GradientMap combined = g.backward(ad::add(ad::scalar_mul(f(x, w), a), ad::scalar_mul(g2(x, w), b)));
  Graph gf;
  Var xf = gf.leaf(xv), wf = gf.leaf(wv);
  const ad::GradientMap df = gf.backward(f(xf, wf));
  Graph gg;
  Var xg = gg.leaf(xv), wg = gg.leaf(wv);
  const ad::GradientMap dg = gg.backward(g2(xg, wg));
  for (std::size_t i = 0; i < wv.size(); ++i) {
    EXPECT_NEAR(combined.at(w.id)[i], a * df.at(wf.id)[i] + b * dg.at(wg.id)[i], 1e-12);
  }
  for (std::size_t i = 0; i < xv.size(); ++i) {
    EXPECT_NEAR(combined.at(x.id)[i], a * df.at(xf.id)[i] + b * dg.at(xg.id)[i], 1e-12);
  }
}

TEST(Autodiff, Determinism) {
  Rng rng(14, "test");
  const testing::RandomGraph rg = testing::make_random_graph(rng, ad::OpKind::batchnorm);
  auto grads = [&] {
    Graph g;
    std::vector<Var> vars;
    for (const Tensor& t : rg.leaves) vars.push_back(g.leaf(t));
    const ad::GradientMap m = g.backward(rg.build(g, vars));
    std::vector<Tensor> out;
    for (Var v : vars) out.push_back(m.at(v.id));
    return out;
  };
  const auto a = grads(), b = grads();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i].identical(b[i]));
}

TEST(Autodiff, UnreachedLeafGetsZeros) {
  Graph g;
  Var x = g.leaf(Tensor::filled({2, 2}, 1.0));
  Var unused = g.leaf(Tensor::filled({3, 1}, 5.0));
  const ad::GradientMap m = g.backward(ad::sum(x));
  EXPECT_TRUE(m.at(unused.id).identical(Tensor::zeros({3, 1})));
}

TEST(Autodiff, LinearCriticInputGradient) {
  // D(x) = x . w with w = [1, 2]: the input gradient is w for every x.
  Graph g;
  Var x = g.leaf(Tensor({3, 2}, {0.3, -1.0, 2.0, 5.0, -4.0, 0.0}));
  Var w = g.leaf(Tensor({2, 1}, {1.0, 2.0}));
  const Tensor grad = g.grad_wrt_input(ad::sum(ad::matmul(x, w)), x).value();
  EXPECT_TRUE(grad.identical(Tensor({3, 2}, {1, 2, 1, 2, 1, 2})));
}

TEST(Autodiff, PenaltyGradientClosedForm) {
  // p(w) = (|grad_x (w . x)| - 1)^2 with w = [3, 4] has grad_w p = 2 (5 - 1) w / 5.
  Graph g;
  Var x = g.leaf(Tensor({1, 2}, {0.25, -0.75}));
  Var w = g.leaf(Tensor({2, 1}, {3.0, 4.0}));
  Var grad_x = g.grad_wrt_input(ad::sum(ad::matmul(x, w)), x);
  Var p = ad::sum(ad::square(ad::scale_shift(ad::l2_norm_rows(grad_x), 1.0, -1.0)));
  const ad::Var wrt[] = {w};
  const Tensor gw = g.grad(p, wrt, false).front().value();
  EXPECT_NEAR(gw[0], 4.8, 1e-12);
  EXPECT_NEAR(gw[1], 6.4, 1e-12);
}

TEST(Autodiff, GradWrtInputRequiresLeaf) {
  Graph g;
  Var x = g.leaf(Tensor::filled({1, 2}, 1.0));
  Var y = ad::tanh(x);
  EXPECT_THROW(g.grad_wrt_input(ad::sum(y), y), Error);
  Var c = g.constant(Tensor::filled({1, 2}, 1.0));
  EXPECT_THROW(g.grad_wrt_input(ad::sum(ad::mul(x, c)), c), Error);
}

TEST(Autodiff, SecondOrderTanhCritic) {
  Rng rng(15, "test");
  for (int instance = 0; instance < 5; ++instance) {
    const Tensor points = random_tensor(rng, {6, 2}, -2.0, 2.0);
    const std::vector<Tensor> params = {random_tensor(rng, {2, 5}), random_tensor(rng, {1, 5}),
                                        random_tensor(rng, {5, 1}), random_tensor(rng, {1, 1})};
    auto penalty = [&](Graph& g, const std::vector<Var>& p) {
      return losses::gradient_penalty_at([&](Var x) { return testing::tanh_critic(p, x); }, points, g);
    };
    const testing::FdReport rep = check_gradients(penalty, params);
    EXPECT_LT(rep.max_rel_err, 1e-6) << rep.worst;
  }
}

TEST(Autodiff, SecondOrderThroughBatchnormAndLeakyRelu) {
  Rng rng(16, "test");
  const Tensor points = random_tensor(rng, {5, 2}, -2.0, 2.0);
  const std::vector<Tensor> params = {random_tensor(rng, {2, 4}), random_tensor(rng, {1, 4}),
                                      random_tensor(rng, {1, 4}, 0.5, 1.5), random_tensor(rng, {1, 4}),
                                      random_tensor(rng, {4, 1}), random_tensor(rng, {1, 1})};
  auto critic = [](const std::vector<Var>& p, Var x) {
    Var h = ad::batchnorm(ad::affine(x, p[0], p[1]), p[2], p[3], 1e-5);
    return ad::affine(ad::leaky_relu(h, 0.2), p[4], p[5]);
  };
  auto penalty = [&](Graph& g, const std::vector<Var>& p) {
    return losses::gradient_penalty_at([&](Var x) { return critic(p, x); }, points, g);
  };
  const testing::FdReport rep = check_gradients(penalty, params);
  EXPECT_LT(rep.max_rel_err, 1e-5) << rep.worst;
}

}  // namespace
}  // namespace tvgan
