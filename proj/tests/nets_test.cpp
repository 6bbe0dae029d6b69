// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "tvgan/checkpoint.hpp"
#include "tvgan/error.hpp"
#include "tvgan/nets.hpp"

namespace tvgan::nets {
namespace {

TEST(Nets, HeBoundForRelu) {
  EXPECT_DOUBLE_EQ(init_bound({4, 8, Activation::relu, false}), std::sqrt(6.0 / 4.0));
  EXPECT_DOUBLE_EQ(init_bound({4, 8, Activation::tanh, false}), std::sqrt(6.0 / 12.0));
  MlpSpec spec;
  spec.kind = NetKind::generator;
  spec.layers = {{4, 8, Activation::relu, false}};
  const ParamSet p = build(spec, 1);
  const double bound = std::sqrt(1.5);
  double max_abs = 0.0;
  for (double w : p.get("l0.weight").data()) max_abs = std::max(max_abs, std::abs(w));
  EXPECT_LE(max_abs, bound);
  EXPECT_GT(max_abs, 0.5 * bound);
}

TEST(Nets, BiasesStartAtZeroAndBuildIsDeterministic) {
  const MlpSpec spec = make_critic(2, 16, 3, true);
  const ParamSet p = build(spec, 7);
  for (const Param& e : p.entries()) {
    if (e.name.ends_with(".bias")) {
      for (double v : e.value.data()) EXPECT_EQ(v, 0.0);
    }
  }
  EXPECT_TRUE(p.identical(build(spec, 7)));
  EXPECT_FALSE(p.identical(build(spec, 8)));
}

TEST(Nets, SpecValidation) {
  MlpSpec bad;
  bad.kind = NetKind::critic;
  bad.layers = {{2, 4, Activation::relu, false}, {5, 1, Activation::none, false}};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.layers = {{2, 4, Activation::relu, false}, {4, 2, Activation::none, false}};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.layers = {};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Nets, IdentityLayerPassesInputThrough) {
  MlpSpec spec;
  spec.kind = NetKind::generator;
  spec.layers = {{2, 2, Activation::none, false}};
  ParamSet p = build(spec, 1);
  p.set("l0.weight", Tensor({2, 2}, {1, 0, 0, 1}));
  const Tensor x({3, 2}, {1, -2, 3.5, 0, -1, 7});
  EXPECT_TRUE(evaluate(spec, p, x).identical(x));
}

TEST(Nets, BatchnormStandardizesWithPopulationVariance) {
  MlpSpec spec;
  spec.kind = NetKind::generator;
  spec.layers = {{1, 1, Activation::none, true}};
  ParamSet p = build(spec, 1);
  p.set("l0.weight", Tensor({1, 1}, {1.0}));
  ad::Graph g;
  BoundParams b = bind(g, p, false);
  const Tensor out = forward(spec, p, b, g.constant(Tensor({2, 1}, {0.0, 2.0})), Mode::train).value();
  // Population variance is 1; eps keeps the result a hair inside +-1.
  EXPECT_NEAR(out[0], -1.0, 1e-5);
  EXPECT_NEAR(out[1], 1.0, 1e-5);
}

TEST(Nets, CriticOutputShape) {
  const MlpSpec spec = make_critic(2, 128, 3, false);
  const ParamSet p = build(spec, 3);
  Rng rng(3, "test");
  EXPECT_EQ(evaluate(spec, p, testing::random_tensor(rng, {64, 2})).shape(), (Shape{64, 1}));
}

TEST(Nets, SingleRowBatchnormRejectedInTrainMode) {
  const MlpSpec spec = make_critic(2, 8, 2, true);
  const ParamSet p = build(spec, 3);
  ad::Graph g;
  BoundParams b = bind(g, p, false);
  EXPECT_THROW(forward(spec, p, b, g.constant(Tensor({1, 2}, {0.1, 0.2})), Mode::train), ShapeError);
  // Eval mode uses running statistics and accepts a single row.
  EXPECT_EQ(evaluate(spec, p, Tensor({1, 2}, {0.1, 0.2})).shape(), (Shape{1, 1}));
}

TEST(Nets, RunningStatisticsUpdateOnlyWhenRequested) {
  const MlpSpec spec = make_critic(2, 4, 1, true);
  ParamSet p = build(spec, 2);
  const ParamSet before = p;
  Rng rng(5, "test");
  const Tensor x = testing::random_tensor(rng, {16, 2});
  {
    ad::Graph g;
    BoundParams b = bind(g, p, false);
    forward(spec, p, b, g.constant(x), Mode::train, nullptr);
  }
  EXPECT_TRUE(p.identical(before));
  {
    ad::Graph g;
    BoundParams b = bind(g, p, false);
    forward(spec, p, b, g.constant(x), Mode::train, &p);
  }
  EXPECT_FALSE(p.get("l0.bn_mean").identical(before.get("l0.bn_mean")));
  EXPECT_TRUE(p.get("l0.weight").identical(before.get("l0.weight")));
  // Momentum 0.9 from a zero start: new mean = 0.1 * batch mean.
  ad::Graph g;
  BoundParams b = bind(g, before, false);
  const Tensor pre = ad::affine(g.constant(x), b.vars[0], b.vars[1]).value();
  double m0 = 0.0;
  for (std::size_t i = 0; i < 16; ++i) m0 += pre.at(i, 0);
  EXPECT_NEAR(p.get("l0.bn_mean")[0], 0.1 * m0 / 16.0, 1e-14);
}

TEST(Nets, EvalIsPure) {
  const MlpSpec spec = make_generator(8, 16, 2, 2, true);
  const ParamSet p = build(spec, 4);
  Rng rng(4, "test");
  const Tensor z = testing::random_tensor(rng, {10, 8});
  const Tensor a = evaluate(spec, p, z);
  EXPECT_TRUE(p.identical(build(spec, 4)));
  EXPECT_TRUE(a.identical(evaluate(spec, p, z)));
}

TEST(Nets, HomogeneousAndNormalizedShareShapes) {
  const ParamSet h = build(make_critic(2, 32, 3, false), 1);
  const ParamSet n = build(make_critic(2, 32, 3, true), 1);
  for (const Param& e : h.entries()) EXPECT_EQ(n.get(e.name).shape(), e.value.shape());
}

TEST(Nets, WeightHistogramExamples) {
  const MlpSpec spec = make_critic(2, 8, 2, false);
  ParamSet p = build(spec, 1);
  for (const Param& e : p.entries()) {
    if (is_weight_name(e.name)) p.set(e.name, Tensor::zeros(e.value.shape()));
  }
  const std::vector<std::size_t> mid = weight_histogram(p, 3, -1.0, 1.0);
  EXPECT_EQ(mid[0], 0u);
  EXPECT_EQ(mid[2], 0u);
  EXPECT_EQ(mid[1], pooled_weights(p).size());

  const double c = 0.01;
  for (const Param& e : p.entries()) {
    if (!is_weight_name(e.name)) continue;
    std::vector<double> v(e.value.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 == 0 ? -c : c;
    p.set(e.name, Tensor(e.value.shape(), v));
  }
  const std::vector<std::size_t> ext = weight_histogram(p, 10, -c, c);
  EXPECT_EQ(ext.front() + ext.back(), pooled_weights(p).size());

  EXPECT_THROW(weight_histogram(p, 1, -1.0, 1.0), Error);
}

TEST(Nets, UniformInitHistogramIsFlat) {
  // Single-layer net so every weight shares the same init bound.
  MlpSpec spec;
  spec.kind = NetKind::generator;
  spec.layers = {{128, 128, Activation::relu, false}};
  const ParamSet p = build(spec, 9);
  const double bound = init_bound(spec.layers[0]);
  const std::size_t bins = 20;
  const std::vector<std::size_t> counts = weight_histogram(p, bins, -bound, bound);
  const double mean = static_cast<double>(128 * 128) / bins;
  for (std::size_t c : counts) EXPECT_LT(static_cast<double>(c), 3.0 * mean);
}

TEST(Checkpoint, RoundTripIsExact) {
  const ParamSet p = build(make_critic(2, 8, 2, true), 5);
  NamedTensors records;
  for (const Param& e : p.entries()) records.emplace_back(e.name, e.value);
  records.emplace_back("odd", Tensor({1, 3}, {std::nextafter(1.0, 2.0), -0.0, 1e-308}));
  const auto path = std::filesystem::temp_directory_path() / "tvgan_ckpt_test.bin";
  save_checkpoint(path, records);
  const NamedTensors back = load_checkpoint(path);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].first, records[i].first);
    EXPECT_TRUE(back[i].second.identical(records[i].second));
  }
  EXPECT_TRUE(std::signbit(back.back().second[1]));
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const auto path = std::filesystem::temp_directory_path() / "tvgan_ckpt_bad.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT1234";
  }
  EXPECT_THROW(load_checkpoint(path), IoError);
  save_checkpoint(path, {{"w", Tensor({2, 2}, {1, 2, 3, 4})}});
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 4);
  EXPECT_THROW(load_checkpoint(path), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), IoError);
}

}  // namespace
}  // namespace tvgan::nets
