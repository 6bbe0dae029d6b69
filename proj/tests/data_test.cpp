// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "tvgan/data.hpp"
#include "tvgan/error.hpp"
#include "tvgan/rng.hpp"

namespace tvgan::data {
namespace {

TEST(Data, Ring8Geometry) {
  const MixtureSpec r = ring8();
  ASSERT_EQ(r.centers.size(), 8u);
  EXPECT_EQ(r.centers[0][0], 2.0);
  EXPECT_EQ(r.centers[0][1], 0.0);
  EXPECT_NEAR(r.centers[2][0], 0.0, 1e-15);
  EXPECT_NEAR(r.centers[2][1], 2.0, 1e-15);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_EQ(r.weights[k], 0.125);
    EXPECT_NEAR(std::hypot(r.centers[k][0], r.centers[k][1]), 2.0, 1e-15);
  }
  EXPECT_EQ(r.sigma, 0.02);
}

TEST(Data, Grid25Geometry) {
  const MixtureSpec g = grid25();
  ASSERT_EQ(g.centers.size(), 25u);
  EXPECT_EQ(g.centers.front(), (Point{-2.0, -2.0}));
  EXPECT_EQ(g.centers[12], (Point{0.0, 0.0}));
  EXPECT_EQ(g.sigma, 0.05);
}

TEST(Data, DegenerateMixtureHitsCenters) {
  MixtureSpec r = ring8();
  r.sigma = 1e-12;
  const Tensor x = sample(r, 1000, 3);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = 1e9;
    for (const Point& c : r.centers) best = std::min(best, std::hypot(x.at(i, 0) - c[0], x.at(i, 1) - c[1]));
    EXPECT_LT(best, 1e-6);
  }
}

TEST(Data, LatentMoments) {
  const Tensor z = sample(LatentSpec{4, LatentKind::standard_normal}, 100000, 5);
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
      m += z.at(i, j);
      m2 += z.at(i, j) * z.at(i, j);
    }
    m /= 1e5;
    const double var = m2 / 1e5 - m * m;
    EXPECT_GT(m, -0.02);
    EXPECT_LT(m, 0.02);
    EXPECT_GT(var, 0.97);
    EXPECT_LT(var, 1.03);
  }
  const Tensor u = sample(LatentSpec{2, LatentKind::uniform}, 10000, 5);
  for (double v : u.data()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Data, SameSeedSameBatch) {
  EXPECT_TRUE(sample(ring8(), 64, 9).identical(sample(ring8(), 64, 9)));
  EXPECT_FALSE(sample(ring8(), 64, 9).identical(sample(ring8(), 64, 10)));
  EXPECT_TRUE(sample(LatentSpec{}, 64, 9).identical(sample(LatentSpec{}, 64, 9)));
}

// Pearson chi-squared statistic of component counts against the weights.
double chi_squared(const MixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "data");
  std::vector<double> counts(spec.centers.size(), 0.0);
  for (std::size_t k : sample_components(spec, n, rng)) counts[k] += 1.0;
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double expected = spec.weights[k] * static_cast<double>(n);
    stat += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  return stat;
}

TEST(Data, ComponentFrequenciesFitWeights) {
  // 0.999 quantiles of chi-squared with 7 and 24 degrees of freedom.
  constexpr double kCrit7 = 24.3219;
  constexpr double kCrit24 = 51.1786;
  for (std::uint64_t seed : {1, 2, 3}) {
    EXPECT_LT(chi_squared(ring8(), 100000, seed), kCrit7);
    EXPECT_LT(chi_squared(grid25(), 100000, seed), kCrit24);
  }
}

TEST(Data, ComponentsMatchSamples) {
  const MixtureSpec r = ring8();
  Rng a(4, "data"), b(4, "data");
  const std::vector<std::size_t> comps = sample_components(r, 500, a);
  const Tensor x = sample(r, 500, b);
  for (std::size_t i = 0; i < 500; ++i) {
    const Point& c = r.centers[comps[i]];
    EXPECT_LT(std::hypot(x.at(i, 0) - c[0], x.at(i, 1) - c[1]), 10 * r.sigma);
  }
}

TEST(Data, StreamsAreIndependent) {
  Rng data1(7, "data"), latent1(7, "latent");
  Rng data2(7, "data"), latent2(7, "latent");
  const Tensor x1 = sample(ring8(), 32, data1);
  const Tensor z1 = sample(LatentSpec{}, 32, latent1);
  // Consume the latent stream heavily first; the data stream is unaffected.
  sample(LatentSpec{}, 5000, latent2);
  const Tensor x2 = sample(ring8(), 32, data2);
  EXPECT_TRUE(x1.identical(x2));
  EXPECT_FALSE(z1.identical(sample(LatentSpec{}, 32, latent2)));
}

TEST(Data, Validation) {
  MixtureSpec m = ring8();
  m.weights[0] = 0.2;
  try {
    m.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "dataset.weights");
  }
  m = ring8();
  m.sigma = 0.0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = ring8();
  m.weights.pop_back();
  EXPECT_THROW(m.validate(), ConfigError);
  EXPECT_THROW(LatentSpec({0, LatentKind::uniform}).validate(), ConfigError);
  EXPECT_THROW(mixture_by_name("swissroll"), ConfigError);
  EXPECT_EQ(latent_kind_from_name(latent_kind_name(LatentKind::uniform)), LatentKind::uniform);
}

TEST(Rng, UniformAndBelow) {
  Rng r(1, "t");
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
  }
  EXPECT_NE(fnv1a64("data"), fnv1a64("latent"));
  Rng a(1, "x"), b(1, "x");
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

}  // namespace
}  // namespace tvgan::data
