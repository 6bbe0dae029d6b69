// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "tvgan/tvgan.h"

namespace {

namespace fs = std::filesystem;

constexpr const char* kSmall =
    "dataset = ring8\n"
    "regularizer = tv\n"
    "steps = 4\n"
    "hidden_width = 16\n"
    "hidden_layers = 2\n"
    "batch_size = 16\n"
    "n_critic = 2\n"
    "metrics_every = 2\n"
    "checkpoint_every = 2\n"
    "probe_size = 16\n"
    "eval_samples = 100\n";

// Critic scores grow without bound under plain SGD at this step size.
constexpr const char* kExploding =
    "dataset = ring8\n"
    "regularizer = none\n"
    "homogeneous = true\n"
    "optimizer = sgd\n"
    "lr_critic = 1000\n"
    "steps = 200\n"
    "hidden_width = 16\n"
    "hidden_layers = 2\n"
    "batch_size = 16\n"
    "metrics_every = 1\n"
    "probe_size = 16\n"
    "eval_samples = 100\n";

std::string take(char* s) {
  std::string out = s ? s : "";
  tvgan_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tvgan_c_api_" + name);
  fs::remove_all(p);
  return p;
}

TEST(CApi, VersionAndPresets) {
  EXPECT_NE(std::string(tvgan_version()), "");
  ASSERT_GE(tvgan_preset_count(), 6u);
  const char* name = nullptr;
  const char* description = nullptr;
  ASSERT_EQ(tvgan_preset_info(0, &name, &description), TVGAN_OK);
  EXPECT_EQ(std::string(name), "tv-ring8");
  EXPECT_EQ(tvgan_preset_info(tvgan_preset_count(), &name, &description), TVGAN_INVALID_ARGUMENT);
}

TEST(CApi, ConfigLifecycle) {
  tvgan_config* c = nullptr;
  ASSERT_EQ(tvgan_config_from_preset("tv-ring8", &c), TVGAN_OK);
  char* v = nullptr;
  ASSERT_EQ(tvgan_config_get(c, "delta", &v), TVGAN_OK);
  EXPECT_EQ(take(v), "5");
  ASSERT_EQ(tvgan_config_set(c, "delta", "10"), TVGAN_OK);
  EXPECT_EQ(tvgan_config_set(c, "delta", "-3"), TVGAN_CONFIG);
  EXPECT_EQ(std::string(tvgan_last_error_field()), "delta");
  ASSERT_EQ(tvgan_config_get(c, "delta", &v), TVGAN_OK);
  EXPECT_EQ(take(v), "10");  // a rejected set leaves the config unchanged
  char* text = nullptr;
  ASSERT_EQ(tvgan_config_serialize(c, &text), TVGAN_OK);
  const std::string serialized = take(text);
  EXPECT_NE(serialized.find("\ndelta = 10\n"), std::string::npos);
  tvgan_config* back = nullptr;
  ASSERT_EQ(tvgan_config_parse(serialized.c_str(), &back), TVGAN_OK);
  ASSERT_EQ(tvgan_config_serialize(back, &text), TVGAN_OK);
  EXPECT_EQ(take(text), serialized);
  tvgan_config_free(back);
  tvgan_config_free(c);
  tvgan_config_free(nullptr);
}

TEST(CApi, ErrorsCarryStatusAndField) {
  tvgan_config* c = nullptr;
  EXPECT_EQ(tvgan_config_parse("regularizer = tv\nsteps = 1\n", &c), TVGAN_CONFIG);
  EXPECT_EQ(c, nullptr);
  EXPECT_EQ(std::string(tvgan_last_error_field()), "dataset");
  EXPECT_NE(std::string(tvgan_last_error()).find("dataset"), std::string::npos);
  EXPECT_EQ(tvgan_config_from_preset("nope", &c), TVGAN_CONFIG);
  EXPECT_EQ(tvgan_config_from_preset(nullptr, &c), TVGAN_INVALID_ARGUMENT);
  EXPECT_EQ(tvgan_config_load("/nonexistent/tvgan.cfg", &c), TVGAN_IO);
  EXPECT_EQ(tvgan_plotdata("/nonexistent/run", "loss", nullptr), TVGAN_INVALID_ARGUMENT);
  char* table = nullptr;
  EXPECT_EQ(tvgan_plotdata("/nonexistent/run", "loss", &table), TVGAN_IO);
}

TEST(CApi, TrainPlotAndEvaluate) {
  tvgan_config* c = nullptr;
  ASSERT_EQ(tvgan_config_parse(kSmall, &c), TVGAN_OK);
  const fs::path dir = scratch("train");
  tvgan_run_summary s{};
  ASSERT_EQ(tvgan_train(c, dir.c_str(), &s), TVGAN_OK) << tvgan_last_error();
  EXPECT_EQ(s.exploded, 0);
  EXPECT_EQ(s.generator_steps, 4);
  EXPECT_EQ(s.critic_steps, 8);
  EXPECT_EQ(s.has_eval, 1);
  EXPECT_GT(s.w1, 0.0);
  EXPECT_GT(s.w1_baseline, 0.0);

  char* table = nullptr;
  ASSERT_EQ(tvgan_plotdata(dir.c_str(), "loss", &table), TVGAN_OK);
  const std::string loss = take(table);
  EXPECT_EQ(loss.rfind("step,L_D,L_G\n", 0), 0u);
  ASSERT_EQ(tvgan_plotdata(dir.c_str(), "scatter", &table), TVGAN_OK);
  const std::string scatter = take(table);
  EXPECT_EQ(std::count(scatter.begin(), scatter.end(), '\n'), 101);
  EXPECT_EQ(tvgan_plotdata(dir.c_str(), "violin", &table), TVGAN_CONFIG);
  EXPECT_EQ(std::string(tvgan_last_error_field()), "kind");

  char* jsonl = nullptr;
  ASSERT_EQ(tvgan_eval(dir.c_str(), 1, &jsonl), TVGAN_OK);
  const std::string lines = take(jsonl);
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 3);  // ckpt_0, ckpt_2, ckpt_4
  EXPECT_EQ(lines.rfind("{\"checkpoint\":\"ckpt_0.bin\"", 0), 0u);
  tvgan_config_free(c);
  fs::remove_all(dir);
}

TEST(CApi, ExplosionHasItsOwnStatus) {
  tvgan_config* c = nullptr;
  ASSERT_EQ(tvgan_config_parse(kExploding, &c), TVGAN_OK);
  const fs::path dir = scratch("exploding");
  tvgan_run_summary s{};
  EXPECT_EQ(tvgan_train(c, dir.c_str(), &s), TVGAN_EXPLODED);
  EXPECT_EQ(s.exploded, 1);
  EXPECT_EQ(s.has_eval, 0);
  EXPECT_LT(s.generator_steps, 200);
  tvgan_config_free(c);
  fs::remove_all(dir);
}

TEST(CApi, SweepOfRepeatedValueGivesIdenticalRows) {
  tvgan_config* c = nullptr;
  ASSERT_EQ(tvgan_config_parse(kSmall, &c), TVGAN_OK);
  const fs::path dir = scratch("sweep");
  const char* values[] = {"5", "5"};
  const uint64_t seeds[] = {3};
  char* csv = nullptr;
  ASSERT_EQ(tvgan_sweep(c, "delta", values, 2, seeds, 1, dir.c_str(), 1, &csv), TVGAN_OK) << tvgan_last_error();
  const std::string table = take(csv);
  const std::size_t l1 = table.find('\n'), l2 = table.find('\n', l1 + 1), l3 = table.find('\n', l2 + 1);
  ASSERT_NE(l3, std::string::npos);
  EXPECT_EQ(table.substr(l1 + 1, l2 - l1), table.substr(l2 + 1, l3 - l2));
  const char* one[] = {"5"};
  EXPECT_EQ(tvgan_sweep(c, "delta", one, 1, seeds, 1, dir.c_str(), 1, nullptr), TVGAN_CONFIG);
  tvgan_config_free(c);
  fs::remove_all(dir);
}

TEST(CApi, CompareWritesRanking) {
  const fs::path dir = scratch("compare");
  const char* models[] = {"tv", "none"};
  const tvgan_scenario scenarios[] = {{0, 1e-4}};
  const uint64_t seeds[] = {1};
  char* csv = nullptr;
  ASSERT_EQ(tvgan_compare(models, 2, scenarios, 1, seeds, 1, 3, dir.c_str(), 1, &csv), TVGAN_OK)
      << tvgan_last_error();
  const std::string ranking = take(csv);
  EXPECT_EQ(std::count(ranking.begin(), ranking.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(dir / "compare.csv"));
  fs::remove_all(dir);
}

}  // namespace
