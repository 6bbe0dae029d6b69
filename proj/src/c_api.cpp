// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/tvgan.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <iterator>
#include <new>
#include <string>

#include "tvgan/config.hpp"
#include "tvgan/error.hpp"
#include "tvgan/experiments.hpp"
#include "tvgan/train.hpp"

struct tvgan_config {
  tvgan::train::GanConfig value;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_field;

tvgan_status fail(tvgan_status status, std::string message, std::string field = {}) {
  g_error = std::move(message);
  g_error_field = std::move(field);
  return status;
}

template <typename F>
tvgan_status guarded(F&& body) {
  g_error.clear();
  g_error_field.clear();
  try {
    return body();
  } catch (const tvgan::ConfigError& e) {
    return fail(TVGAN_CONFIG, e.what(), e.field());
  } catch (const tvgan::IoError& e) {
    return fail(TVGAN_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(TVGAN_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TVGAN_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TVGAN_INTERNAL, e.what());
  } catch (...) {
    return fail(TVGAN_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tvgan_status missing(const char* what) { return fail(TVGAN_INVALID_ARGUMENT, std::string(what) + " is null"); }

}  // namespace

extern "C" {

const char* tvgan_version(void) { return "0.1.0"; }
const char* tvgan_last_error(void) { return g_error.c_str(); }
const char* tvgan_last_error_field(void) { return g_error_field.c_str(); }
void tvgan_string_free(char* s) { std::free(s); }

tvgan_status tvgan_config_from_preset(const char* name, tvgan_config** out) {
  if (name == nullptr) return missing("name");
  if (out == nullptr) return missing("out");
  return guarded([&] {
    *out = new tvgan_config{tvgan::config::preset(name)};
    return TVGAN_OK;
  });
}

tvgan_status tvgan_config_parse(const char* text, tvgan_config** out) {
  if (text == nullptr) return missing("text");
  if (out == nullptr) return missing("out");
  return guarded([&] {
    *out = new tvgan_config{tvgan::config::parse(text)};
    return TVGAN_OK;
  });
}

tvgan_status tvgan_config_load(const char* path, tvgan_config** out) {
  if (path == nullptr) return missing("path");
  if (out == nullptr) return missing("out");
  return guarded([&] {
    *out = new tvgan_config{tvgan::config::load(path)};
    return TVGAN_OK;
  });
}

tvgan_status tvgan_config_set(tvgan_config* config, const char* key, const char* value) {
  if (config == nullptr) return missing("config");
  if (key == nullptr) return missing("key");
  if (value == nullptr) return missing("value");
  return guarded([&] {
    tvgan::train::GanConfig updated = config->value;
    tvgan::config::set_field(updated, key, value);
    updated.validate();
    config->value = std::move(updated);
    return TVGAN_OK;
  });
}

tvgan_status tvgan_config_get(const tvgan_config* config, const char* key, char** out) {
  if (config == nullptr) return missing("config");
  if (key == nullptr) return missing("key");
  if (out == nullptr) return missing("out");
  return guarded([&] {
    *out = copy_string(tvgan::config::get_field(config->value, key));
    return TVGAN_OK;
  });
}

tvgan_status tvgan_config_serialize(const tvgan_config* config, char** out) {
  if (config == nullptr) return missing("config");
  if (out == nullptr) return missing("out");
  return guarded([&] {
    *out = copy_string(tvgan::config::serialize(config->value));
    return TVGAN_OK;
  });
}

void tvgan_config_free(tvgan_config* config) { delete config; }

size_t tvgan_preset_count(void) { return tvgan::config::presets().size(); }

tvgan_status tvgan_preset_info(size_t index, const char** name, const char** description) {
  const auto& presets = tvgan::config::presets();
  if (index >= presets.size()) return fail(TVGAN_INVALID_ARGUMENT, "preset index out of range");
  if (name != nullptr) *name = presets[index].name.c_str();
  if (description != nullptr) *description = presets[index].description.c_str();
  return TVGAN_OK;
}

tvgan_status tvgan_train(const tvgan_config* config, const char* out_dir, tvgan_run_summary* summary) {
  if (config == nullptr) return missing("config");
  if (out_dir == nullptr) return missing("out_dir");
  return guarded([&] {
    const tvgan::train::RunResult r = tvgan::train::run(config->value, out_dir);
    if (summary != nullptr) {
      *summary = tvgan_run_summary{};
      summary->exploded = r.exploded ? 1 : 0;
      summary->generator_steps = r.generator_steps;
      summary->critic_steps = r.critic_steps;
      summary->max_gap = r.max_gap;
      if (r.final_eval) {
        summary->has_eval = 1;
        summary->w1 = r.final_eval->w1;
        summary->w1_baseline = r.final_eval->w1_baseline;
        summary->modes_captured = r.final_eval->modes_captured;
        summary->is_analog_mean = r.final_eval->is_analog_mean;
        summary->is_analog_std = r.final_eval->is_analog_std;
      }
    }
    if (r.exploded) return fail(TVGAN_EXPLODED, "training exploded: " + r.explosion_reason);
    return TVGAN_OK;
  });
}

tvgan_status tvgan_sweep(const tvgan_config* base, const char* param, const char* const* values, size_t n_values,
                         const uint64_t* seeds, size_t n_seeds, const char* out_dir, size_t workers,
                         char** aggregate_csv) {
  if (base == nullptr) return missing("base");
  if (param == nullptr) return missing("param");
  if (values == nullptr && n_values > 0) return missing("values");
  if (seeds == nullptr && n_seeds > 0) return missing("seeds");
  if (out_dir == nullptr) return missing("out_dir");
  return guarded([&] {
    std::vector<std::string> vs;
    for (size_t i = 0; i < n_values; ++i) {
      if (values[i] == nullptr) return missing("values[i]");
      vs.emplace_back(values[i]);
    }
    const std::vector<std::uint64_t> ss(seeds, seeds + n_seeds);
    tvgan::experiments::sweep(base->value, param, vs, ss, out_dir, workers);
    if (aggregate_csv != nullptr) {
      std::ifstream in(std::filesystem::path(out_dir) / "aggregate.csv", std::ios::binary);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      *aggregate_csv = copy_string(text);
    }
    return TVGAN_OK;
  });
}

tvgan_status tvgan_compare(const char* const* models, size_t n_models, const tvgan_scenario* scenarios,
                           size_t n_scenarios, const uint64_t* seeds, size_t n_seeds, int64_t steps,
                           const char* out_dir, size_t workers, char** ranking_csv) {
  if (models == nullptr && n_models > 0) return missing("models");
  if (scenarios == nullptr && n_scenarios > 0) return missing("scenarios");
  if (seeds == nullptr && n_seeds > 0) return missing("seeds");
  if (out_dir == nullptr) return missing("out_dir");
  return guarded([&] {
    std::vector<std::string> ms;
    for (size_t i = 0; i < n_models; ++i) {
      if (models[i] == nullptr) return missing("models[i]");
      ms.emplace_back(models[i]);
    }
    std::vector<tvgan::experiments::Scenario> sc;
    for (size_t i = 0; i < n_scenarios; ++i) sc.push_back({scenarios[i].homogeneous != 0, scenarios[i].lr});
    const std::vector<std::uint64_t> ss(seeds, seeds + n_seeds);
    const auto result = tvgan::experiments::compare(ms, sc, ss, steps, out_dir, workers);
    if (ranking_csv != nullptr) *ranking_csv = copy_string(result.ranking);
    return TVGAN_OK;
  });
}

tvgan_status tvgan_plotdata(const char* run_dir, const char* kind, char** table) {
  if (run_dir == nullptr) return missing("run_dir");
  if (kind == nullptr) return missing("kind");
  if (table == nullptr) return missing("table");
  return guarded([&] {
    *table = copy_string(tvgan::experiments::plotdata(run_dir, kind));
    return TVGAN_OK;
  });
}

tvgan_status tvgan_eval(const char* run_dir, size_t workers, char** jsonl) {
  if (run_dir == nullptr) return missing("run_dir");
  if (jsonl == nullptr) return missing("jsonl");
  return guarded([&] {
    std::string lines;
    for (const auto& r : tvgan::experiments::evaluate_run(run_dir, workers)) lines += r.to_json() + '\n';
    *jsonl = copy_string(lines);
    return TVGAN_OK;
  });
}

}  // extern "C"
