// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Flat `key = value` configuration files. `#` starts a comment; blank lines
// are ignored. Keys are the names listed by config::keys(). serialize()
// writes every key in that order, so serialize(parse(serialize(c))) is
// byte-identical to serialize(c).

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tvgan/train.hpp"

namespace tvgan::config {

const std::vector<std::string>& keys();
// Keys a config file must set explicitly.
const std::vector<std::string>& required_keys();

// Parses and validates. Throws ConfigError naming the offending field.
train::GanConfig parse(std::string_view text);
train::GanConfig load(const std::filesystem::path& path);
std::string serialize(const train::GanConfig& config);

// Sets one field from its textual form, without validating the whole config.
void set_field(train::GanConfig& config, std::string_view key, std::string_view value);
std::string get_field(const train::GanConfig& config, std::string_view key);

struct Preset {
  std::string name;
  std::string description;
  train::GanConfig config;
};

const std::vector<Preset>& presets();
// Accepts a full preset name ("tv-ring8") or a model shorthand ("tv", "gp",
// "clip", "none", "vanilla") meaning the ring8 preset of that model.
train::GanConfig preset(std::string_view name);

}  // namespace tvgan::config
