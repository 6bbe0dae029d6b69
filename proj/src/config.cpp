// Copyright 2026 The tvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvgan/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "tvgan/error.hpp"
#include "tvgan/format.hpp"

namespace tvgan::config {

namespace {

using train::GanConfig;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view v) {
  T out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(std::string(key), "expected a nonnegative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(v) + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

const std::vector<std::string>& keys() {
  static const std::vector<std::string> k = {
      "name",          "objective",     "regularizer",   "lambda",        "delta",
      "clip",          "tv_pairing",    "dataset",       "latent_dim",    "latent_kind",
      "homogeneous",   "critic_batchnorm", "hidden_width", "hidden_layers", "batch_size",
      "n_critic",      "steps",         "optimizer",     "lr_generator",  "lr_critic",
      "beta1",         "beta2",         "seed",          "metrics_every", "checkpoint_every",
      "probe_size",    "eval_samples"};
  return k;
}

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> k = {"dataset", "regularizer", "steps"};
  return k;
}

void set_field(GanConfig& c, std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (key == "name") {
    if (v.empty()) throw ConfigError("name", "must not be empty");
    c.name = std::string(v);
  } else if (key == "objective") {
    c.objective = train::objective_from_name(v);
  } else if (key == "regularizer") {
    c.loss.regularizer = losses::regularizer_from_name(v);
  } else if (key == "lambda") {
    c.loss.lambda = parse_double(key, v);
  } else if (key == "delta") {
    c.loss.delta = parse_double(key, v);
  } else if (key == "clip") {
    c.loss.clip = parse_double(key, v);
  } else if (key == "tv_pairing") {
    c.loss.pairing = losses::pairing_from_name(v);
  } else if (key == "dataset") {
    data::mixture_by_name(v);
    c.dataset = std::string(v);
  } else if (key == "latent_dim") {
    c.latent.dim = parse_integer<std::size_t>(key, v);
  } else if (key == "latent_kind") {
    c.latent.kind = data::latent_kind_from_name(v);
  } else if (key == "homogeneous") {
    c.homogeneous = parse_bool(key, v);
  } else if (key == "critic_batchnorm") {
    c.critic_norm = train::critic_norm_from_name(v);
  } else if (key == "hidden_width") {
    c.hidden_width = parse_integer<std::size_t>(key, v);
  } else if (key == "hidden_layers") {
    c.hidden_layers = parse_integer<std::size_t>(key, v);
  } else if (key == "batch_size") {
    c.batch_size = parse_integer<std::size_t>(key, v);
  } else if (key == "n_critic") {
    c.n_critic = parse_integer<std::size_t>(key, v);
  } else if (key == "steps") {
    c.steps = parse_integer<std::int64_t>(key, v);
  } else if (key == "optimizer") {
    c.optimizer = train::optimizer_from_name(v);
  } else if (key == "lr_generator") {
    c.lr_generator = parse_double(key, v);
  } else if (key == "lr_critic") {
    c.lr_critic = parse_double(key, v);
  } else if (key == "beta1") {
    c.beta1 = parse_double(key, v);
  } else if (key == "beta2") {
    c.beta2 = parse_double(key, v);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, v);
  } else if (key == "metrics_every") {
    c.metrics_every = parse_integer<std::size_t>(key, v);
  } else if (key == "checkpoint_every") {
    c.checkpoint_every = parse_integer<std::size_t>(key, v);
  } else if (key == "probe_size") {
    c.probe_size = parse_integer<std::size_t>(key, v);
  } else if (key == "eval_samples") {
    c.eval_samples = parse_integer<std::size_t>(key, v);
  } else {
    throw ConfigError(std::string(key), "unknown field");
  }
}

std::string get_field(const GanConfig& c, std::string_view key) {
  if (key == "name") return c.name;
  if (key == "objective") return std::string(train::objective_name(c.objective));
  if (key == "regularizer") return std::string(losses::regularizer_name(c.loss.regularizer));
  if (key == "lambda") return format_double(c.loss.lambda);
  if (key == "delta") return format_double(c.loss.delta);
  if (key == "clip") return format_double(c.loss.clip);
  if (key == "tv_pairing") return std::string(losses::pairing_name(c.loss.pairing));
  if (key == "dataset") return c.dataset;
  if (key == "latent_dim") return std::to_string(c.latent.dim);
  if (key == "latent_kind") return std::string(data::latent_kind_name(c.latent.kind));
  if (key == "homogeneous") return bool_str(c.homogeneous);
  if (key == "critic_batchnorm") return std::string(train::critic_norm_name(c.critic_norm));
  if (key == "hidden_width") return std::to_string(c.hidden_width);
  if (key == "hidden_layers") return std::to_string(c.hidden_layers);
  if (key == "batch_size") return std::to_string(c.batch_size);
  if (key == "n_critic") return std::to_string(c.n_critic);
  if (key == "steps") return std::to_string(c.steps);
  if (key == "optimizer") return std::string(train::optimizer_name(c.optimizer));
  if (key == "lr_generator") return format_double(c.lr_generator);
  if (key == "lr_critic") return format_double(c.lr_critic);
  if (key == "beta1") return format_double(c.beta1);
  if (key == "beta2") return format_double(c.beta2);
  if (key == "seed") return std::to_string(c.seed);
  if (key == "metrics_every") return std::to_string(c.metrics_every);
  if (key == "checkpoint_every") return std::to_string(c.checkpoint_every);
  if (key == "probe_size") return std::to_string(c.probe_size);
  if (key == "eval_samples") return std::to_string(c.eval_samples);
  throw ConfigError(std::string(key), "unknown field");
}

GanConfig parse(std::string_view text) {
  GanConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "missing key");
    if (seen.contains(key)) throw ConfigError(std::string(key), "set more than once");
    set_field(c, key, line.substr(eq + 1));
    seen.emplace(key);
  }
  for (const std::string& k : required_keys()) {
    if (!seen.contains(k)) throw ConfigError(k, "required field is missing");
  }
  c.validate();
  return c;
}

GanConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string serialize(const GanConfig& c) {
  std::string out = "# tvgan config\n";
  for (const std::string& k : keys()) out += k + " = " + get_field(c, k) + "\n";
  return out;
}

// ---- presets ---------------------------------------------------------------

namespace {

GanConfig ring8_base(std::string name, losses::Regularizer reg) {
  GanConfig c;
  c.name = std::move(name);
  c.dataset = "ring8";
  c.loss.regularizer = reg;
  return c;
}

std::vector<Preset> make_presets() {
  std::vector<Preset> out;
  {
    GanConfig c = ring8_base("tv-ring8", losses::Regularizer::tv);
    c.loss.lambda = 1.0;
    c.loss.delta = 5.0;
    out.push_back({c.name, "WGAN with the TV margin penalty (lambda 1, delta 5), normalized nets, ring of 8", c});
  }
  {
    GanConfig c = ring8_base("gp-ring8", losses::Regularizer::gp);
    c.loss.lambda = 10.0;
    out.push_back({c.name, "WGAN with gradient penalty (lambda 10), unnormalized critic, ring of 8", c});
  }
  {
    GanConfig c = ring8_base("clip-ring8", losses::Regularizer::clip);
    c.loss.clip = 0.01;
    out.push_back({c.name, "WGAN with weight clipping at 0.01, ring of 8", c});
  }
  {
    GanConfig c = ring8_base("none-ring8", losses::Regularizer::none);
    out.push_back({c.name, "unregularized WGAN objective, ring of 8", c});
  }
  {
    GanConfig c = ring8_base("vanilla-ring8", losses::Regularizer::none);
    c.objective = train::Objective::vanilla;
    out.push_back({c.name, "non-saturating GAN with a sigmoid cross-entropy critic, ring of 8", c});
  }
  {
    GanConfig c = ring8_base("tv-grid25", losses::Regularizer::tv);
    c.dataset = "grid25";
    c.loss.lambda = 1.0;
    c.loss.delta = 5.0;
    out.push_back({c.name, "TV margin penalty on the 5x5 grid of Gaussians", c});
  }
  for (Preset& p : out) p.config.validate();
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = make_presets();
  return p;
}

GanConfig preset(std::string_view name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p.config;
  }
  const std::string full = std::string(name) + "-ring8";
  for (const Preset& p : presets()) {
    if (p.name == full) return p.config;
  }
  std::string known;
  for (const Preset& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace tvgan::config
