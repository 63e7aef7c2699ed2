// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace diinn {

using nlohmann::json;

namespace {

const std::set<std::string> kModelKeys = {"feat_channels", "num_blocks",     "num_layers",
                                          "hidden",        "mode",           "init_positional",
                                          "omega0"};
const std::set<std::string> kOtherKeys = {
    "scales",    "patch_base", "batch_hr",  "epochs",      "steps",    "lr0",
    "halve_every", "flip_prob", "antialias", "y_channel", "crop_border", "quantize",
    "seed",      "threads"};

template <class V>
void read(const json& j, const char* key, V& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

json model_config_to_json(const ModelConfig& cfg) {
  return json{{"feat_channels", cfg.encoder.feat_channels},
              {"num_blocks", cfg.encoder.num_blocks},
              {"num_layers", cfg.decoder.num_layers},
              {"hidden", cfg.decoder.hidden},
              {"mode", to_string(cfg.decoder.mode)},
              {"init_positional", cfg.decoder.init_positional},
              {"omega0", cfg.decoder.omega0}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig base) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  read(j, "feat_channels", base.encoder.feat_channels);
  read(j, "num_blocks", base.encoder.num_blocks);
  read(j, "num_layers", base.decoder.num_layers);
  read(j, "hidden", base.decoder.hidden);
  read(j, "init_positional", base.decoder.init_positional);
  read(j, "omega0", base.decoder.omega0);
  if (auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("config key 'mode' must be a string");
    base.decoder.mode = parse_modulation_input(it->get<std::string>());
  }
  return base;
}

json to_json(const RunConfig& cfg) {
  json j = model_config_to_json(cfg.model);
  j["scales"] = cfg.train.scales;
  j["patch_base"] = cfg.train.patch_base;
  j["batch_hr"] = cfg.train.batch_hr;
  j["epochs"] = cfg.train.epochs;
  j["steps"] = cfg.train.steps;
  j["lr0"] = cfg.train.lr0;
  j["halve_every"] = cfg.train.halve_every;
  j["flip_prob"] = cfg.train.flip_prob;
  j["antialias"] = cfg.train.antialias;
  j["y_channel"] = cfg.metrics.y_channel;
  j["crop_border"] = cfg.metrics.crop_border;
  j["quantize"] = cfg.metrics.quantize;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  return j;
}

RunConfig run_config_from_json(const json& j, RunConfig base) {
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, value] : j.items())
    if (!kModelKeys.count(key) && !kOtherKeys.count(key))
      throw ConfigError("unknown config key '" + key + "'");
  base.model = model_config_from_json(j, base.model);
  read(j, "scales", base.train.scales);
  read(j, "patch_base", base.train.patch_base);
  read(j, "batch_hr", base.train.batch_hr);
  read(j, "epochs", base.train.epochs);
  read(j, "steps", base.train.steps);
  read(j, "lr0", base.train.lr0);
  read(j, "halve_every", base.train.halve_every);
  read(j, "flip_prob", base.train.flip_prob);
  read(j, "antialias", base.train.antialias);
  read(j, "y_channel", base.metrics.y_channel);
  read(j, "crop_border", base.metrics.crop_border);
  read(j, "quantize", base.metrics.quantize);
  read(j, "seed", base.seed);
  read(j, "threads", base.threads);
  base.model.seed = base.seed;
  base.train.seed = base.seed;
  validate(base.model);
  validate(base.train);
  return base;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

std::string emit_run_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << emit_run_config(cfg);
}

}  // namespace diinn
