// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Flat JSON run configuration. Every key is optional; absent keys keep the
// defaults below, unknown keys are rejected.
//
//   model:   feat_channels, num_blocks, num_layers, hidden, mode,
//            init_positional, omega0
//   train:   scales, patch_base, batch_hr, epochs, steps, lr0, halve_every,
//            flip_prob, antialias
//   metrics: y_channel, crop_border, quantize
//   run:     seed (model init and sampling), threads (0 = OpenMP default)

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "diinn/metrics.hpp"
#include "diinn/model.hpp"
#include "diinn/train.hpp"

namespace diinn {

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  MetricOptions metrics;
  std::uint64_t seed = 0;
  int threads = 0;
};

nlohmann::json model_config_to_json(const ModelConfig& cfg);
/// Reads the model keys of `j`; other keys are ignored.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

nlohmann::json to_json(const RunConfig& cfg);
/// Throws ConfigError on unknown keys or wrong value types.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

RunConfig parse_run_config(const std::string& text);
std::string emit_run_config(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace diinn
