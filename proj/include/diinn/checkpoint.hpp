// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Binary checkpoint layout (all integers and reals little-endian):
//
//   "DIINNCKP"                      8-byte magic
//   u32 version                     kCheckpointVersion
//   u32 n, n bytes                  JSON header {"model": {...}, "meta": {...}}
//   u32 tensor count
//   per tensor: u32 name length, name, u32 rank, rank x u32 dims,
//               numel x f32 row-major data
//   u8 has_optimizer
//   if set: u64 step, then per tensor numel x f32 m, numel x f32 v
//
// Anything after the optimizer block is treated as corruption.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "diinn/train.hpp"

namespace diinn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Model<float> model;
  bool has_optimizer = false;
  AdamState optimizer;
  TrainMeta meta;
};

Checkpoint make_checkpoint(const TrainState& state);
TrainState to_train_state(Checkpoint ckpt);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
/// Throws CorruptCheckpointError, CheckpointVersionError or SchemaError.
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
void save_checkpoint(const Model<float>& model, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace diinn
