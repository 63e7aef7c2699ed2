// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "diinn/data.hpp"
#include "diinn/model.hpp"
#include "diinn/optim.hpp"

namespace diinn {

/// Progress counters; enough to resume a run mid-epoch with identical batches.
struct TrainMeta {
  std::uint64_t epoch = 0;       // completed epochs
  std::uint64_t step = 0;        // optimizer steps taken in total
  std::uint64_t epoch_step = 0;  // steps taken inside the current epoch
  double epoch_loss_sum = 0.0;
  double last_loss = std::numeric_limits<double>::quiet_NaN();
  double best_loss = std::numeric_limits<double>::infinity();
  bool antialias = true;
};

struct TrainState {
  Model<float> model;
  AdamState optimizer;
  TrainMeta meta;
};

struct StepLog {
  std::uint64_t epoch = 0, step = 0;
  double loss = 0.0, lr = 0.0;
};

struct EpochLog {
  std::uint64_t epoch = 0, steps = 0;
  double mean_loss = 0.0, lr = 0.0;
};

struct TrainHooks {
  std::function<void(const StepLog&)> on_step;
  /// Called after each completed epoch; `best` is set when mean_loss improved.
  std::function<void(const TrainState&, const EpochLog&, bool best)> on_epoch_end;
};

/// One Adam step on the given pairs; the loss is the L1 mean over every
/// predicted value of every pair. Returns the loss before the update.
double train_step(TrainState& state, const std::vector<TrainPair>& pairs, double lr);

/// Runs epochs until cfg.epochs are complete or cfg.steps total steps are
/// taken. An epoch is one pass over the images in a seeded shuffled order,
/// batch_hr images per step. Batch content depends only on (seed, epoch,
/// step). Throws NumericalError on a non-finite loss.
std::vector<EpochLog> train(TrainState& state, const DatasetFolder& data, const TrainConfig& cfg,
                            const TrainHooks& hooks = {});

}  // namespace diinn
