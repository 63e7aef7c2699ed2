// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace diinn {

namespace {

Tensor<float> stack(const std::vector<const Tensor<float>*>& items) {
  const Shape& s = items.front()->shape();
  Tensor<float> out({items.size(), s[0], s[1], s[2]});
  const std::size_t n = items.front()->numel();
  for (std::size_t i = 0; i < items.size(); ++i)
    std::copy_n(items[i]->data().data(), n, out.data().data() + i * n);
  return out;
}

}  // namespace

double train_step(TrainState& state, const std::vector<TrainPair>& pairs, double lr) {
  if (pairs.empty()) throw ArgumentError("train_step: no training pairs");
  // Pairs with equal LR/HR sizes share one batched forward pass.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const TrainPair*>> groups;
  std::size_t total = 0;
  for (const auto& p : pairs) {
    groups[{p.lr.dim(1), p.hr.dim(1)}].push_back(&p);
    total += p.hr.numel();
  }

  auto& params = state.model.params;
  for (auto& e : params.entries())
    if (!e.second.requires_grad()) e.second.set_requires_grad(true);
  params.zero_grad();

  Tape<float> tape;
  Var<float> loss;
  for (const auto& [key, members] : groups) {
    std::vector<const Tensor<float>*> lrs, hrs;
    std::size_t n = 0;
    for (const auto* p : members) {
      lrs.push_back(&p->lr);
      hrs.push_back(&p->hr);
      n += p->hr.numel();
    }
    Var<float> pred = forward(tape, state.model, tape.constant(stack(lrs)), key.second, key.second);
    Var<float> part = scale(l1_loss(pred, tape.constant(stack(hrs))), float(double(n) / double(total)));
    loss = loss.tape ? add(loss, part) : part;
  }
  const double value = loss.value()[0];
  if (!std::isfinite(value))
    throw NumericalError("non-finite training loss at step " + std::to_string(state.meta.step));
  tape.backward(loss);
  adam_step(params.pointers(), state.optimizer, lr);
  return value;
}

std::vector<EpochLog> train(TrainState& state, const DatasetFolder& data, const TrainConfig& cfg,
                            const TrainHooks& hooks) {
  validate(cfg);
  if (data.empty()) throw ArgumentError("train: dataset is empty");
  const Rng root(cfg.seed);
  const std::size_t n = data.size();
  const std::size_t steps_per_epoch = (n + cfg.batch_hr - 1) / cfg.batch_hr;
  auto& meta = state.meta;
  meta.antialias = cfg.antialias;

  std::vector<EpochLog> log;
  auto capped = [&] { return cfg.steps > 0 && meta.step >= cfg.steps; };
  while (meta.epoch < cfg.epochs && !capped()) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = root.stream("shuffle", meta.epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    const double lr = learning_rate(cfg, meta.epoch);

    for (; meta.epoch_step < steps_per_epoch; ) {
      if (capped()) return log;
      const std::size_t begin = meta.epoch_step * cfg.batch_hr;
      const std::size_t end = std::min(n, begin + cfg.batch_hr);
      std::vector<std::size_t> idx(order.begin() + std::ptrdiff_t(begin),
                                   order.begin() + std::ptrdiff_t(end));
      Rng batch_rng = root.stream("batch", meta.step);
      const auto pairs = sample_batch(data, idx, cfg, batch_rng);
      const double loss = train_step(state, pairs, lr);
      ++meta.step;
      ++meta.epoch_step;
      meta.epoch_loss_sum += loss;
      meta.last_loss = loss;
      if (hooks.on_step) hooks.on_step({meta.epoch, meta.step, loss, lr});
    }

    EpochLog e{meta.epoch, steps_per_epoch, meta.epoch_loss_sum / double(steps_per_epoch), lr};
    const bool best = e.mean_loss < meta.best_loss;
    if (best) meta.best_loss = e.mean_loss;
    ++meta.epoch;
    meta.epoch_step = 0;
    meta.epoch_loss_sum = 0.0;
    log.push_back(e);
    if (hooks.on_epoch_end) hooks.on_epoch_end(state, e, best);
  }
  return log;
}

}  // namespace diinn
