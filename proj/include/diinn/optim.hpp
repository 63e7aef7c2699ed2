// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "diinn/tensor.hpp"

namespace diinn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moments per parameter tensor plus the shared step count.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<float>> m, v;
};

/// Bias-corrected Adam update, applied in place:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
///   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
/// The moments are sized lazily on the first call.
template <class T>
void adam_step(std::vector<Tensor<T>*> params, AdamState& state, double lr,
               const AdamConfig& cfg = {}) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), {});
    state.v.assign(params.size(), {});
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i]->numel(), 0.0f);
      state.v[i].assign(params[i]->numel(), 0.0f);
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    if (!p.requires_grad()) continue;
    if (state.m[i].size() != p.numel())
      throw DimensionError("adam_step: optimizer state does not match parameter " +
                           std::to_string(i));
    auto g = p.grad();
    auto data = p.data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double gk = double(g[k]);
      m[k] = float(cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gk);
      v[k] = float(cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gk * gk);
      const double mhat = m[k] / c1, vhat = v[k] / c2;
      data[k] = T(double(data[k]) - lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

}  // namespace diinn
