// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "diinn/tape.hpp"

namespace diinn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Builds the scalar loss on a fresh tape. Parameters must be bound with
/// Tape::parameter so that backward() reaches them.
using LossBuilder = std::function<Var<double>(Tape<double>&)>;

/// Analytic gradients of `loss` w.r.t. `params` via one backward pass.
std::vector<std::vector<double>> analytic_gradients(const LossBuilder& loss,
                                                    const std::vector<Tensor<double>*>& params);

/// Compares `analytic` against central differences with step h:
///   max |a - cd| / max(|a|, |cd|, 1e-8)
GradCheckReport compare_gradients(const LossBuilder& loss,
                                  const std::vector<Tensor<double>*>& params,
                                  const std::vector<std::vector<double>>& analytic, double h);

/// analytic_gradients + compare_gradients.
GradCheckReport grad_check(const LossBuilder& loss, const std::vector<Tensor<double>*>& params,
                           double h = 1e-3);

}  // namespace diinn
