// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "diinn/params.hpp"

namespace diinn {

/// Residual convolutional encoder: conv3x3 head, `num_blocks` blocks of
/// conv3x3-relu-conv3x3 with an additive skip, conv3x3 tail. Padding 1
/// everywhere, so the feature map keeps the input's spatial size.
struct EncoderConfig {
  std::size_t in_channels = 3;
  std::size_t feat_channels = 64;
  std::size_t num_blocks = 4;
  std::size_t kernel = 3;
};

void validate(const EncoderConfig& cfg);

/// Parameter names are "enc.head.*", "enc.block<k>.conv{1,2}.*", "enc.tail.*".
std::vector<ParamSpec> encoder_param_specs(const EncoderConfig& cfg);

template <class T>
Var<T> encode(Var<T> img, const BoundParams<T>& params, const EncoderConfig& cfg);

}  // namespace diinn
