// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end super-resolution network:
//   z   = unfold3(encode(lr))              content features at LR resolution
//   z'  = nearest_upsample(z, out)         one feature vector per output pixel
//   p   = (local_x, local_y, 1/s)          positional features of the output grid
//   out = decode(z', p)
// The scale is always derived from the requested output size.

#pragma once

#include <cstdint>
#include <vector>

#include "diinn/decoder.hpp"
#include "diinn/encoder.hpp"
#include "diinn/image.hpp"

namespace diinn {

struct ModelConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  std::uint64_t seed = 0;

  /// Decoder input width: 9 x encoder feature channels (3x3 unfolding).
  std::size_t content_channels() const { return 9 * encoder.feat_channels; }
};

void validate(const ModelConfig& cfg);

std::vector<ParamSpec> model_param_specs(const ModelConfig& cfg);

template <class T>
struct Model {
  ModelConfig config;
  ParamSet<T> params;

  /// Fresh weights drawn from the "init" stream of config.seed.
  static Model initialize(const ModelConfig& cfg);

  template <class U>
  Model<U> cast() const {
    return Model<U>{config, params.template cast<U>()};
  }
};

/// Differentiable forward pass for a batch of LR images [B,3,h,w] to
/// [B,3,out_h,out_w]. Requires out_h >= h and out_w >= w.
template <class T>
Var<T> forward(Tape<T>& tape, Model<T>& model, Var<T> lr, std::size_t out_h, std::size_t out_w);

/// Inference without gradients, decoded in row bands. Returns [3,out_h,out_w]
/// unclamped.
Tensor<float> predict(const Model<float>& model, const Tensor<float>& lr, std::size_t out_h,
                      std::size_t out_w);

/// predict() on an image, clamped to [0,1].
ImageRGB super_resolve(const Model<float>& model, const ImageRGB& lr, std::size_t out_h,
                       std::size_t out_w);

}  // namespace diinn
