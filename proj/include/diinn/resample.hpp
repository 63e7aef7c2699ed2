// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "diinn/kernels.hpp"
#include "diinn/tensor.hpp"

namespace diinn {

/// Cubic convolution kernel. With antialias on, a downscale by s < 1 stretches
/// the kernel by 1/s and renormalizes (low-pass before decimation). Upscaling
/// always uses the plain 4-tap kernel.
struct BicubicKernel {
  double a = -0.5;
  bool antialias = true;
};

/// Keys' cubic convolution weight W(x).
double cubic_weight(double x, double a = -0.5);

/// Per-axis tap table, pixel-centre aligned: output i samples the source at
/// (i + 0.5) * in / out - 0.5; out-of-range taps clamp to the border pixel.
ResampleTable make_bicubic_table(std::size_t in, std::size_t out, const BicubicKernel& kernel);

/// Separable bicubic resize of a [C,H,W] (or [B,C,H,W]) tensor. Output is not
/// clamped to [0,1].
Tensor<float> bicubic_resize(const Tensor<float>& img, std::size_t out_h, std::size_t out_w,
                             const BicubicKernel& kernel = {});

/// Nearest-neighbour upsampling of a [B,C,h,w] tensor (no tape).
template <class T>
Tensor<T> nearest_upsample(const Tensor<T>& feat, std::size_t out_h, std::size_t out_w);

namespace reference {
/// Direct 2-D evaluation of the same kernel, one output pixel at a time, in
/// double precision.
Tensor<float> bicubic_resize(const Tensor<float>& img, std::size_t out_h, std::size_t out_w,
                             const BicubicKernel& kernel = {});
}  // namespace reference

}  // namespace diinn
