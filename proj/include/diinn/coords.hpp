// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Query grids for decoding at an arbitrary output resolution.
//
// Pixels are squares. Along an axis of n pixels, pixel i has global coordinate
// -1 + (2i + 1) / n. Against an LR axis of `lr` pixels stretched over `out`
// output pixels, output pixel i has its centre at c = (i + 0.5) * lr / out in
// LR pixel units; its nearest LR pixel is j = clamp(floor(c), 0, lr - 1) and its
// local coordinate is 2 (c - (j + 0.5)), i.e. the offset from the LR pixel
// centre measured in half-widths of that pixel, so it lies in [-1, 1].

#pragma once

#include <cstddef>
#include <cstdint>

#include "diinn/tensor.hpp"

namespace diinn {

struct CoordGrid {
  std::size_t lr_h = 0, lr_w = 0, out_h = 0, out_w = 0;
  Tensor<float> global_xy;                // [2,out_h,out_w], channel 0 = x
  Tensor<std::int32_t> nearest_lr_index;  // [2,out_h,out_w], channel 0 = column
  Tensor<float> local_xy;                 // [2,out_h,out_w], channel 0 = x
};

/// Global coordinate of pixel i on an axis of n pixels.
double global_coord(std::size_t i, std::size_t n);
/// Local coordinate of output pixel i relative to its nearest LR pixel.
double local_coord(std::size_t i, std::size_t lr, std::size_t out);

CoordGrid make_grid(std::size_t lr_h, std::size_t lr_w, std::size_t out_h, std::size_t out_w);

/// Inverse of the mean per-axis scale, 2 / (out_h/lr_h + out_w/lr_w).
double inverse_mean_scale(std::size_t lr_h, std::size_t lr_w, std::size_t out_h, std::size_t out_w);

/// Positional features p: [batch,3,out_h,out_w] = (local_x, local_y, 1/s_mean).
template <class T>
Tensor<T> make_positional(const CoordGrid& grid, std::size_t batch);

}  // namespace diinn
