// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Compute kernels behind the differentiable ops and the resampler.
//
// Two implementations are kept side by side:
//   diinn::kernels    loop orders tuned for contiguous rows, OpenMP-parallel
//                     over independent outputs. Every output element is
//                     reduced by exactly one thread in a fixed order, so
//                     results do not depend on the thread count.
//   diinn::reference  direct-form serial loops, one output element at a time.
//                     Used by the tests and the benchmark only.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diinn {

struct ConvDims {
  std::size_t batch = 1;
  std::size_t in_c = 1, in_h = 1, in_w = 1;
  std::size_t out_c = 1;
  std::size_t kh = 1, kw = 1;
  std::size_t pad = 0;

  std::size_t out_h() const { return in_h + 2 * pad - kh + 1; }
  std::size_t out_w() const { return in_w + 2 * pad - kw + 1; }
  std::size_t in_numel() const { return batch * in_c * in_h * in_w; }
  std::size_t out_numel() const { return batch * out_c * out_h() * out_w(); }
  std::size_t weight_numel() const { return out_c * in_c * kh * kw; }
};

/// Separable 1-D resampling table: output i reads taps [first[i], first[i]+taps)
/// (already clamped per tap through `index`) weighted by `weight`.
struct ResampleTable {
  std::size_t in_size = 0, out_size = 0, taps = 0;
  std::vector<std::size_t> index;  // out_size * taps, clamped source indices
  std::vector<float> weight;       // out_size * taps, normalized per output
};

namespace kernels {

// out = conv(in, w) + b; out is overwritten.
template <class T>
void conv2d_forward(const ConvDims& d, std::span<const T> in, std::span<const T> w,
                    std::span<const T> b, std::span<T> out);
// gin += conv_transpose(gout, w)
template <class T>
void conv2d_backward_input(const ConvDims& d, std::span<const T> gout, std::span<const T> w,
                           std::span<T> gin);
// gw += correlate(in, gout); gb += sum(gout)
template <class T>
void conv2d_backward_weight(const ConvDims& d, std::span<const T> gout, std::span<const T> in,
                            std::span<T> gw, std::span<T> gb);

/// Applies a row table along the last axis of `planes` planes of size h x in_w.
void resample_rows(const ResampleTable& t, std::size_t planes, std::size_t h,
                   std::span<const float> in, std::span<float> out);
/// Applies a column table along the middle axis of `planes` planes of size in_h x w.
void resample_cols(const ResampleTable& t, std::size_t planes, std::size_t w,
                   std::span<const float> in, std::span<float> out);

}  // namespace kernels

namespace reference {

template <class T>
void conv2d_forward(const ConvDims& d, std::span<const T> in, std::span<const T> w,
                    std::span<const T> b, std::span<T> out);
template <class T>
void conv2d_backward_input(const ConvDims& d, std::span<const T> gout, std::span<const T> w,
                           std::span<T> gin);
template <class T>
void conv2d_backward_weight(const ConvDims& d, std::span<const T> gout, std::span<const T> in,
                            std::span<T> gw, std::span<T> gb);

}  // namespace reference

/// Sets the OpenMP thread count; 0 keeps the runtime default. No-op without OpenMP.
void set_num_threads(int n);
int max_threads();

}  // namespace diinn
