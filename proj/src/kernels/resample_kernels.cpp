// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>

#include "diinn/kernels.hpp"

namespace diinn::kernels {

void resample_rows(const ResampleTable& t, std::size_t planes, std::size_t h,
                   std::span<const float> in, std::span<float> out) {
  const std::int64_t rows = std::int64_t(planes * h);
#pragma omp parallel for schedule(static) if (rows * t.out_size * t.taps > (1 << 16))
  for (std::int64_t r = 0; r < rows; ++r) {
    const float* src = in.data() + std::size_t(r) * t.in_size;
    float* dst = out.data() + std::size_t(r) * t.out_size;
    for (std::size_t i = 0; i < t.out_size; ++i) {
      const std::size_t* idx = t.index.data() + i * t.taps;
      const float* w = t.weight.data() + i * t.taps;
      double acc = 0.0;
      for (std::size_t k = 0; k < t.taps; ++k) acc += double(w[k]) * double(src[idx[k]]);
      dst[i] = float(acc);
    }
  }
}

void resample_cols(const ResampleTable& t, std::size_t planes, std::size_t w,
                   std::span<const float> in, std::span<float> out) {
  const std::int64_t rows = std::int64_t(planes * t.out_size);
#pragma omp parallel for schedule(static) if (rows * w * t.taps > (1 << 16))
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::size_t p = std::size_t(r) / t.out_size, i = std::size_t(r) % t.out_size;
    const float* src = in.data() + p * t.in_size * w;
    float* dst = out.data() + (p * t.out_size + i) * w;
    const std::size_t* idx = t.index.data() + i * t.taps;
    const float* wt = t.weight.data() + i * t.taps;
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < t.taps; ++k) acc += double(wt[k]) * double(src[idx[k] * w + x]);
      dst[x] = float(acc);
    }
  }
}

}  // namespace diinn::kernels
