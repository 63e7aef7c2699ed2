// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdint>

#include "diinn/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace diinn {

namespace {

// Output rows/cols [lo, hi) whose tap (k) lands inside [0, n).
struct Range {
  std::size_t lo, hi;
};

inline Range valid_range(std::size_t k, std::size_t pad, std::size_t n, std::size_t out_n) {
  const std::int64_t lo = std::max<std::int64_t>(0, std::int64_t(pad) - std::int64_t(k));
  const std::int64_t hi =
      std::min<std::int64_t>(std::int64_t(out_n), std::int64_t(n) + std::int64_t(pad) - std::int64_t(k));
  if (hi <= lo) return {0, 0};
  return {std::size_t(lo), std::size_t(hi)};
}

// Minimum multiply-adds before a loop nest is worth forking for.
constexpr std::size_t kParallelWork = 1u << 15;

}  // namespace

namespace kernels {

template <class T>
void conv2d_forward(const ConvDims& d, std::span<const T> in, std::span<const T> w,
                    std::span<const T> b, std::span<T> out) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::size_t in_plane = d.in_h * d.in_w, out_plane = oh * ow;
  const std::int64_t jobs = std::int64_t(d.batch * d.out_c);
  const bool fork = d.out_numel() * d.in_c * d.kh * d.kw >= kParallelWork;

#pragma omp parallel for schedule(static) if (fork)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const std::size_t bi = std::size_t(job) / d.out_c, o = std::size_t(job) % d.out_c;
    T* dst = out.data() + (bi * d.out_c + o) * out_plane;
    std::fill(dst, dst + out_plane, b.empty() ? T(0) : b[o]);
    for (std::size_t c = 0; c < d.in_c; ++c) {
      const T* src = in.data() + (bi * d.in_c + c) * in_plane;
      for (std::size_t ky = 0; ky < d.kh; ++ky) {
        const Range ry = valid_range(ky, d.pad, d.in_h, oh);
        for (std::size_t kx = 0; kx < d.kw; ++kx) {
          const Range rx = valid_range(kx, d.pad, d.in_w, ow);
          const T wv = w[((o * d.in_c + c) * d.kh + ky) * d.kw + kx];
          for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
            const T* srow = src + (oy + ky - d.pad) * d.in_w + kx - d.pad;
            T* drow = dst + oy * ow;
#pragma omp simd
            for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) drow[ox] += wv * srow[ox];
          }
        }
      }
    }
  }
}

template <class T>
void conv2d_backward_input(const ConvDims& d, std::span<const T> gout, std::span<const T> w,
                           std::span<T> gin) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::size_t in_plane = d.in_h * d.in_w, out_plane = oh * ow;
  const std::int64_t jobs = std::int64_t(d.batch * d.in_c);
  const bool fork = d.out_numel() * d.in_c * d.kh * d.kw >= kParallelWork;

#pragma omp parallel for schedule(static) if (fork)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const std::size_t bi = std::size_t(job) / d.in_c, c = std::size_t(job) % d.in_c;
    T* dst = gin.data() + (bi * d.in_c + c) * in_plane;
    for (std::size_t o = 0; o < d.out_c; ++o) {
      const T* src = gout.data() + (bi * d.out_c + o) * out_plane;
      for (std::size_t ky = 0; ky < d.kh; ++ky) {
        const Range ry = valid_range(ky, d.pad, d.in_h, oh);
        for (std::size_t kx = 0; kx < d.kw; ++kx) {
          const Range rx = valid_range(kx, d.pad, d.in_w, ow);
          const T wv = w[((o * d.in_c + c) * d.kh + ky) * d.kw + kx];
          for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
            T* drow = dst + (oy + ky - d.pad) * d.in_w + kx - d.pad;
            const T* srow = src + oy * ow;
#pragma omp simd
            for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) drow[ox] += wv * srow[ox];
          }
        }
      }
    }
  }
}

template <class T>
void conv2d_backward_weight(const ConvDims& d, std::span<const T> gout, std::span<const T> in,
                            std::span<T> gw, std::span<T> gb) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::size_t in_plane = d.in_h * d.in_w, out_plane = oh * ow;
  const std::int64_t jobs = std::int64_t(d.out_c);
  const bool fork = d.out_numel() * d.in_c * d.kh * d.kw >= kParallelWork;

#pragma omp parallel for schedule(static) if (fork)
  for (std::int64_t oj = 0; oj < jobs; ++oj) {
    const std::size_t o = std::size_t(oj);
    for (std::size_t c = 0; c < d.in_c; ++c) {
      for (std::size_t ky = 0; ky < d.kh; ++ky) {
        const Range ry = valid_range(ky, d.pad, d.in_h, oh);
        for (std::size_t kx = 0; kx < d.kw; ++kx) {
          const Range rx = valid_range(kx, d.pad, d.in_w, ow);
          T acc = 0;
          for (std::size_t bi = 0; bi < d.batch; ++bi) {
            const T* g = gout.data() + (bi * d.out_c + o) * out_plane;
            const T* src = in.data() + (bi * d.in_c + c) * in_plane;
            for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
              const T* grow = g + oy * ow;
              const T* srow = src + (oy + ky - d.pad) * d.in_w + kx - d.pad;
#pragma omp simd reduction(+ : acc)
              for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) acc += grow[ox] * srow[ox];
            }
          }
          gw[((o * d.in_c + c) * d.kh + ky) * d.kw + kx] += acc;
        }
      }
    }
    if (!gb.empty()) {
      T acc = 0;
      for (std::size_t bi = 0; bi < d.batch; ++bi) {
        const T* g = gout.data() + (bi * d.out_c + o) * out_plane;
#pragma omp simd reduction(+ : acc)
        for (std::size_t i = 0; i < out_plane; ++i) acc += g[i];
      }
      gb[o] += acc;
    }
  }
}

#define DIINN_INSTANTIATE_CONV(T)                                                              \
  template void conv2d_forward<T>(const ConvDims&, std::span<const T>, std::span<const T>,     \
                                  std::span<const T>, std::span<T>);                           \
  template void conv2d_backward_input<T>(const ConvDims&, std::span<const T>,                  \
                                         std::span<const T>, std::span<T>);                    \
  template void conv2d_backward_weight<T>(const ConvDims&, std::span<const T>,                 \
                                          std::span<const T>, std::span<T>, std::span<T>);

DIINN_INSTANTIATE_CONV(float)
DIINN_INSTANTIATE_CONV(double)

}  // namespace kernels

void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace diinn
