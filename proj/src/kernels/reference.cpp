// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Serial direct-form convolution. One output element per iteration, bounds
// checked per tap. Slow on purpose; kept as the oracle for the tuned kernels.

#include <cstdint>

#include "diinn/kernels.hpp"

namespace diinn::reference {

namespace {

inline bool tap(std::size_t o, std::size_t k, std::size_t pad, std::size_t n, std::size_t& i) {
  const std::int64_t v = std::int64_t(o) + std::int64_t(k) - std::int64_t(pad);
  if (v < 0 || v >= std::int64_t(n)) return false;
  i = std::size_t(v);
  return true;
}

}  // namespace

template <class T>
void conv2d_forward(const ConvDims& d, std::span<const T> in, std::span<const T> w,
                    std::span<const T> b, std::span<T> out) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  for (std::size_t bi = 0; bi < d.batch; ++bi)
    for (std::size_t o = 0; o < d.out_c; ++o)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          T acc = b.empty() ? T(0) : b[o];
          for (std::size_t c = 0; c < d.in_c; ++c)
            for (std::size_t ky = 0; ky < d.kh; ++ky)
              for (std::size_t kx = 0; kx < d.kw; ++kx) {
                std::size_t iy, ix;
                if (!tap(oy, ky, d.pad, d.in_h, iy) || !tap(ox, kx, d.pad, d.in_w, ix)) continue;
                acc += w[((o * d.in_c + c) * d.kh + ky) * d.kw + kx] *
                       in[((bi * d.in_c + c) * d.in_h + iy) * d.in_w + ix];
              }
          out[((bi * d.out_c + o) * oh + oy) * ow + ox] = acc;
        }
}

template <class T>
void conv2d_backward_input(const ConvDims& d, std::span<const T> gout, std::span<const T> w,
                           std::span<T> gin) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  for (std::size_t bi = 0; bi < d.batch; ++bi)
    for (std::size_t o = 0; o < d.out_c; ++o)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const T g = gout[((bi * d.out_c + o) * oh + oy) * ow + ox];
          for (std::size_t c = 0; c < d.in_c; ++c)
            for (std::size_t ky = 0; ky < d.kh; ++ky)
              for (std::size_t kx = 0; kx < d.kw; ++kx) {
                std::size_t iy, ix;
                if (!tap(oy, ky, d.pad, d.in_h, iy) || !tap(ox, kx, d.pad, d.in_w, ix)) continue;
                gin[((bi * d.in_c + c) * d.in_h + iy) * d.in_w + ix] +=
                    g * w[((o * d.in_c + c) * d.kh + ky) * d.kw + kx];
              }
        }
}

template <class T>
void conv2d_backward_weight(const ConvDims& d, std::span<const T> gout, std::span<const T> in,
                            std::span<T> gw, std::span<T> gb) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  for (std::size_t bi = 0; bi < d.batch; ++bi)
    for (std::size_t o = 0; o < d.out_c; ++o)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const T g = gout[((bi * d.out_c + o) * oh + oy) * ow + ox];
          if (!gb.empty()) gb[o] += g;
          for (std::size_t c = 0; c < d.in_c; ++c)
            for (std::size_t ky = 0; ky < d.kh; ++ky)
              for (std::size_t kx = 0; kx < d.kw; ++kx) {
                std::size_t iy, ix;
                if (!tap(oy, ky, d.pad, d.in_h, iy) || !tap(ox, kx, d.pad, d.in_w, ix)) continue;
                gw[((o * d.in_c + c) * d.kh + ky) * d.kw + kx] +=
                    g * in[((bi * d.in_c + c) * d.in_h + iy) * d.in_w + ix];
              }
        }
}

template void conv2d_forward<float>(const ConvDims&, std::span<const float>, std::span<const float>,
                                    std::span<const float>, std::span<float>);
template void conv2d_forward<double>(const ConvDims&, std::span<const double>,
                                     std::span<const double>, std::span<const double>,
                                     std::span<double>);
template void conv2d_backward_input<float>(const ConvDims&, std::span<const float>,
                                           std::span<const float>, std::span<float>);
template void conv2d_backward_input<double>(const ConvDims&, std::span<const double>,
                                            std::span<const double>, std::span<double>);
template void conv2d_backward_weight<float>(const ConvDims&, std::span<const float>,
                                            std::span<const float>, std::span<float>,
                                            std::span<float>);
template void conv2d_backward_weight<double>(const ConvDims&, std::span<const double>,
                                             std::span<const double>, std::span<double>,
                                             std::span<double>);

}  // namespace diinn::reference
