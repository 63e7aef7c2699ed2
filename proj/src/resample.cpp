// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "diinn/indexing.hpp"

namespace diinn {

double cubic_weight(double x, double a) {
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

ResampleTable make_bicubic_table(std::size_t in, std::size_t out, const BicubicKernel& kernel) {
  if (in == 0 || out == 0) throw ArgumentError("bicubic: sizes must be positive");
  const double ratio = double(in) / double(out);  // source pixels per output pixel
  const bool stretch = kernel.antialias && out < in;
  const double support = stretch ? 2.0 * ratio : 2.0;
  const double inv = stretch ? 1.0 / ratio : 1.0;

  ResampleTable t;
  t.in_size = in;
  t.out_size = out;
  std::vector<std::int64_t> first(out);
  std::vector<std::size_t> count(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double center = (double(i) + 0.5) * ratio - 0.5;
    std::int64_t lo, hi;
    if (stretch) {
      lo = std::int64_t(std::ceil(center - support));
      hi = std::int64_t(std::floor(center + support));
    } else {
      lo = std::int64_t(std::floor(center)) - 1;
      hi = lo + 3;
    }
    first[i] = lo;
    count[i] = std::size_t(hi - lo + 1);
    t.taps = std::max(t.taps, count[i]);
  }
  t.index.assign(out * t.taps, 0);
  t.weight.assign(out * t.taps, 0.0f);
  std::vector<double> w(t.taps);
  for (std::size_t i = 0; i < out; ++i) {
    const double center = (double(i) + 0.5) * ratio - 0.5;
    double sum = 0.0;
    for (std::size_t k = 0; k < t.taps; ++k) {
      const std::int64_t x = first[i] + std::int64_t(k);
      w[k] = k < count[i] ? cubic_weight((double(x) - center) * inv, kernel.a) : 0.0;
      sum += w[k];
      t.index[i * t.taps + k] = std::size_t(std::clamp<std::int64_t>(x, 0, std::int64_t(in) - 1));
    }
    for (std::size_t k = 0; k < t.taps; ++k) t.weight[i * t.taps + k] = float(w[k] / sum);
  }
  return t;
}

namespace {

struct PlaneView {
  std::size_t planes, h, w;
};

PlaneView plane_view(const Tensor<float>& img) {
  if (img.rank() == 3) return {img.dim(0), img.dim(1), img.dim(2)};
  if (img.rank() == 4) return {img.dim(0) * img.dim(1), img.dim(2), img.dim(3)};
  throw DimensionError("bicubic_resize: expected [C,H,W] or [B,C,H,W], got " +
                       shape_str(img.shape()));
}

Shape resized_shape(const Tensor<float>& img, std::size_t out_h, std::size_t out_w) {
  Shape s = img.shape();
  s[s.size() - 2] = out_h;
  s[s.size() - 1] = out_w;
  return s;
}

}  // namespace

Tensor<float> bicubic_resize(const Tensor<float>& img, std::size_t out_h, std::size_t out_w,
                             const BicubicKernel& kernel) {
  if (out_h == 0 || out_w == 0)
    throw ArgumentError("bicubic_resize: target size must be positive, got " +
                        std::to_string(out_h) + "x" + std::to_string(out_w));
  const PlaneView v = plane_view(img);
  const ResampleTable rows = make_bicubic_table(v.w, out_w, kernel);
  const ResampleTable cols = make_bicubic_table(v.h, out_h, kernel);
  std::vector<float> tmp(v.planes * v.h * out_w);
  kernels::resample_rows(rows, v.planes, v.h, img.data(), tmp);
  Tensor<float> out(resized_shape(img, out_h, out_w));
  kernels::resample_cols(cols, v.planes, out_w, tmp, out.data());
  return out;
}

template <class T>
Tensor<T> nearest_upsample(const Tensor<T>& feat, std::size_t out_h, std::size_t out_w) {
  if (feat.rank() != 4) throw DimensionError("nearest_upsample: expected [B,C,h,w]");
  const std::size_t planes = feat.dim(0) * feat.dim(1), h = feat.dim(2), w = feat.dim(3);
  if (out_h < h || out_w < w) throw ArgumentError("nearest_upsample: output smaller than input");
  Tensor<T> out({feat.dim(0), feat.dim(1), out_h, out_w});
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t i = 0; i < out_h; ++i) {
      const std::size_t si = nearest_source_index(i, h, out_h);
      for (std::size_t j = 0; j < out_w; ++j)
        out[(p * out_h + i) * out_w + j] = feat[(p * h + si) * w + nearest_source_index(j, w, out_w)];
    }
  return out;
}

template Tensor<float> nearest_upsample<float>(const Tensor<float>&, std::size_t, std::size_t);
template Tensor<double> nearest_upsample<double>(const Tensor<double>&, std::size_t, std::size_t);

namespace reference {

Tensor<float> bicubic_resize(const Tensor<float>& img, std::size_t out_h, std::size_t out_w,
                             const BicubicKernel& kernel) {
  if (out_h == 0 || out_w == 0) throw ArgumentError("bicubic_resize: target size must be positive");
  const PlaneView v = plane_view(img);
  Tensor<float> out(resized_shape(img, out_h, out_w));

  // Weight of virtual source position x for an output pixel at `center`.
  auto axis_weight = [&](std::int64_t x, double center, std::size_t in, std::size_t out_n) {
    const double scale = double(out_n) / double(in);
    const double f = (kernel.antialias && scale < 1.0) ? scale : 1.0;
    return cubic_weight((double(x) - center) * f, kernel.a);
  };

  for (std::size_t p = 0; p < v.planes; ++p)
    for (std::size_t i = 0; i < out_h; ++i)
      for (std::size_t j = 0; j < out_w; ++j) {
        const double cy = (double(i) + 0.5) * double(v.h) / double(out_h) - 0.5;
        const double cx = (double(j) + 0.5) * double(v.w) / double(out_w) - 0.5;
        const std::int64_t ry = std::int64_t(2.0 * double(v.h) / double(out_h)) + 3;
        const std::int64_t rx = std::int64_t(2.0 * double(v.w) / double(out_w)) + 3;
        double acc = 0.0, norm = 0.0;
        for (std::int64_t y = std::int64_t(std::floor(cy)) - ry; y <= std::int64_t(cy) + ry; ++y) {
          const double wy = axis_weight(y, cy, v.h, out_h);
          if (wy == 0.0) continue;
          const std::size_t sy = std::size_t(std::clamp<std::int64_t>(y, 0, std::int64_t(v.h) - 1));
          for (std::int64_t x = std::int64_t(std::floor(cx)) - rx; x <= std::int64_t(cx) + rx; ++x) {
            const double wx = axis_weight(x, cx, v.w, out_w);
            if (wx == 0.0) continue;
            const std::size_t sx =
                std::size_t(std::clamp<std::int64_t>(x, 0, std::int64_t(v.w) - 1));
            acc += wy * wx * double(img[(p * v.h + sy) * v.w + sx]);
            norm += wy * wx;
          }
        }
        out[(p * out_h + i) * out_w + j] = float(acc / norm);
      }
  return out;
}

}  // namespace reference

}  // namespace diinn
