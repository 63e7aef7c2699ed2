// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

namespace diinn {

namespace {

// Planes in double precision after applying the conventions.
struct Planes {
  std::size_t channels = 0, h = 0, w = 0;
  std::vector<double> v;  // channel-major
};

Planes prepare(const ImageRGB& src, const MetricOptions& opt) {
  const ImageRGB img = opt.quantize ? quantize8(src) : src;
  const std::size_t cb = opt.crop_border;
  if (2 * cb >= img.height || 2 * cb >= img.width)
    throw ArgumentError("crop_border leaves no pixels to score");
  Planes p;
  p.h = img.height - 2 * cb;
  p.w = img.width - 2 * cb;
  p.channels = opt.y_channel ? 1 : 3;
  p.v.resize(p.channels * p.h * p.w);
  for (std::size_t y = 0; y < p.h; ++y)
    for (std::size_t x = 0; x < p.w; ++x) {
      const double r = img.at(y + cb, x + cb, 0), g = img.at(y + cb, x + cb, 1),
                   b = img.at(y + cb, x + cb, 2);
      if (opt.y_channel) {
        p.v[y * p.w + x] = (16.0 + 65.481 * r + 128.553 * g + 24.966 * b) / 255.0;
      } else {
        p.v[(0 * p.h + y) * p.w + x] = r;
        p.v[(1 * p.h + y) * p.w + x] = g;
        p.v[(2 * p.h + y) * p.w + x] = b;
      }
    }
  return p;
}

void require_same(const ImageRGB& a, const ImageRGB& b, const char* what) {
  if (!a.same_size(b))
    throw DimensionError(std::string(what) + ": image sizes differ (" + std::to_string(a.height) +
                         "x" + std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                         std::to_string(b.width) + ")");
}

// Valid-region separable filter of one plane.
std::vector<double> filter_valid(const double* src, std::size_t h, std::size_t w,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size(), oh = h - n + 1, ow = w - n + 1;
  std::vector<double> tmp(h * ow), out(oh * ow);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * src[y * w + x + i];
      tmp[y * ow + x] = acc;
    }
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * tmp[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  return out;
}

std::vector<double> gaussian_window(std::size_t n, double sigma) {
  std::vector<double> k(n);
  double sum = 0.0;
  const double c = (double(n) - 1.0) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = std::exp(-(double(i) - c) * (double(i) - c) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

double psnr(const ImageRGB& a, const ImageRGB& b, double data_range, const MetricOptions& opt) {
  require_same(a, b, "psnr");
  const Planes pa = prepare(a, opt), pb = prepare(b, opt);
  double se = 0.0;
  for (std::size_t i = 0; i < pa.v.size(); ++i) {
    const double d = pa.v[i] - pb.v[i];
    se += d * d;
  }
  if (se == 0.0) return kInfinitePsnr;
  const double mse = se / double(pa.v.size());
  return 10.0 * std::log10(data_range * data_range / mse);
}

double ssim(const ImageRGB& a, const ImageRGB& b, double data_range, const MetricOptions& opt) {
  require_same(a, b, "ssim");
  const Planes pa = prepare(a, opt), pb = prepare(b, opt);
  // Images smaller than the window fall back to the largest odd window that fits.
  std::size_t n = 11;
  while (n > 1 && (n > pa.h || n > pa.w)) n -= 2;
  const auto k = gaussian_window(n, 1.5);
  const double c1 = (0.01 * data_range) * (0.01 * data_range);
  const double c2 = (0.03 * data_range) * (0.03 * data_range);
  const std::size_t plane = pa.h * pa.w;

  double total = 0.0;
  for (std::size_t c = 0; c < pa.channels; ++c) {
    const double* x = pa.v.data() + c * plane;
    const double* y = pb.v.data() + c * plane;
    std::vector<double> xx(plane), yy(plane), xy(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, pa.h, pa.w, k);
    const auto my = filter_valid(y, pa.h, pa.w, k);
    const auto sxx = filter_valid(xx.data(), pa.h, pa.w, k);
    const auto syy = filter_valid(yy.data(), pa.h, pa.w, k);
    const auto sxy = filter_valid(xy.data(), pa.h, pa.w, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += acc / double(mx.size());
  }
  return total / double(pa.channels);
}

double lr_psnr(const ImageRGB& sr, const ImageRGB& hr, std::size_t lr_h, std::size_t lr_w,
               const BicubicKernel& kernel, const MetricOptions& opt) {
  require_same(sr, hr, "lr_psnr");
  const ImageRGB a = from_tensor(bicubic_resize(to_tensor(sr), lr_h, lr_w, kernel));
  const ImageRGB b = from_tensor(bicubic_resize(to_tensor(hr), lr_h, lr_w, kernel));
  MetricOptions lr_opt = opt;
  lr_opt.crop_border = 0;
  return psnr(a, b, 1.0, lr_opt);
}

std::string format_db(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace diinn
