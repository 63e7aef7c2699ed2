// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <string>

#include "diinn/image.hpp"
#include "diinn/resample.hpp"

namespace diinn {

/// Evaluation conventions. Defaults: RGB, full image, float values.
struct MetricOptions {
  bool y_channel = false;       // BT.601 luma (MATLAB rgb2ycbcr scaling) instead of RGB
  std::size_t crop_border = 0;  // pixels dropped on every side before scoring
  bool quantize = false;        // score 8-bit rounded values instead of floats
};

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  double lr_psnr_db = 0.0;
  MetricOptions options;
  bool antialias = true;
};

/// Returned by psnr() for identical inputs.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();
/// Finite stand-in for kInfinitePsnr when averaging into tables.
inline constexpr double kPsnrTableCap = 100.0;

/// 10 log10(range^2 / MSE) over all pixels and channels.
double psnr(const ImageRGB& a, const ImageRGB& b, double data_range = 1.0,
            const MetricOptions& opt = {});

/// Mean SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, valid
/// region only, averaged over channels.
double ssim(const ImageRGB& a, const ImageRGB& b, double data_range = 1.0,
            const MetricOptions& opt = {});

/// PSNR between both images after bicubic downscaling to lr_h x lr_w.
double lr_psnr(const ImageRGB& sr, const ImageRGB& hr, std::size_t lr_h, std::size_t lr_w,
               const BicubicKernel& kernel, const MetricOptions& opt = {});

/// "inf" for kInfinitePsnr, fixed 4-decimal otherwise.
std::string format_db(double v);

}  // namespace diinn
