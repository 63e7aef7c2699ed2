// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "diinn/tensor.hpp"

namespace diinn {

/// Interleaved H x W x 3 image with values nominally in [0,1].
struct ImageRGB {
  std::size_t height = 0, width = 0;
  std::vector<float> data;

  ImageRGB() = default;
  ImageRGB(std::size_t h, std::size_t w, float fill = 0.0f)
      : height(h), width(w), data(h * w * 3, fill) {}

  float& at(std::size_t y, std::size_t x, std::size_t c) { return data[(y * width + x) * 3 + c]; }
  float at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * width + x) * 3 + c];
  }
  bool same_size(const ImageRGB& o) const { return height == o.height && width == o.width; }
};

/// [3,H,W] planar tensor.
Tensor<float> to_tensor(const ImageRGB& img);
/// From [3,H,W] or [1,3,H,W]; values are copied as-is.
ImageRGB from_tensor(const Tensor<float>& t);

ImageRGB clamp01(ImageRGB img);
/// round(clamp(x,0,1) * 255) / 255, the values an 8-bit file would hold.
ImageRGB quantize8(ImageRGB img);

/// Top-left crop.
ImageRGB crop(const ImageRGB& img, std::size_t y0, std::size_t x0, std::size_t h, std::size_t w);

/// Reads 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or 24/32-bit BMP.
ImageRGB load_image(const std::filesystem::path& path);
/// Writes an 8-bit RGB PNG (or BMP when the extension is .bmp).
void save_image(const ImageRGB& img, const std::filesystem::path& path);

bool is_image_file(const std::filesystem::path& path);

}  // namespace diinn
