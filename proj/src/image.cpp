// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>

namespace diinn {

namespace fs = std::filesystem;

Tensor<float> to_tensor(const ImageRGB& img) {
  Tensor<float> t({3, img.height, img.width});
  const std::size_t plane = img.height * img.width;
  for (std::size_t k = 0; k < plane; ++k)
    for (std::size_t c = 0; c < 3; ++c) t[c * plane + k] = img.data[k * 3 + c];
  return t;
}

ImageRGB from_tensor(const Tensor<float>& t) {
  std::size_t h, w;
  if (t.rank() == 3 && t.dim(0) == 3) {
    h = t.dim(1), w = t.dim(2);
  } else if (t.rank() == 4 && t.dim(0) == 1 && t.dim(1) == 3) {
    h = t.dim(2), w = t.dim(3);
  } else {
    throw DimensionError("from_tensor: expected [3,H,W] or [1,3,H,W], got " + shape_str(t.shape()));
  }
  ImageRGB img(h, w);
  const std::size_t plane = h * w;
  for (std::size_t k = 0; k < plane; ++k)
    for (std::size_t c = 0; c < 3; ++c) img.data[k * 3 + c] = t[c * plane + k];
  return img;
}

ImageRGB clamp01(ImageRGB img) {
  for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
  return img;
}

ImageRGB quantize8(ImageRGB img) {
  for (auto& v : img.data) v = std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f) / 255.0f;
  return img;
}

ImageRGB crop(const ImageRGB& img, std::size_t y0, std::size_t x0, std::size_t h, std::size_t w) {
  if (y0 + h > img.height || x0 + w > img.width) throw ArgumentError("crop: window outside image");
  ImageRGB out(h, w);
  for (std::size_t y = 0; y < h; ++y)
    std::copy_n(img.data.begin() + std::ptrdiff_t(((y0 + y) * img.width + x0) * 3), w * 3,
                out.data.begin() + std::ptrdiff_t(y * w * 3));
  return out;
}

bool is_image_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".bmp";
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ImageRGB load_png(const fs::path& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw IoError("libpng init failed");
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info), h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != std::size_t(w) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG layout in " + path.string());
  }
  pixels.resize(std::size_t(w) * h * 3);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + std::size_t(y) * w * 3;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  ImageRGB img(h, w);
  for (std::size_t i = 0; i < pixels.size(); ++i) img.data[i] = float(pixels[i]) / 255.0f;
  return img;
}

void save_png(const ImageRGB& img, const fs::path& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw IoError("libpng init failed");
  std::vector<std::uint8_t> pixels(img.data.size());
  for (std::size_t i = 0; i < pixels.size(); ++i)
    pixels[i] = std::uint8_t(std::lround(std::clamp(img.data[i], 0.0f, 1.0f) * 255.0f));
  std::vector<png_bytep> rows(img.height);
  for (std::size_t y = 0; y < img.height; ++y) rows[y] = pixels.data() + y * img.width * 3;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

template <class U>
U read_le(const std::vector<std::uint8_t>& b, std::size_t off) {
  if (off + sizeof(U) > b.size()) throw IoError("truncated BMP");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(U(b[off + i]) << (8 * i));
  return v;
}

ImageRGB load_bmp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)), {});
  if (b.size() < 54 || b[0] != 'B' || b[1] != 'M') throw IoError("not a BMP: " + path.string());
  const auto offset = read_le<std::uint32_t>(b, 10);
  const auto w = std::int32_t(read_le<std::uint32_t>(b, 18));
  const auto hraw = std::int32_t(read_le<std::uint32_t>(b, 22));
  const auto bpp = read_le<std::uint16_t>(b, 28);
  const auto compression = read_le<std::uint32_t>(b, 30);
  if ((bpp != 24 && bpp != 32) || (compression != 0 && compression != 3) || w <= 0 || hraw == 0)
    throw IoError("unsupported BMP variant in " + path.string());
  const bool bottom_up = hraw > 0;
  const std::size_t h = std::size_t(bottom_up ? hraw : -hraw);
  const std::size_t bytes = bpp / 8;
  const std::size_t stride = (std::size_t(w) * bytes + 3) & ~std::size_t(3);
  if (offset + stride * h > b.size()) throw IoError("truncated BMP " + path.string());
  ImageRGB img(h, std::size_t(w));
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t row = bottom_up ? h - 1 - y : y;
    const std::uint8_t* src = b.data() + offset + row * stride;
    for (std::size_t x = 0; x < std::size_t(w); ++x) {
      img.at(y, x, 0) = float(src[x * bytes + 2]) / 255.0f;
      img.at(y, x, 1) = float(src[x * bytes + 1]) / 255.0f;
      img.at(y, x, 2) = float(src[x * bytes + 0]) / 255.0f;
    }
  }
  return img;
}

void save_bmp(const ImageRGB& img, const fs::path& path) {
  const std::size_t stride = (img.width * 3 + 3) & ~std::size_t(3);
  const std::uint32_t size = std::uint32_t(54 + stride * img.height);
  std::vector<std::uint8_t> b(size, 0);
  auto put = [&](std::size_t off, std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) b[off + std::size_t(i)] = std::uint8_t(v >> (8 * i));
  };
  b[0] = 'B', b[1] = 'M';
  put(2, size, 4);
  put(10, 54, 4);
  put(14, 40, 4);
  put(18, std::uint32_t(img.width), 4);
  put(22, std::uint32_t(img.height), 4);
  put(26, 1, 2);
  put(28, 24, 2);
  put(34, std::uint32_t(stride * img.height), 4);
  for (std::size_t y = 0; y < img.height; ++y) {
    std::uint8_t* dst = b.data() + 54 + (img.height - 1 - y) * stride;
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        dst[x * 3 + 2 - c] =
            std::uint8_t(std::lround(std::clamp(img.at(y, x, c), 0.0f, 1.0f) * 255.0f));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
}

bool has_ext(const fs::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

}  // namespace

ImageRGB load_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  if (has_ext(path, ".bmp")) return load_bmp(path);
  return load_png(path);
}

void save_image(const ImageRGB& img, const fs::path& path) {
  if (has_ext(path, ".bmp"))
    save_bmp(img, path);
  else
    save_png(img, path);
}

}  // namespace diinn
