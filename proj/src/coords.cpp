// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/coords.hpp"

#include <algorithm>
#include <string>

#include "diinn/indexing.hpp"

namespace diinn {

double global_coord(std::size_t i, std::size_t n) {
  return (double(2 * i + 1) - double(n)) / double(n);
}

double local_coord(std::size_t i, std::size_t lr, std::size_t out) {
  const std::size_t j = nearest_source_index(i, lr, out);
  // 2 * ((i + 0.5) * lr / out - (j + 0.5)) with a single rounding.
  const double num = double(2 * i + 1) * double(lr) - double(2 * j + 1) * double(out);
  return std::clamp(num / double(out), -1.0, 1.0);
}

CoordGrid make_grid(std::size_t lr_h, std::size_t lr_w, std::size_t out_h, std::size_t out_w) {
  if (lr_h == 0 || lr_w == 0) throw ArgumentError("make_grid: LR size must be positive");
  if (out_h < lr_h || out_w < lr_w)
    throw ArgumentError("make_grid: output " + std::to_string(out_h) + "x" +
                        std::to_string(out_w) + " is smaller than LR " + std::to_string(lr_h) +
                        "x" + std::to_string(lr_w));
  CoordGrid g;
  g.lr_h = lr_h, g.lr_w = lr_w, g.out_h = out_h, g.out_w = out_w;
  g.global_xy = Tensor<float>({2, out_h, out_w});
  g.local_xy = Tensor<float>({2, out_h, out_w});
  g.nearest_lr_index = Tensor<std::int32_t>({2, out_h, out_w});

  std::vector<float> gx(out_w), gy(out_h), lx(out_w), ly(out_h);
  std::vector<std::int32_t> jx(out_w), jy(out_h);
  for (std::size_t x = 0; x < out_w; ++x) {
    gx[x] = float(global_coord(x, out_w));
    lx[x] = float(local_coord(x, lr_w, out_w));
    jx[x] = std::int32_t(nearest_source_index(x, lr_w, out_w));
  }
  for (std::size_t y = 0; y < out_h; ++y) {
    gy[y] = float(global_coord(y, out_h));
    ly[y] = float(local_coord(y, lr_h, out_h));
    jy[y] = std::int32_t(nearest_source_index(y, lr_h, out_h));
  }
  const std::size_t plane = out_h * out_w;
  for (std::size_t y = 0; y < out_h; ++y)
    for (std::size_t x = 0; x < out_w; ++x) {
      const std::size_t k = y * out_w + x;
      g.global_xy[k] = gx[x];
      g.global_xy[plane + k] = gy[y];
      g.local_xy[k] = lx[x];
      g.local_xy[plane + k] = ly[y];
      g.nearest_lr_index[k] = jx[x];
      g.nearest_lr_index[plane + k] = jy[y];
    }
  return g;
}

double inverse_mean_scale(std::size_t lr_h, std::size_t lr_w, std::size_t out_h,
                          std::size_t out_w) {
  const double sy = double(out_h) / double(lr_h), sx = double(out_w) / double(lr_w);
  return 2.0 / (sx + sy);
}

template <class T>
Tensor<T> make_positional(const CoordGrid& grid, std::size_t batch) {
  const std::size_t plane = grid.out_h * grid.out_w;
  Tensor<T> p({batch, 3, grid.out_h, grid.out_w});
  const T inv = T(inverse_mean_scale(grid.lr_h, grid.lr_w, grid.out_h, grid.out_w));
  for (std::size_t b = 0; b < batch; ++b) {
    T* dst = p.data().data() + b * 3 * plane;
    for (std::size_t k = 0; k < plane; ++k) {
      dst[k] = T(grid.local_xy[k]);
      dst[plane + k] = T(grid.local_xy[plane + k]);
      dst[2 * plane + k] = inv;
    }
  }
  return p;
}

template Tensor<float> make_positional<float>(const CoordGrid&, std::size_t);
template Tensor<double> make_positional<double>(const CoordGrid&, std::size_t);

}  // namespace diinn
