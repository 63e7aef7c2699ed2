// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "diinn/image.hpp"
#include "diinn/rng.hpp"
#include "diinn/tensor.hpp"

namespace diinn::test {

template <class T = double>
Tensor<T> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<T> t(std::move(shape));
  for (auto& v : t.data()) v = T(rng.uniform(lo, hi));
  return t;
}

inline ImageRGB random_image(std::size_t h, std::size_t w, Rng& rng) {
  ImageRGB img(h, w);
  for (auto& v : img.data) v = float(rng.uniform(0.0, 1.0));
  return img;
}

inline std::filesystem::path data_dir() { return DIINN_TEST_DATA_DIR; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("diinn_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace diinn::test
