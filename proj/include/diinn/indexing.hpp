// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>

namespace diinn {

/// Source cell under the centre of output cell `i` when `in` cells are
/// stretched over `out` cells: clamp(floor((i + 0.5) * in / out), 0, in - 1),
/// evaluated in integers.
inline std::size_t nearest_source_index(std::size_t i, std::size_t in, std::size_t out) {
  const std::size_t j = ((2 * i + 1) * in) / (2 * out);
  return std::min(j, in - 1);
}

}  // namespace diinn
