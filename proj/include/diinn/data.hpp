// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "diinn/image.hpp"
#include "diinn/resample.hpp"
#include "diinn/rng.hpp"

namespace diinn {

/// All PNG/BMP files directly inside a directory, in lexicographic order,
/// decoded eagerly.
class DatasetFolder {
 public:
  static DatasetFolder open(const std::filesystem::path& root);
  static DatasetFolder from_images(std::vector<std::string> names, std::vector<ImageRGB> images);

  const std::filesystem::path& root() const { return root_; }
  std::size_t size() const { return images_.size(); }
  bool empty() const { return images_.empty(); }
  const ImageRGB& image(std::size_t i) const { return images_.at(i); }
  const std::string& name(std::size_t i) const { return names_.at(i); }

 private:
  std::filesystem::path root_;
  std::vector<std::string> names_;
  std::vector<ImageRGB> images_;
};

struct TrainConfig {
  std::vector<int> scales{2, 3, 4};
  std::size_t patch_base = 48;   // LR patch side; HR patch side is patch_base * s
  std::size_t batch_hr = 4;      // HR images per step
  std::size_t epochs = 1;
  std::size_t steps = 0;         // stop after this many optimizer steps in total (0: no cap)
  double lr0 = 1e-4;
  std::size_t halve_every = 200; // epochs between learning-rate halvings
  double flip_prob = 0.5;
  std::uint64_t seed = 0;
  bool antialias = true;         // bicubic degradation kernel
};

void validate(const TrainConfig& cfg);

/// lr0 * 0.5^floor(epoch / halve_every)
double learning_rate(const TrainConfig& cfg, std::size_t epoch);

struct TrainPair {
  Tensor<float> lr;  // [3,h,h]
  Tensor<float> hr;  // [3,h*s,h*s]
  int scale = 1;
  std::size_t image = 0;
  bool hflip = false, vflip = false, transpose = false;
  bool fallback = false;  // crop smaller than patch_base * s
};

/// One random square crop of image `index` at scale s with random flips
/// (horizontal, vertical, transpose, each with flip_prob), followed by bicubic
/// downscaling by s. Images smaller than patch_base * s are cropped at the
/// largest multiple of s that fits.
TrainPair sample_pair(const DatasetFolder& data, std::size_t index, int scale,
                      const TrainConfig& cfg, Rng& rng);

/// For every image index and every scale, one pair (|indices| * |scales| pairs).
std::vector<TrainPair> sample_batch(const DatasetFolder& data,
                                    const std::vector<std::size_t>& indices,
                                    const TrainConfig& cfg, Rng& rng);

/// batch_hr images drawn uniformly (with replacement) from the folder.
std::vector<TrainPair> sample_batch(const DatasetFolder& data, const TrainConfig& cfg, Rng& rng);

/// Applies the flip flags of a pair to a [C,H,W] tensor, in the order
/// horizontal, vertical, transpose.
Tensor<float> apply_flips(const Tensor<float>& t, bool hflip, bool vflip, bool transpose);

}  // namespace diinn
