// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/data.hpp"

#include <algorithm>
#include <cmath>

namespace diinn {

namespace fs = std::filesystem;

DatasetFolder DatasetFolder::open(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("dataset directory not found: " + root.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  DatasetFolder d;
  d.root_ = root;
  for (const auto& f : files) {
    d.names_.push_back(f.filename().string());
    d.images_.push_back(load_image(f));
  }
  return d;
}

DatasetFolder DatasetFolder::from_images(std::vector<std::string> names,
                                         std::vector<ImageRGB> images) {
  if (names.size() != images.size()) throw ArgumentError("names and images differ in length");
  DatasetFolder d;
  d.names_ = std::move(names);
  d.images_ = std::move(images);
  return d;
}

void validate(const TrainConfig& cfg) {
  if (cfg.scales.empty()) throw ConfigError("scales must not be empty");
  for (int s : cfg.scales)
    if (s < 1) throw ConfigError("training scales must be integers >= 1");
  if (cfg.patch_base < 1) throw ConfigError("patch_base must be >= 1");
  if (cfg.batch_hr < 1) throw ConfigError("batch_hr must be >= 1");
  if (cfg.halve_every < 1) throw ConfigError("halve_every must be >= 1");
  if (!(cfg.lr0 >= 0.0)) throw ConfigError("lr0 must be >= 0");
  if (cfg.flip_prob < 0.0 || cfg.flip_prob > 1.0) throw ConfigError("flip_prob must be in [0,1]");
}

double learning_rate(const TrainConfig& cfg, std::size_t epoch) {
  return cfg.lr0 * std::pow(0.5, double(epoch / cfg.halve_every));
}

Tensor<float> apply_flips(const Tensor<float>& t, bool hflip, bool vflip, bool transpose) {
  const std::size_t c = t.dim(0), h = t.dim(1), w = t.dim(2);
  Tensor<float> cur = t;
  if (hflip || vflip) {
    Tensor<float> out(t.shape());
    for (std::size_t k = 0; k < c; ++k)
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
          out[(k * h + y) * w + x] =
              cur[(k * h + (vflip ? h - 1 - y : y)) * w + (hflip ? w - 1 - x : x)];
    cur = std::move(out);
  }
  if (transpose) {
    Tensor<float> out({c, w, h});
    for (std::size_t k = 0; k < c; ++k)
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) out[(k * w + x) * h + y] = cur[(k * h + y) * w + x];
    cur = std::move(out);
  }
  return cur;
}

TrainPair sample_pair(const DatasetFolder& data, std::size_t index, int scale,
                      const TrainConfig& cfg, Rng& rng) {
  const ImageRGB& img = data.image(index);
  const std::size_t s = std::size_t(scale);
  std::size_t patch = cfg.patch_base * s;
  TrainPair pair;
  pair.scale = scale;
  pair.image = index;
  const std::size_t fit = std::min(img.height, img.width);
  if (fit < patch) {
    patch = (fit / s) * s;
    pair.fallback = true;
    if (patch == 0)
      throw ArgumentError("image " + data.name(index) + " is smaller than the scale factor " +
                          std::to_string(scale));
  }
  const std::size_t y0 = rng.below(img.height - patch + 1);
  const std::size_t x0 = rng.below(img.width - patch + 1);
  pair.hflip = rng.bernoulli(cfg.flip_prob);
  pair.vflip = rng.bernoulli(cfg.flip_prob);
  pair.transpose = rng.bernoulli(cfg.flip_prob);

  pair.hr = apply_flips(to_tensor(crop(img, y0, x0, patch, patch)), pair.hflip, pair.vflip,
                        pair.transpose);
  BicubicKernel kernel;
  kernel.antialias = cfg.antialias;
  pair.lr = bicubic_resize(pair.hr, patch / s, patch / s, kernel);
  return pair;
}

std::vector<TrainPair> sample_batch(const DatasetFolder& data,
                                    const std::vector<std::size_t>& indices,
                                    const TrainConfig& cfg, Rng& rng) {
  if (data.empty()) throw ArgumentError("sample_batch: dataset is empty");
  std::vector<TrainPair> out;
  for (int s : cfg.scales)
    for (std::size_t i : indices) out.push_back(sample_pair(data, i, s, cfg, rng));
  return out;
}

std::vector<TrainPair> sample_batch(const DatasetFolder& data, const TrainConfig& cfg, Rng& rng) {
  if (data.empty()) throw ArgumentError("sample_batch: dataset is empty");
  std::vector<std::size_t> idx(cfg.batch_hr);
  for (auto& i : idx) i = rng.below(data.size());
  return sample_batch(data, idx, cfg, rng);
}

}  // namespace diinn
