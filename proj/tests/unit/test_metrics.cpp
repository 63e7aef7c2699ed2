// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diinn/metrics.hpp"
#include "util.hpp"

using namespace diinn;
using diinn::test::random_image;

namespace {

// Direct SSIM: every valid 11x11 window, Gaussian weights, double precision.
double ssim_oracle(const ImageRGB& a, const ImageRGB& b) {
  double g[11], gs = 0.0;
  for (int k = 0; k < 11; ++k) gs += g[k] = std::exp(-double((k - 5) * (k - 5)) / (2 * 1.5 * 1.5));
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y + 11 <= a.height; ++y)
      for (std::size_t x = 0; x + 11 <= a.width; ++x) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            const double w = g[i] * g[j] / (gs * gs);
            const double va = a.at(y + i, x + j, c), vb = b.at(y + i, x + j, c);
            ma += w * va, mb += w * vb, saa += w * va * va, sbb += w * vb * vb, sab += w * va * vb;
          }
        const double vara = saa - ma * ma, varb = sbb - mb * mb, cov = sab - ma * mb;
        total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (vara + varb + c2));
        ++n;
      }
  return total / double(n);
}

ImageRGB constant(std::size_t h, std::size_t w, float v) { return ImageRGB(h, w, v); }

// Null vector of the 2x bicubic (a = -0.5, no antialias) decimator with
// replicated borders: taps are (-1, 9, 9, -1)/16, so an alternating sequence
// cancels in the interior and the end values 1.25 absorb the replicated taps.
std::vector<float> null_axis(std::size_t n) {
  std::vector<float> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = i % 2 ? 1.0f : -1.0f;
  u.front() = -1.25f;
  u.back() = 1.25f;
  return u;
}

// Clamped 4-tap decimation in double, one axis.
std::vector<double> decimate2(const std::vector<double>& v) {
  const double w[4] = {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
  std::vector<double> out(v.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int k = 0; k < 4; ++k) {
      const long x = std::clamp(long(2 * i) - 1 + k, 0L, long(v.size()) - 1);
      out[i] += w[k] * v[std::size_t(x)];
    }
  return out;
}

}  // namespace

TEST_CASE("psnr closed forms") {
  CHECK(psnr(constant(4, 4, 0.0f), constant(4, 4, 0.5f)) == doctest::Approx(6.0206).epsilon(1e-5));
  CHECK(psnr(constant(4, 4, 0.0f), constant(4, 4, 0.5f)) == doctest::Approx(10 * std::log10(4.0)).epsilon(1e-12));
  CHECK(psnr(constant(3, 5, 0.2f), constant(3, 5, 0.3f), 255.0) ==
        doctest::Approx(10 * std::log10(255.0 * 255.0 / (0.1 * 0.1))).epsilon(1e-5));
  Rng rng(1);
  const auto x = random_image(9, 7, rng);
  CHECK(psnr(x, x) == kInfinitePsnr);
  CHECK(format_db(kInfinitePsnr) == "inf");
  CHECK(format_db(6.020599913) == "6.0206");
  CHECK_THROWS(psnr(constant(4, 4, 0.0f), constant(4, 5, 0.0f)));
}

TEST_CASE("psnr and ssim are symmetric") {
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_image(16, 13, rng), b = random_image(16, 13, rng);
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("psnr decreases as noise grows") {
  Rng rng(3);
  const auto clean = random_image(20, 20, rng);
  std::vector<float> noise(clean.data.size());
  for (auto& n : noise) n = float(rng.uniform(-1.0, 1.0));
  double prev = kInfinitePsnr;
  for (float amp : {0.01f, 0.02f, 0.05f, 0.1f, 0.2f}) {
    ImageRGB noisy = clean;
    for (std::size_t k = 0; k < noise.size(); ++k) noisy.data[k] += amp * noise[k];
    const double p = psnr(clean, noisy);
    CHECK(p < prev);
    CHECK(p > 0.0);
    prev = p;
  }
}

TEST_CASE("ssim agrees with direct window evaluation") {
  Rng rng(4);
  for (auto [h, w] : {std::pair{11, 11}, {16, 13}, {24, 30}}) {
    const auto a = random_image(std::size_t(h), std::size_t(w), rng);
    auto b = a;
    for (auto& v : b.data) v = std::clamp(v + float(rng.uniform(-0.2, 0.2)), 0.0f, 1.0f);
    const double s = ssim(a, b);
    CHECK(s == doctest::Approx(ssim_oracle(a, b)).epsilon(1e-6));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ssim of a binary image against its inverse is negative") {
  Rng rng(5);
  ImageRGB a(16, 16);
  for (auto& v : a.data) v = rng.uniform(0.0, 1.0) < 0.5 ? 0.0f : 1.0f;
  ImageRGB inv = a;
  for (auto& v : inv.data) v = 1.0f - v;
  CHECK(ssim(a, inv) < 0.0);
  CHECK(ssim(a, inv) == doctest::Approx(ssim_oracle(a, inv)).epsilon(1e-6));
}

TEST_CASE("lr_psnr of identical images is infinite") {
  Rng rng(6);
  for (bool aa : {false, true}) {
    const auto x = random_image(12, 18, rng);
    CHECK(lr_psnr(x, x, 4, 6, {-0.5, aa}) == kInfinitePsnr);
  }
}

TEST_CASE("perturbations in the decimator null space leave lr_psnr infinite") {
  const std::size_t n = 16;
  const auto u = null_axis(n);
  std::vector<double> ud(u.begin(), u.end());
  for (double v : decimate2(ud)) REQUIRE(v == 0.0);

  Rng rng(7);
  ImageRGB hr(n, n), sr(n, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        const float base = float(64 + rng.below(128)) / 256.0f;
        hr.at(y, x, c) = base;
        sr.at(y, x, c) = base + u[y] * u[x] / 16.0f;
      }
  const double full = psnr(sr, hr);
  CHECK(std::isfinite(full));
  CHECK(full < 40.0);
  CHECK(lr_psnr(sr, hr, n / 2, n / 2, {-0.5, false}) == kInfinitePsnr);
}

TEST_CASE("bicubic round trip has high but finite lr_psnr") {
  Rng rng(8);
  const auto hr = random_image(24, 24, rng);
  const BicubicKernel down{-0.5, true}, up{-0.5, false};
  const auto lr = from_tensor(bicubic_resize(to_tensor(hr), 12, 12, down));
  const auto sr = clamp01(from_tensor(bicubic_resize(to_tensor(lr), 24, 24, up)));
  const double lp = lr_psnr(sr, hr, 12, 12, down);
  CHECK(std::isfinite(lp));
  CHECK(lp > psnr(sr, hr));
}

TEST_CASE("evaluation convention flags") {
  // Y channel of gray images scales differences by 219/255.
  MetricOptions y;
  y.y_channel = true;
  const double d = 0.5 * 219.0 / 255.0;
  CHECK(psnr(constant(6, 6, 0.0f), constant(6, 6, 0.5f), 1.0, y) ==
        doctest::Approx(10 * std::log10(1.0 / (d * d))).epsilon(1e-6));

  // Differences confined to the border vanish under cropping.
  Rng rng(9);
  const auto a = random_image(20, 20, rng);
  auto b = a;
  for (std::size_t x = 0; x < 20; ++x) b.at(0, x, 1) += 0.3f, b.at(19, x, 0) -= 0.2f;
  MetricOptions crop;
  crop.crop_border = 1;
  CHECK(std::isfinite(psnr(a, b)));
  CHECK(psnr(a, b, 1.0, crop) == kInfinitePsnr);
  CHECK(ssim(a, b, 1.0, crop) == doctest::Approx(1.0).epsilon(1e-12));

  // Sub-level differences vanish under 8-bit quantization.
  ImageRGB q1(5, 5), q2(5, 5);
  for (std::size_t k = 0; k < q1.data.size(); ++k) {
    q1.data[k] = float(k % 200) / 255.0f;
    q2.data[k] = q1.data[k] + 0.4f / 255.0f;
  }
  MetricOptions quant;
  quant.quantize = true;
  CHECK(std::isfinite(psnr(q1, q2)));
  CHECK(psnr(q1, q2, 1.0, quant) == kInfinitePsnr);
}
