// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Times the serial reference kernels against the OpenMP kernels on
// encoder-sized convolutions and degradation-sized resizes, and reports the
// largest difference between the two.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "diinn/kernels.hpp"
#include "diinn/resample.hpp"
#include "diinn/rng.hpp"

using namespace diinn;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

std::vector<float> random_vec(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = float(rng.uniform(-1.0, 1.0));
  return v;
}

double max_diff(const std::vector<float>& a, const std::vector<float>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, double(std::abs(a[i] - b[i])));
  return d;
}

void row(const std::string& name, double ref_ms, double serial_ms, double par_ms, double diff) {
  std::printf("%-28s %10.3f %10.3f %10.3f %8.2fx %10.2e\n", name.c_str(), ref_ms, serial_ms, par_ms,
              ref_ms / par_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reference vs OpenMP kernel benchmark"};
  int repeats = 5, threads = 0;
  std::size_t channels = 64, size = 48;
  app.add_option("--repeats", repeats, "timed runs per kernel")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads for the parallel column (0: runtime default)");
  app.add_option("--channels", channels, "convolution channels");
  app.add_option("--size", size, "convolution spatial size");
  CLI11_PARSE(app, argc, argv);

  set_num_threads(threads);
  const int par_threads = max_threads();
  Rng rng(1);
  std::printf("threads %d, repeats %d\n", par_threads, repeats);
  std::printf("%-28s %10s %10s %10s %9s %10s\n", "kernel", "ref_ms", "omp1_ms", "ompN_ms", "speedup", "max_diff");

  ConvDims d;
  d.in_c = d.out_c = channels;
  d.in_h = d.in_w = size;
  d.kh = d.kw = 3;
  d.pad = 1;
  const auto in = random_vec(d.in_numel(), rng), w = random_vec(d.weight_numel(), rng), b = random_vec(d.out_c, rng);
  const auto gout = random_vec(d.out_numel(), rng);
  const std::string shape = std::to_string(channels) + "x" + std::to_string(size) + "^2";

  auto bench3 = [&](const std::string& name, std::size_t out_n, auto ref_fn, auto fast_fn) {
    std::vector<float> r(out_n), f(out_n);
    const double ref_ms = time_ms([&] { std::fill(r.begin(), r.end(), 0.0f), ref_fn(r); }, repeats);
    set_num_threads(1);
    const double serial_ms = time_ms([&] { std::fill(f.begin(), f.end(), 0.0f), fast_fn(f); }, repeats);
    set_num_threads(par_threads);
    const double par_ms = time_ms([&] { std::fill(f.begin(), f.end(), 0.0f), fast_fn(f); }, repeats);
    row(name, ref_ms, serial_ms, par_ms, max_diff(r, f));
  };

  bench3("conv3x3 forward " + shape, d.out_numel(),
         [&](std::vector<float>& o) { reference::conv2d_forward<float>(d, in, w, b, o); },
         [&](std::vector<float>& o) { kernels::conv2d_forward<float>(d, in, w, b, o); });
  bench3("conv3x3 grad input " + shape, d.in_numel(),
         [&](std::vector<float>& o) { reference::conv2d_backward_input<float>(d, gout, w, o); },
         [&](std::vector<float>& o) { kernels::conv2d_backward_input<float>(d, gout, w, o); });
  std::vector<float> gb(d.out_c);
  bench3("conv3x3 grad weight " + shape, d.weight_numel(),
         [&](std::vector<float>& o) {
           std::fill(gb.begin(), gb.end(), 0.0f);
           reference::conv2d_backward_weight<float>(d, gout, in, o, gb);
         },
         [&](std::vector<float>& o) {
           std::fill(gb.begin(), gb.end(), 0.0f);
           kernels::conv2d_backward_weight<float>(d, gout, in, o, gb);
         });

  struct Resize {
    std::size_t in, out;
    bool aa;
  };
  for (const Resize& r : {Resize{192, 48, true}, Resize{96, 32, true}, Resize{48, 151, false}}) {
    Tensor<float> img({3, r.in, r.in});
    for (auto& v : img.data()) v = float(rng.uniform(0.0, 1.0));
    const BicubicKernel k{-0.5, r.aa};
    Tensor<float> ref_out, fast_out;
    const double ref_ms = time_ms([&] { ref_out = reference::bicubic_resize(img, r.out, r.out, k); }, repeats);
    set_num_threads(1);
    const double serial_ms = time_ms([&] { fast_out = bicubic_resize(img, r.out, r.out, k); }, repeats);
    set_num_threads(par_threads);
    const double par_ms = time_ms([&] { fast_out = bicubic_resize(img, r.out, r.out, k); }, repeats);
    double diff = 0.0;
    for (std::size_t i = 0; i < ref_out.numel(); ++i) diff = std::max(diff, double(std::abs(ref_out[i] - fast_out[i])));
    row("bicubic " + std::to_string(r.in) + "->" + std::to_string(r.out) + (r.aa ? " aa" : ""), ref_ms, serial_ms,
        par_ms, diff);
  }
  return 0;
}
