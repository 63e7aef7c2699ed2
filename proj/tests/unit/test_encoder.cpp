// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdint>

#include "diinn/encoder.hpp"
#include "diinn/gradcheck.hpp"
#include "util.hpp"

using namespace diinn;
using diinn::test::random_tensor;

namespace {

Tensor<double> unfold_value(const Tensor<double>& x) {
  Tape<double> t;
  return unfold3(t.constant(x)).value();
}

}  // namespace

TEST_CASE("unfold3 on a constant map") {
  const double c = 0.25;
  const auto u = unfold_value(Tensor<double>({1, 1, 4, 5}, c));
  REQUIRE(u.shape() == Shape{1, 9, 4, 5});
  for (std::size_t k = 0; k < 9; ++k) CHECK(u.at(0, k, 2, 2) == c);
  int nonzero = 0;
  for (std::size_t k = 0; k < 9; ++k) nonzero += u.at(0, k, 0, 0) == c ? 1 : 0;
  CHECK(nonzero == 4);
  for (std::size_t k : {0u, 1u, 2u, 3u, 6u}) CHECK(u.at(0, k, 0, 0) == 0.0);
}

TEST_CASE("unfold3 of a single pixel keeps only the centre block") {
  Rng rng(1);
  const auto x = random_tensor({2, 3, 1, 1}, rng);
  const auto u = unfold_value(x);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t k = 0; k < 9; ++k)
      for (std::size_t c = 0; c < 3; ++c) CHECK(u.at(b, k * 3 + c, 0, 0) == (k == 4 ? x.at(b, c, 0, 0) : 0.0));
}

TEST_CASE("unfold3 blocks are shifted copies of the input") {
  Rng rng(2);
  const auto x = random_tensor({2, 3, 5, 6}, rng);
  const auto u = unfold_value(x);
  for (std::size_t k = 0; k < 9; ++k) {
    const long dy = long(k / 3) - 1, dx = long(k % 3) - 1;
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 3; ++c)
        for (long y = 0; y < 5; ++y)
          for (long xx = 0; xx < 6; ++xx) {
            const long sy = y + dy, sx = xx + dx;
            const bool in = sy >= 0 && sy < 5 && sx >= 0 && sx < 6;
            const double expect = in ? x.at(b, c, std::size_t(sy), std::size_t(sx)) : 0.0;
            CHECK(u.at(b, k * 3 + c, std::size_t(y), std::size_t(xx)) == expect);
          }
  }
}

TEST_CASE("encoder preserves spatial size and emits feat_channels") {
  EncoderConfig cfg;
  cfg.feat_channels = 5;
  cfg.num_blocks = 2;
  Rng rng(3);
  auto params = ParamSet<double>::initialize(encoder_param_specs(cfg), rng);
  for (auto [h, w] : {std::pair{1, 1}, {4, 7}, {9, 3}}) {
    Tape<double> t;
    BoundParams<double> bp(t, params);
    auto y = encode(t.constant(random_tensor({2, 3, std::size_t(h), std::size_t(w)}, rng, 0.0, 1.0)), bp, cfg);
    CHECK(y.shape() == Shape{2, 5, std::size_t(h), std::size_t(w)});
  }
}

TEST_CASE("a block with zero second convolution is the identity") {
  EncoderConfig cfg;
  cfg.feat_channels = 4;
  cfg.num_blocks = 1;
  Rng rng(4);
  auto params = ParamSet<double>::initialize(encoder_param_specs(cfg), rng);
  params.get("enc.block0.conv2.weight").fill(0.0);
  params.get("enc.block0.conv2.bias").fill(0.0);
  EncoderConfig none = cfg;
  none.num_blocks = 0;
  ParamSet<double> head_tail;
  for (const auto& [name, tensor] : params.entries())
    if (name.rfind("enc.block", 0) != 0) head_tail.add(name, tensor);
  const auto x = random_tensor({1, 3, 5, 5}, rng, 0.0, 1.0);
  Tape<double> t;
  BoundParams<double> b1(t, params), b0(t, head_tail);
  CHECK(encode(t.constant(x), b1, cfg).value() == encode(t.constant(x), b0, none).value());
}

TEST_CASE("encoder gradients match central differences") {
  EncoderConfig cfg;
  cfg.feat_channels = 8;
  cfg.num_blocks = 1;
  // Resample until every relu input and L1 residual stays clear of its kink
  // under a step of h.
  for (std::uint64_t seed = 5;; ++seed) {
    REQUIRE(seed < 200);
    Rng rng(seed);
    auto params = ParamSet<double>::initialize(encoder_param_specs(cfg), rng);
    const auto x = random_tensor({1, 3, 6, 6}, rng, 0.0, 1.0);
    const auto r = random_tensor({1, 8, 6, 6}, rng);
    LossBuilder f = [&](Tape<double>& t) {
      BoundParams<double> bp(t, params);
      return l1_loss(encode(t.constant(x), bp, cfg), t.constant(r));
    };
    Tape<double> probe;
    f(probe);
    if (probe.kink_margin() < 1e-3) continue;
    const auto rep = grad_check(f, params.pointers(), 1e-4);
    CAPTURE(seed);
    CAPTURE(rep.worst_analytic);
    CAPTURE(rep.worst_numeric);
    CHECK(rep.max_rel_error < 1e-4);
    break;
  }
}

TEST_CASE("encoder config validation") {
  EncoderConfig cfg;
  cfg.feat_channels = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.feat_channels = 4;
  cfg.kernel = 2;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
