// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "diinn/checkpoint.hpp"
#include "diinn/model.hpp"
#include "util.hpp"

using namespace diinn;
using diinn::test::random_image;

namespace {

ModelConfig tiny_config(std::uint64_t seed = 0) {
  ModelConfig cfg;
  cfg.encoder.feat_channels = 4;
  cfg.encoder.num_blocks = 1;
  cfg.decoder.num_layers = 2;
  cfg.decoder.hidden = 8;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void replace_once(std::vector<std::uint8_t>& bytes, const std::string& from, const std::string& to) {
  REQUIRE(from.size() == to.size());
  std::string s(bytes.begin(), bytes.end());
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  std::memcpy(bytes.data() + pos, to.data(), to.size());
}

}  // namespace

TEST_CASE("scale 1 keeps the input shape") {
  Rng rng(1);
  const auto model = Model<float>::initialize(tiny_config());
  const auto out = super_resolve(model, random_image(7, 5, rng), 7, 5);
  CHECK(out.height == 7);
  CHECK(out.width == 5);
}

TEST_CASE("non-integer scales produce the exact requested shape") {
  Rng rng(2);
  const auto model = Model<float>::initialize(tiny_config());
  const auto lr = random_image(48, 48, rng);
  for (auto [h, w] : {std::pair{120, 120}, {151, 151}, {97, 130}}) {
    const auto out = super_resolve(model, lr, std::size_t(h), std::size_t(w));
    CHECK(out.height == std::size_t(h));
    CHECK(out.width == std::size_t(w));
    for (float v : out.data) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
}

TEST_CASE("downscaling targets are rejected") {
  Rng rng(3);
  const auto model = Model<float>::initialize(tiny_config());
  const auto lr = random_image(8, 8, rng);
  CHECK_THROWS_AS(super_resolve(model, lr, 7, 16), ArgumentError);
  CHECK_THROWS_AS(super_resolve(model, lr, 16, 7), ArgumentError);
}

TEST_CASE("initialization and inference are deterministic per seed") {
  Rng rng(4);
  const auto lr = random_image(10, 9, rng);
  const auto a = super_resolve(Model<float>::initialize(tiny_config(5)), lr, 25, 23);
  const auto b = super_resolve(Model<float>::initialize(tiny_config(5)), lr, 25, 23);
  const auto c = super_resolve(Model<float>::initialize(tiny_config(6)), lr, 25, 23);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
}

TEST_CASE("zero synthesis weights give a spatially constant image") {
  Rng rng(5);
  auto model = Model<float>::initialize(tiny_config());
  for (auto& [name, t] : model.params.entries())
    if (name.rfind("dec.syn", 0) == 0) t.fill(0.0f);
  auto& bias = model.params.get("dec.out.bias");
  bias[0] = 0.2f, bias[1] = 0.5f, bias[2] = 0.8f;
  for (std::size_t s : {1u, 2u, 3u}) {
    const auto out = super_resolve(model, random_image(6, 6, rng), 6 * s, 6 * s);
    for (std::size_t k = 0; k < out.data.size(); ++k) CHECK(out.data[k] == bias[k % 3]);
  }
}

TEST_CASE("pixels with coinciding positional triples agree across target sizes") {
  Rng rng(6);
  const auto model = Model<float>::initialize(tiny_config());
  const auto lr = to_tensor(random_image(4, 4, rng));
  // 12x12 (s = 3, 3) and 4x20 (s = 1, 5) share mean scale 3; the pixels with
  // zero local offset sit over the same LR pixel in both.
  const auto a = predict(model, lr, 12, 12);
  const auto b = predict(model, lr, 4, 20);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(a[(c * 12 + 3 * j + 1) * 12 + 3 * i + 1] == b[(c * 4 + j) * 20 + 5 * i + 2]);
}

TEST_CASE("tape forward agrees with banded inference") {
  Rng rng(7);
  auto model = Model<float>::initialize(tiny_config());
  const auto lr = to_tensor(random_image(5, 6, rng));
  const auto fast = predict(model, lr, 13, 17);
  Tape<float> tape;
  const auto full = forward(tape, model, tape.constant(lr.reshaped({1, 3, 5, 6})), 13, 17).value();
  REQUIRE(full.numel() == fast.numel());
  for (std::size_t k = 0; k < fast.numel(); ++k) CHECK(full[k] == doctest::Approx(fast[k]).epsilon(1e-5));
}

TEST_CASE("save, load, save produces identical bytes") {
  const auto dir = test::scratch_dir("ckpt_roundtrip");
  Checkpoint ckpt;
  ckpt.model = Model<float>::initialize(tiny_config(11));
  ckpt.model.config.decoder.init_positional = true;
  ckpt.model = Model<float>::initialize(ckpt.model.config);
  ckpt.has_optimizer = true;
  ckpt.optimizer.step = 3;
  Rng rng(8);
  for (const auto& [name, t] : ckpt.model.params.entries()) {
    std::vector<float> m(t.numel()), v(t.numel());
    for (auto& x : m) x = float(rng.uniform(-1, 1));
    for (auto& x : v) x = float(rng.uniform(0, 1));
    ckpt.optimizer.m.push_back(m);
    ckpt.optimizer.v.push_back(v);
  }
  ckpt.meta.epoch = 4;
  ckpt.meta.step = 17;
  ckpt.meta.epoch_step = 1;
  ckpt.meta.epoch_loss_sum = 0.123;
  ckpt.meta.last_loss = 0.1;
  ckpt.meta.antialias = false;
  save_checkpoint(ckpt, dir / "a.ckpt");
  const auto loaded = load_checkpoint(dir / "a.ckpt");
  save_checkpoint(loaded, dir / "b.ckpt");
  CHECK(read_bytes(dir / "a.ckpt") == read_bytes(dir / "b.ckpt"));
  CHECK_FALSE(std::filesystem::exists(dir / "a.ckpt.tmp"));

  CHECK(loaded.model.config.decoder.init_positional);
  CHECK(loaded.model.config.seed == 11);
  CHECK(loaded.meta.epoch == 4);
  CHECK(loaded.meta.step == 17);
  CHECK(loaded.meta.epoch_step == 1);
  CHECK(loaded.meta.epoch_loss_sum == 0.123);
  CHECK(std::isinf(loaded.meta.best_loss));
  CHECK_FALSE(loaded.meta.antialias);
  CHECK(loaded.optimizer.step == 3);
  CHECK(loaded.optimizer.m == ckpt.optimizer.m);
  CHECK(loaded.optimizer.v == ckpt.optimizer.v);
  for (std::size_t i = 0; i < ckpt.model.params.size(); ++i)
    CHECK(loaded.model.params.entries()[i].second == ckpt.model.params.entries()[i].second);
}

TEST_CASE("model-only checkpoints round-trip") {
  const auto model = Model<float>::initialize(tiny_config(12));
  const auto back = deserialize_checkpoint(serialize_checkpoint(Checkpoint{model, false, {}, {}}));
  CHECK_FALSE(back.has_optimizer);
  Rng rng(9);
  const auto lr = random_image(6, 6, rng);
  CHECK(super_resolve(model, lr, 14, 14).data == super_resolve(back.model, lr, 14, 14).data);
}

TEST_CASE("damaged checkpoints are rejected") {
  const auto bytes = serialize_checkpoint(Checkpoint{Model<float>::initialize(tiny_config()), false, {}, {}});
  for (std::size_t cut : {std::size_t(0), std::size_t(5), std::size_t(12), bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + long(cut));
    CHECK_THROWS_AS(deserialize_checkpoint(t), CorruptCheckpointError);
  }
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(deserialize_checkpoint(trailing), CorruptCheckpointError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_checkpoint(magic), CorruptCheckpointError);
  auto version = bytes;
  version[8] = std::uint8_t(kCheckpointVersion + 1);
  CHECK_THROWS_AS(deserialize_checkpoint(version), CheckpointVersionError);
}

TEST_CASE("manifest shape mismatch names the tensor") {
  auto bytes = serialize_checkpoint(Checkpoint{Model<float>::initialize(tiny_config()), false, {}, {}});
  replace_once(bytes, "\"hidden\":8", "\"hidden\":9");
  try {
    deserialize_checkpoint(bytes);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("dec.mod0.weight") != std::string::npos);
  }
}

TEST_CASE("a missing checkpoint file is an IO error") {
  CHECK_THROWS_AS(load_checkpoint(test::scratch_dir("ckpt_missing") / "none.ckpt"), IoError);
}
