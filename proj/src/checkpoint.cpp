// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "diinn/config.hpp"

namespace diinn {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'I', 'I', 'N', 'N', 'C', 'K', 'P'};

static_assert(std::endian::native == std::endian::little, "little-endian host required");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void str(const std::string& s) {
    u32(std::uint32_t(s.size()));
    bytes(s.data(), s.size());
  }
  void floats(const float* p, std::size_t n) { bytes(p, n * sizeof(float)); }

  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : buf(b) {}
  void bytes(void* p, std::size_t n) {
    if (n > buf.size() - pos) throw CorruptCheckpointError("checkpoint is truncated");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > buf.size() - pos) throw CorruptCheckpointError("checkpoint is truncated");
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
    pos += n;
    return s;
  }
  void floats(float* p, std::size_t n) {
    if (n > (buf.size() - pos) / sizeof(float)) throw CorruptCheckpointError("checkpoint is truncated");
    bytes(p, n * sizeof(float));
  }
  bool done() const { return pos == buf.size(); }

 private:
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;
};

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_from(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<double>();
}

json meta_to_json(const TrainMeta& m, const ModelConfig& cfg) {
  return json{{"epoch", m.epoch},
              {"step", m.step},
              {"epoch_step", m.epoch_step},
              {"epoch_loss_sum", m.epoch_loss_sum},
              {"last_loss", real_or_null(m.last_loss)},
              {"best_loss", real_or_null(m.best_loss)},
              {"antialias", m.antialias},
              {"omega0", cfg.decoder.omega0}};
}

TrainMeta meta_from_json(const json& j) {
  TrainMeta m;
  m.epoch = j.value("epoch", std::uint64_t(0));
  m.step = j.value("step", std::uint64_t(0));
  m.epoch_step = j.value("epoch_step", std::uint64_t(0));
  m.epoch_loss_sum = j.value("epoch_loss_sum", 0.0);
  m.last_loss = real_from(j, "last_loss", std::nan(""));
  m.best_loss = real_from(j, "best_loss", INFINITY);
  m.antialias = j.value("antialias", true);
  return m;
}

}  // namespace

Checkpoint make_checkpoint(const TrainState& state) {
  Checkpoint c{state.model, !state.optimizer.m.empty(), state.optimizer, state.meta};
  for (auto& e : c.model.params.entries()) e.second.set_requires_grad(false);
  return c;
}

TrainState to_train_state(Checkpoint ckpt) {
  TrainState s{std::move(ckpt.model), {}, ckpt.meta};
  if (ckpt.has_optimizer) s.optimizer = std::move(ckpt.optimizer);
  return s;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  json header{{"model", model_config_to_json(ckpt.model.config)},
              {"seed", ckpt.model.config.seed},
              {"meta", meta_to_json(ckpt.meta, ckpt.model.config)}};
  w.str(header.dump());

  const auto& entries = ckpt.model.params.entries();
  w.u32(std::uint32_t(entries.size()));
  for (const auto& [name, t] : entries) {
    w.str(name);
    w.u32(std::uint32_t(t.rank()));
    for (std::size_t d : t.shape()) w.u32(std::uint32_t(d));
    w.floats(t.data().data(), t.numel());
  }

  const bool opt = ckpt.has_optimizer && ckpt.optimizer.m.size() == entries.size();
  w.u8(opt ? 1 : 0);
  if (opt) {
    w.u64(ckpt.optimizer.step);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (ckpt.optimizer.m[i].size() != entries[i].second.numel())
        throw SchemaError("optimizer state does not match tensor " + entries[i].first);
      w.floats(ckpt.optimizer.m[i].data(), ckpt.optimizer.m[i].size());
      w.floats(ckpt.optimizer.v[i].data(), ckpt.optimizer.v[i].size());
    }
  }
  return std::move(w.out);
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw CorruptCheckpointError("not a checkpoint file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw CheckpointVersionError("checkpoint version " + std::to_string(version) +
                                 " is not supported (expected " +
                                 std::to_string(kCheckpointVersion) + ")");
  json header;
  try {
    header = json::parse(r.str());
  } catch (const json::exception& e) {
    throw CorruptCheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }

  Checkpoint c;
  try {
    c.model.config = model_config_from_json(header.at("model"));
    c.model.config.seed = header.value("seed", std::uint64_t(0));
    c.meta = meta_from_json(header.at("meta"));
  } catch (const json::exception& e) {
    throw CorruptCheckpointError(std::string("checkpoint header is malformed: ") + e.what());
  }
  validate(c.model.config);

  const auto specs = model_param_specs(c.model.config);
  const std::uint32_t count = r.u32();
  if (count != specs.size())
    throw SchemaError("checkpoint holds " + std::to_string(count) + " tensors, config expects " +
                      std::to_string(specs.size()));
  for (const auto& spec : specs) {
    const std::string name = r.str();
    if (name != spec.name) throw SchemaError("unexpected tensor " + name + ", expected " + spec.name);
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw CorruptCheckpointError("tensor " + name + " has implausible rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    if (shape != spec.shape)
      throw SchemaError("tensor " + name + " has shape " + shape_str(shape) + ", config expects " +
                        shape_str(spec.shape));
    std::vector<float> data(shape_numel(shape));
    r.floats(data.data(), data.size());
    c.model.params.add(name, Tensor<float>(shape, std::move(data)));
  }

  c.has_optimizer = r.u8() != 0;
  if (c.has_optimizer) {
    c.optimizer.step = r.u64();
    for (const auto& [name, t] : c.model.params.entries()) {
      std::vector<float> m(t.numel()), v(t.numel());
      r.floats(m.data(), m.size());
      r.floats(v.data(), v.size());
      c.optimizer.m.push_back(std::move(m));
      c.optimizer.v.push_back(std::move(v));
    }
  }
  if (!r.done()) throw CorruptCheckpointError("checkpoint has trailing bytes");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const Model<float>& model, const std::filesystem::path& path) {
  Checkpoint c;
  c.model = model;
  save_checkpoint(c, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace diinn
