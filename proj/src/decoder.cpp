// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/decoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

namespace diinn {

std::string to_string(ModulationInput m) {
  switch (m) {
    case ModulationInput::MOnly: return "M_ONLY";
    case ModulationInput::MZ: return "M_Z";
    case ModulationInput::SZ: return "S_Z";
  }
  return "?";
}

ModulationInput parse_modulation_input(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "M_ONLY") return ModulationInput::MOnly;
  if (u == "M_Z") return ModulationInput::MZ;
  if (u == "S_Z") return ModulationInput::SZ;
  throw ConfigError("unknown modulation input mode '" + s + "' (expected M_ONLY, M_Z or S_Z)");
}

void validate(const DecoderConfig& cfg) {
  if (cfg.num_layers < 1) throw ConfigError("decoder num_layers must be >= 1");
  if (cfg.hidden < 1) throw ConfigError("decoder hidden must be >= 1");
  if (cfg.out_channels < 1) throw ConfigError("decoder out_channels must be >= 1");
  if (!(cfg.omega0 > 0.0)) throw ConfigError("decoder omega0 must be positive");
}

namespace {

std::string layer(const char* branch, std::size_t i) { return std::string("dec.") + branch + std::to_string(i); }

std::size_t modulation_fan_in(const DecoderConfig& cfg, std::size_t i, std::size_t cz) {
  if (i == 0) return cz;
  return cfg.mode == ModulationInput::MOnly ? cfg.hidden : cfg.hidden + cz;
}

}  // namespace

std::vector<ParamSpec> decoder_param_specs(const DecoderConfig& cfg, std::size_t cz) {
  validate(cfg);
  using Init = ParamSpec::Init;
  const std::size_t h = cfg.hidden;
  std::vector<ParamSpec> specs;
  auto dense_spec = [&](const std::string& name, std::size_t in, std::size_t out, double wbound) {
    specs.push_back({name + ".weight", {out, in}, Init::Uniform, wbound});
    specs.push_back({name + ".bias", {out}, Init::Uniform, 1.0 / std::sqrt(double(in))});
  };

  std::size_t pos_width = 3;
  if (cfg.init_positional) {
    dense_spec("dec.ip", 3, cz, 1.0 / 3.0);
    pos_width = cz;
  }
  for (std::size_t i = 0; i < cfg.num_layers; ++i) {
    const std::size_t fm = modulation_fan_in(cfg, i, cz);
    dense_spec(layer("mod", i), fm, h, 1.0 / std::sqrt(double(fm)));
    const std::size_t fs = i == 0 ? pos_width : h;
    const double sbound = i == 0 ? 1.0 / double(fs) : std::sqrt(6.0 / double(fs)) / cfg.omega0;
    dense_spec(layer("syn", i), fs, h, sbound);
  }
  dense_spec("dec.out", h, cfg.out_channels, 1.0 / std::sqrt(double(h)));
  return specs;
}

std::size_t param_count(const DecoderConfig& cfg, std::size_t cz) {
  std::size_t n = 0;
  for (const auto& s : decoder_param_specs(cfg, cz)) n += shape_numel(s.shape);
  return n;
}

template <class T>
std::pair<Var<T>, Var<T>> init_positional(Var<T> p, Var<T> z, const BoundParams<T>& params,
                                          const DecoderConfig& cfg) {
  Var<T> lifted = sin(dense(p, params["dec.ip.weight"], params["dec.ip.bias"]), T(cfg.omega0));
  return {lifted, hadamard(lifted, z)};
}

template <class T>
Var<T> decode(Var<T> z, Var<T> p, const BoundParams<T>& params, const DecoderConfig& cfg,
              DecoderState<T>* state) {
  const auto& zs = z.shape();
  const auto& ps = p.shape();
  if (zs.size() != 4 || ps.size() != 4) throw DimensionError("decode: z and p must be NCHW");
  if (zs[0] != ps[0] || zs[2] != ps[2] || zs[3] != ps[3])
    throw DimensionError("decode: z " + shape_str(zs) + " and p " + shape_str(ps) +
                         " disagree on batch or spatial size");
  if (ps[1] != 3) throw DimensionError("decode: p must have 3 channels");

  if (cfg.init_positional) std::tie(p, z) = init_positional(p, z, params, cfg);

  const T omega = T(cfg.omega0);
  auto lin = [&](Var<T> x, const std::string& name) {
    return dense(x, params[name + ".weight"], params[name + ".bias"]);
  };

  Var<T> m = relu(lin(z, layer("mod", 0)));
  Var<T> s = hadamard(m, sin(lin(p, layer("syn", 0)), omega));
  if (state) {
    state->modulation = {m};
    state->synthesis = {s};
  }
  for (std::size_t i = 1; i < cfg.num_layers; ++i) {
    Var<T> u;
    switch (cfg.mode) {
      case ModulationInput::MOnly: u = m; break;
      case ModulationInput::MZ: u = concat_channels<T>({m, z}); break;
      case ModulationInput::SZ: u = concat_channels<T>({s, z}); break;
    }
    m = relu(lin(u, layer("mod", i)));
    s = hadamard(m, sin(lin(s, layer("syn", i)), omega));
    if (state) {
      state->modulation.push_back(m);
      state->synthesis.push_back(s);
    }
  }
  return lin(s, "dec.out");
}

template std::pair<Var<float>, Var<float>> init_positional<float>(Var<float>, Var<float>,
                                                                  const BoundParams<float>&,
                                                                  const DecoderConfig&);
template std::pair<Var<double>, Var<double>> init_positional<double>(Var<double>, Var<double>,
                                                                     const BoundParams<double>&,
                                                                     const DecoderConfig&);
template Var<float> decode<float>(Var<float>, Var<float>, const BoundParams<float>&,
                                  const DecoderConfig&, DecoderState<float>*);
template Var<double> decode<double>(Var<double>, Var<double>, const BoundParams<double>&,
                                    const DecoderConfig&, DecoderState<double>*);

}  // namespace diinn
