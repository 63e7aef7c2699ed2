// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/encoder.hpp"

#include <cmath>
#include <string>

namespace diinn {

namespace {

void add_conv(std::vector<ParamSpec>& specs, const std::string& name, std::size_t in,
              std::size_t out, std::size_t k) {
  const double bound = 1.0 / std::sqrt(double(in * k * k));
  specs.push_back({name + ".weight", {out, in, k, k}, ParamSpec::Init::Uniform, bound});
  specs.push_back({name + ".bias", {out}, ParamSpec::Init::Uniform, bound});
}

std::string block_name(std::size_t i) { return "enc.block" + std::to_string(i); }

}  // namespace

void validate(const EncoderConfig& cfg) {
  if (cfg.feat_channels < 1) throw ConfigError("encoder feat_channels must be >= 1");
  if (cfg.in_channels < 1) throw ConfigError("encoder in_channels must be >= 1");
  if (cfg.kernel % 2 == 0) throw ConfigError("encoder kernel must be odd");
}

std::vector<ParamSpec> encoder_param_specs(const EncoderConfig& cfg) {
  validate(cfg);
  std::vector<ParamSpec> specs;
  const std::size_t f = cfg.feat_channels, k = cfg.kernel;
  add_conv(specs, "enc.head", cfg.in_channels, f, k);
  for (std::size_t i = 0; i < cfg.num_blocks; ++i) {
    add_conv(specs, block_name(i) + ".conv1", f, f, k);
    add_conv(specs, block_name(i) + ".conv2", f, f, k);
  }
  add_conv(specs, "enc.tail", f, f, k);
  return specs;
}

template <class T>
Var<T> encode(Var<T> img, const BoundParams<T>& params, const EncoderConfig& cfg) {
  const std::size_t pad = (cfg.kernel - 1) / 2;
  auto conv = [&](Var<T> x, const std::string& name) {
    return conv2d(x, params[name + ".weight"], params[name + ".bias"], pad);
  };
  Var<T> x = conv(img, "enc.head");
  for (std::size_t i = 0; i < cfg.num_blocks; ++i) {
    Var<T> y = conv(relu(conv(x, block_name(i) + ".conv1")), block_name(i) + ".conv2");
    x = add(x, y);
  }
  return conv(x, "enc.tail");
}

template Var<float> encode<float>(Var<float>, const BoundParams<float>&, const EncoderConfig&);
template Var<double> encode<double>(Var<double>, const BoundParams<double>&, const EncoderConfig&);

}  // namespace diinn
