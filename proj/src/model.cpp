// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/model.hpp"

#include <algorithm>
#include <string>

#include "diinn/coords.hpp"
#include "diinn/indexing.hpp"

namespace diinn {

void validate(const ModelConfig& cfg) {
  validate(cfg.encoder);
  validate(cfg.decoder);
  if (cfg.encoder.in_channels != 3) throw ConfigError("encoder in_channels must be 3 (RGB)");
  if (cfg.decoder.out_channels != 3) throw ConfigError("decoder out_channels must be 3 (RGB)");
}

std::vector<ParamSpec> model_param_specs(const ModelConfig& cfg) {
  validate(cfg);
  auto specs = encoder_param_specs(cfg.encoder);
  auto dec = decoder_param_specs(cfg.decoder, cfg.content_channels());
  specs.insert(specs.end(), dec.begin(), dec.end());
  return specs;
}

template <class T>
Model<T> Model<T>::initialize(const ModelConfig& cfg) {
  Rng rng = Rng(cfg.seed).stream("init");
  return Model<T>{cfg, ParamSet<T>::initialize(model_param_specs(cfg), rng)};
}

template <class T>
Var<T> forward(Tape<T>& tape, Model<T>& model, Var<T> lr, std::size_t out_h, std::size_t out_w) {
  const auto& s = lr.shape();
  if (s.size() != 4 || s[1] != 3) throw DimensionError("forward: LR batch must be [B,3,h,w]");
  if (out_h < s[2] || out_w < s[3])
    throw ArgumentError("forward: target " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                        " is smaller than the input; use bicubic_resize to downscale");
  BoundParams<T> params(tape, model.params);
  Var<T> feat = unfold3(encode(lr, params, model.config.encoder));
  Var<T> z = nearest_upsample(feat, out_h, out_w);
  const CoordGrid grid = make_grid(s[2], s[3], out_h, out_w);
  Var<T> p = tape.constant(make_positional<T>(grid, s[0]));
  return decode(z, p, params, model.config.decoder);
}

Tensor<float> predict(const Model<float>& model, const Tensor<float>& lr, std::size_t out_h,
                      std::size_t out_w) {
  Tensor<float> batch = lr.rank() == 3 ? lr.reshaped({1, lr.dim(0), lr.dim(1), lr.dim(2)}) : lr;
  if (batch.rank() != 4 || batch.dim(0) != 1 || batch.dim(1) != 3)
    throw DimensionError("predict: expected one [3,h,w] image, got " + shape_str(lr.shape()));
  const std::size_t h = batch.dim(2), w = batch.dim(3);
  if (out_h < h || out_w < w)
    throw ArgumentError("super-resolution target " + std::to_string(out_h) + "x" +
                        std::to_string(out_w) + " is smaller than the input " +
                        std::to_string(h) + "x" + std::to_string(w));

  // Parameters are bound read-only; a local copy keeps this function const.
  ParamSet<float> params = model.params;
  params.set_requires_grad(false);

  Tensor<float> feat;
  {
    Tape<float> tape;
    BoundParams<float> bound(tape, params);
    feat = unfold3(encode(tape.constant(batch), bound, model.config.encoder)).value();
  }
  const std::size_t cz = feat.dim(1);
  const CoordGrid grid = make_grid(h, w, out_h, out_w);
  const Tensor<float> pos = make_positional<float>(grid, 1);
  const std::size_t plane = out_h * out_w;

  std::vector<std::size_t> cols(out_w);
  for (std::size_t x = 0; x < out_w; ++x) cols[x] = nearest_source_index(x, w, out_w);

  Tensor<float> out({3, out_h, out_w});
  // The decoder is per-pixel, so decoding row bands gives the same values as
  // decoding the whole grid at once.
  const std::size_t band = std::max<std::size_t>(1, (std::size_t(1) << 16) / out_w);
  for (std::size_t r0 = 0; r0 < out_h; r0 += band) {
    const std::size_t rows = std::min(band, out_h - r0);
    Tensor<float> zb({1, cz, rows, out_w});
    Tensor<float> pb({1, 3, rows, out_w});
    for (std::size_t c = 0; c < cz; ++c)
      for (std::size_t y = 0; y < rows; ++y) {
        const std::size_t sy = nearest_source_index(r0 + y, h, out_h);
        const float* src = feat.data().data() + (c * h + sy) * w;
        float* dst = zb.data().data() + (c * rows + y) * out_w;
        for (std::size_t x = 0; x < out_w; ++x) dst[x] = src[cols[x]];
      }
    for (std::size_t c = 0; c < 3; ++c)
      std::copy_n(pos.data().data() + c * plane + r0 * out_w, rows * out_w,
                  pb.data().data() + c * rows * out_w);
    Tape<float> tape;
    BoundParams<float> bound(tape, params);
    const Tensor<float>& y =
        decode(tape.constant(std::move(zb)), tape.constant(std::move(pb)), bound,
               model.config.decoder)
            .value();
    for (std::size_t c = 0; c < 3; ++c)
      std::copy_n(y.data().data() + c * rows * out_w, rows * out_w,
                  out.data().data() + c * plane + r0 * out_w);
  }
  return out;
}

ImageRGB super_resolve(const Model<float>& model, const ImageRGB& lr, std::size_t out_h,
                       std::size_t out_w) {
  return clamp01(from_tensor(predict(model, to_tensor(lr), out_h, out_w)));
}

template struct Model<float>;
template struct Model<double>;
template Var<float> forward<float>(Tape<float>&, Model<float>&, Var<float>, std::size_t,
                                   std::size_t);
template Var<double> forward<double>(Tape<double>&, Model<double>&, Var<double>, std::size_t,
                                     std::size_t);

}  // namespace diinn
