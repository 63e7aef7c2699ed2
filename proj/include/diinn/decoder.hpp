// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Dual interactive implicit decoder.
//
// Two N-layer per-pixel MLPs run side by side. The modulation branch (ReLU)
// reads content features z, the synthesis branch (sine) reads positional
// features p, and every synthesis activation is gated by the modulation
// activation of the same layer:
//
//   m_0 = relu(W_0 z + b_0)             s_0 = m_0 * sin(w0 (V_0 p + c_0))
//   m_i = relu(W_i u_i + b_i)           s_i = m_i * sin(w0 (V_i s_{i-1} + c_i))
//
// where u_i, the modulation input of later layers, depends on the mode:
//   MOnly  u_i = m_{i-1}
//   MZ     u_i = [m_{i-1}, z]
//   SZ     u_i = [s_{i-1}, z]   (the published model)
// The prediction is a dense projection of s_{N-1} without activation.
//
// With init_positional, a sine layer first lifts p to the width of z and
// reweights z by it: p <- sin(w0 (A p + a)), z <- p * z.

#pragma once

#include <string>
#include <vector>

#include "diinn/params.hpp"

namespace diinn {

enum class ModulationInput { MOnly, MZ, SZ };

std::string to_string(ModulationInput m);
/// Accepts "M_ONLY", "M_Z", "S_Z" (case-insensitive).
ModulationInput parse_modulation_input(const std::string& s);

struct DecoderConfig {
  std::size_t num_layers = 4;
  std::size_t hidden = 256;
  ModulationInput mode = ModulationInput::SZ;
  bool init_positional = false;
  std::size_t out_channels = 3;
  double omega0 = 30.0;  // sine frequency of the synthesis layers
};

void validate(const DecoderConfig& cfg);

/// Names: "dec.ip.*", "dec.mod<i>.*", "dec.syn<i>.*", "dec.out.*".
std::vector<ParamSpec> decoder_param_specs(const DecoderConfig& cfg, std::size_t content_channels);

/// Exact number of trainable scalars.
std::size_t param_count(const DecoderConfig& cfg, std::size_t content_channels);

/// Per-layer activations, filled when requested.
template <class T>
struct DecoderState {
  std::vector<Var<T>> modulation;  // m_0 .. m_{N-1}
  std::vector<Var<T>> synthesis;   // s_0 .. s_{N-1}
};

/// p' = sin(w0 (A p + a)), z' = p' * z.
template <class T>
std::pair<Var<T>, Var<T>> init_positional(Var<T> p, Var<T> z, const BoundParams<T>& params,
                                          const DecoderConfig& cfg);

/// z: [B,Cz,H,W] content features, p: [B,3,H,W] positional features.
/// Returns [B,out_channels,H,W].
template <class T>
Var<T> decode(Var<T> z, Var<T> p, const BoundParams<T>& params, const DecoderConfig& cfg,
              DecoderState<T>* state = nullptr);

}  // namespace diinn
