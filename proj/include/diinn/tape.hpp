// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Reverse-mode differentiation over Tensor<T>.
//
// A Tape records every primitive op in creation order; node ids are therefore
// a topological order and backward() walks them once, from the loss down.
// Parameters are linked by pointer, so gradients land in Tensor::grad() of the
// caller's parameter tensors and accumulate across backward() calls.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "diinn/tensor.hpp"

namespace diinn {

template <class T>
class Tape;

/// Handle to a node of a Tape. Cheap to copy; valid while the tape lives.
template <class T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  const Tensor<T>& value() const { return tape->value(*this); }
  const Shape& shape() const { return value().shape(); }
};

template <class T>
class Tape {
 public:
  struct Node;
  using BackwardFn = std::function<void(Tape&, const Node&)>;

  struct Node {
    std::size_t id = 0;
    Tensor<T> value;              // owned value (unused for parameter leaves)
    Tensor<T>* param = nullptr;   // linked parameter, if a leaf
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool needs_grad = false;
    std::vector<T> grad;          // empty until something flows in

    const Tensor<T>& val() const { return param ? *param : value; }
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf bound to `p`. Gradients reach p.grad() only if p.requires_grad().
  Var<T> parameter(Tensor<T>& p) {
    auto n = std::make_unique<Node>();
    n->param = &p;
    n->needs_grad = p.requires_grad();
    return push(std::move(n));
  }

  Var<T> constant(Tensor<T> t) {
    auto n = std::make_unique<Node>();
    n->value = std::move(t);
    return push(std::move(n));
  }

  /// Used by ops: appends a node whose backward is kept only if a parent needs it.
  Var<T> record(Tensor<T> value, std::vector<std::size_t> parents, BackwardFn fn) {
    auto n = std::make_unique<Node>();
    n->value = std::move(value);
    for (auto p : parents) n->needs_grad = n->needs_grad || nodes_.at(p)->needs_grad;
    n->parents = std::move(parents);
    if (n->needs_grad) n->backward = std::move(fn);
    return push(std::move(n));
  }

  const Tensor<T>& value(Var<T> v) const { return nodes_.at(v.id)->val(); }
  const Node& node(std::size_t id) const { return *nodes_.at(id); }
  bool needs_grad(std::size_t id) const { return nodes_.at(id)->needs_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Gradient accumulator of a node, allocated (zeroed) on first use.
  std::span<T> grad_buffer(std::size_t id) {
    auto& n = *nodes_.at(id);
    if (n.grad.empty()) n.grad.assign(n.val().numel(), T(0));
    return n.grad;
  }

  /// Smallest |input| seen by a non-differentiable point (relu input, l1
  /// residual) while recording; +inf if none.
  double kink_margin() const { return kink_margin_; }
  void note_kink_distance(double d) { kink_margin_ = std::min(kink_margin_, d); }

  /// Gradient of the last backward() w.r.t. node v; empty if none reached it.
  std::span<const T> grad(Var<T> v) const { return nodes_.at(v.id)->grad; }

  /// Back-propagates d(loss)/d(node) for a single-element loss. Intermediate
  /// node gradients are reset first; parameter gradients accumulate.
  void backward(Var<T> loss) {
    if (value(loss).numel() != 1) throw DimensionError("backward() needs a scalar loss");
    for (auto& n : nodes_) n->grad.clear();
    grad_buffer(loss.id)[0] = T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = *nodes_[i];
      if (n.grad.empty() || !n.needs_grad) continue;
      if (n.backward) n.backward(*this, n);
      if (n.param && n.param->requires_grad()) {
        auto dst = n.param->grad();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
      }
    }
  }

 private:
  Var<T> push(std::unique_ptr<Node> n) {
    n->id = nodes_.size();
    nodes_.push_back(std::move(n));
    return Var<T>{this, nodes_.back()->id};
  }

  std::vector<std::unique_ptr<Node>> nodes_;
  double kink_margin_ = std::numeric_limits<double>::infinity();
};

// Differentiable primitives. All are pure: operands are never modified.

/// Zero-padded 2-D convolution, NCHW. weight [O,C,kh,kw], bias [O] (may be a
/// default Var{} with tape == nullptr for no bias).
template <class T>
Var<T> conv2d(Var<T> x, Var<T> weight, Var<T> bias, std::size_t padding);

/// Per-pixel dense layer over the channel axis (1x1 convolution). weight [O,C]
/// or [O,C,1,1].
template <class T>
Var<T> dense(Var<T> x, Var<T> weight, Var<T> bias);

template <class T>
Var<T> relu(Var<T> x);

/// sin(omega * x)
template <class T>
Var<T> sin(Var<T> x, T omega = T(1));

template <class T>
Var<T> hadamard(Var<T> a, Var<T> b);

template <class T>
Var<T> add(Var<T> a, Var<T> b);

template <class T>
Var<T> scale(Var<T> x, T factor);

/// Concatenates rank-4 tensors along dim 1.
template <class T>
Var<T> concat_channels(const std::vector<Var<T>>& xs);

/// Channels [begin, end) of a rank-4 tensor.
template <class T>
Var<T> slice_channels(Var<T> x, std::size_t begin, std::size_t end);

/// Mean absolute difference; subgradient 0 at ties.
template <class T>
Var<T> l1_loss(Var<T> pred, Var<T> target);

/// Nearest-neighbour upsampling with half-pixel centres; gradient scatters
/// additively back to source cells.
template <class T>
Var<T> nearest_upsample(Var<T> x, std::size_t out_h, std::size_t out_w);

/// 3x3 feature unfolding: [B,F,h,w] -> [B,9F,h,w], block k holds neighbour
/// (k/3-1, k%3-1), zero outside the image.
template <class T>
Var<T> unfold3(Var<T> x);

}  // namespace diinn
