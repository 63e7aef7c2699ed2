// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "diinn/rng.hpp"
#include "diinn/tape.hpp"

namespace diinn {

/// Declared shape and initializer of one trainable tensor.
struct ParamSpec {
  enum class Init { Zeros, Uniform };
  std::string name;
  Shape shape;
  Init init = Init::Uniform;
  double bound = 0.0;  // Uniform(-bound, bound)
};

/// Named parameters in declaration order (the order is part of the
/// checkpoint format and of the optimizer state layout).
template <class T>
class ParamSet {
 public:
  using Entry = std::pair<std::string, Tensor<T>>;

  void add(std::string name, Tensor<T> t) {
    if (index_.count(name)) throw SchemaError("duplicate parameter " + name);
    index_[name] = entries_.size();
    entries_.emplace_back(std::move(name), std::move(t));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Tensor<T>& get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw SchemaError("no parameter named " + name);
    return entries_[it->second].second;
  }
  const Tensor<T>& get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw SchemaError("no parameter named " + name);
    return entries_[it->second].second;
  }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.second.numel();
    return n;
  }

  std::vector<Tensor<T>*> pointers() {
    std::vector<Tensor<T>*> out;
    for (auto& e : entries_) out.push_back(&e.second);
    return out;
  }

  void set_requires_grad(bool on) {
    for (auto& e : entries_) e.second.set_requires_grad(on);
  }
  void zero_grad() {
    for (auto& e : entries_) e.second.zero_grad();
  }

  template <class U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& e : entries_) out.add(e.first, e.second.template cast<U>());
    return out;
  }

  static ParamSet initialize(const std::vector<ParamSpec>& specs, Rng& rng) {
    ParamSet out;
    for (const auto& s : specs) {
      Tensor<T> t(s.shape);
      if (s.init == ParamSpec::Init::Uniform)
        for (auto& v : t.data()) v = T(rng.uniform(-s.bound, s.bound));
      out.add(s.name, std::move(t));
    }
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parameters bound as leaves of one tape, looked up by name.
template <class T>
class BoundParams {
 public:
  BoundParams(Tape<T>& tape, ParamSet<T>& params) {
    for (auto& e : params.entries()) vars_.emplace(e.first, tape.parameter(e.second));
  }
  Var<T> operator[](const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw SchemaError("no parameter named " + name);
    return it->second;
  }

 private:
  std::unordered_map<std::string, Var<T>> vars_;
};

}  // namespace diinn
