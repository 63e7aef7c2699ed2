// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Per-pixel enumeration of the coordinate definitions, written directly from
// the geometric description in exact rational arithmetic: output pixel i has
// centre c = (i + 1/2) / s in LR units, its nearest LR pixel is clamp(floor(c)),
// and its local coordinate is twice the offset from that pixel's centre,
// clamped to [-1, 1]. Values are rounded to float once, at the end.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>

namespace diinn::test {

struct Rational {
  long num = 0, den = 1;

  Rational(long n = 0, long d = 1) : num(n), den(d) {
    if (den < 0) num = -num, den = -den;
    const long g = std::gcd(num, den);
    if (g > 1) num /= g, den /= g;
  }
  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  long floor() const { return num >= 0 ? num / den : -((-num + den - 1) / den); }
  float to_float() const { return float(double(num) / double(den)); }
};

struct AxisSample {
  long nearest;
  float local;
  float global;
};

inline AxisSample brute_force_axis(std::size_t i, std::size_t lr, std::size_t out) {
  const Rational half{1, 2}, s{long(out), long(lr)};
  const Rational c = (Rational(long(i)) + half) / s;
  const long j = std::clamp(c.floor(), 0L, long(lr) - 1);
  Rational local = Rational(2) * (c - (Rational(j) + half));
  local = std::clamp(local, Rational(-1), Rational(1));
  const Rational global = Rational(-1) + (Rational(2 * long(i)) + Rational(1)) / Rational(long(out));
  return {j, local.to_float(), global.to_float()};
}

}  // namespace diinn::test
