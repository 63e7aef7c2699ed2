// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "diinn/indexing.hpp"
#include "diinn/kernels.hpp"
#include "diinn/tape.hpp"

namespace diinn {

namespace {

constexpr std::int64_t kParallelElems = 1 << 16;

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

template <class T>
void require_rank4(const Tensor<T>& t, const char* op) {
  if (t.rank() != 4)
    throw DimensionError(std::string(op) + ": expected NCHW tensor, got " + shape_str(t.shape()));
}

template <class T>
Tape<T>& tape_of(Var<T> v) {
  if (!v.tape) throw std::logic_error("Var is not attached to a tape");
  return *v.tape;
}

template <class T>
Var<T> conv_impl(Var<T> x, Var<T> weight, Var<T> bias, ConvDims d, const char* op) {
  Tape<T>& tape = tape_of(x);
  const bool has_bias = bias.tape != nullptr;
  if (has_bias && bias.value().numel() != d.out_c)
    throw DimensionError(std::string(op) + ": bias length does not match output channels");

  const Tensor<T>& xv = x.value();
  Tensor<T> out({d.batch, d.out_c, d.out_h(), d.out_w()});
  kernels::conv2d_forward<T>(d, xv.data(), weight.value().data(),
                             has_bias ? bias.value().data() : std::span<const T>{}, out.data());

  std::vector<std::size_t> parents{x.id, weight.id};
  if (has_bias) parents.push_back(bias.id);
  return tape.record(std::move(out), std::move(parents),
                     [d, has_bias](Tape<T>& t, const typename Tape<T>::Node& self) {
                       const std::size_t xi = self.parents[0], wi = self.parents[1];
                       std::span<const T> g = self.grad;
                       if (t.needs_grad(xi))
                         kernels::conv2d_backward_input<T>(d, g, t.node(wi).val().data(),
                                                           t.grad_buffer(xi));
                       const bool wg = t.needs_grad(wi);
                       const bool bg = has_bias && t.needs_grad(self.parents[2]);
                       if (!wg && !bg) return;
                       std::vector<T> scratch_w, scratch_b;
                       std::span<T> gw, gb;
                       if (wg) {
                         gw = t.grad_buffer(wi);
                       } else {
                         scratch_w.assign(d.weight_numel(), T(0));
                         gw = scratch_w;
                       }
                       if (bg) {
                         gb = t.grad_buffer(self.parents[2]);
                       }
                       kernels::conv2d_backward_weight<T>(d, g, t.node(xi).val().data(), gw, gb);
                     });
}

template <class T, class Fwd, class Bwd>
Var<T> unary(Var<T> x, Fwd fwd, Bwd bwd) {
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.shape());
  const std::int64_t n = std::int64_t(xv.numel());
  const T* src = xv.data().data();
  T* dst = out.data().data();
#pragma omp parallel for simd if (n > kParallelElems)
  for (std::int64_t i = 0; i < n; ++i) dst[i] = fwd(src[i]);
  return tape_of(x).record(std::move(out), {x.id},
                           [bwd](Tape<T>& t, const typename Tape<T>::Node& self) {
                             const std::size_t xi = self.parents[0];
                             auto gin = t.grad_buffer(xi);
                             const T* xs = t.node(xi).val().data().data();
                             const T* g = self.grad.data();
                             const std::int64_t m = std::int64_t(gin.size());
#pragma omp parallel for simd if (m > kParallelElems)
                             for (std::int64_t i = 0; i < m; ++i) gin[i] += g[i] * bwd(xs[i]);
                           });
}

}  // namespace

template <class T>
Var<T> conv2d(Var<T> x, Var<T> weight, Var<T> bias, std::size_t padding) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& wv = weight.value();
  require_rank4(xv, "conv2d");
  if (wv.rank() != 4) throw DimensionError("conv2d: weight must be [O,C,kh,kw]");
  if (wv.dim(1) != xv.dim(1))
    throw DimensionError("conv2d: input has " + std::to_string(xv.dim(1)) +
                         " channels, weight expects " + std::to_string(wv.dim(1)));
  if (wv.dim(2) % 2 == 0 || wv.dim(3) % 2 == 0)
    throw DimensionError("conv2d: kernel sizes must be odd");
  if (xv.dim(2) + 2 * padding < wv.dim(2) || xv.dim(3) + 2 * padding < wv.dim(3))
    throw DimensionError("conv2d: kernel larger than padded input");
  ConvDims d{xv.dim(0), xv.dim(1), xv.dim(2), xv.dim(3), wv.dim(0), wv.dim(2), wv.dim(3), padding};
  return conv_impl(x, weight, bias, d, "conv2d");
}

template <class T>
Var<T> dense(Var<T> x, Var<T> weight, Var<T> bias) {
  const Tensor<T>& xv = x.value();
  const Tensor<T>& wv = weight.value();
  const bool flat_w = wv.rank() == 2;
  if (!(flat_w || (wv.rank() == 4 && wv.dim(2) == 1 && wv.dim(3) == 1)))
    throw DimensionError("dense: weight must be [O,C] or [O,C,1,1]");
  std::size_t b, c, h = 1, w = 1;
  if (xv.rank() == 4) {
    b = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  } else if (xv.rank() == 2) {
    b = xv.dim(0), c = xv.dim(1);
  } else {
    throw DimensionError("dense: input must be [N,C] or [B,C,H,W]");
  }
  if (wv.dim(1) != c)
    throw DimensionError("dense: input has " + std::to_string(c) + " channels, weight expects " +
                         std::to_string(wv.dim(1)));
  ConvDims d{b, c, h, w, wv.dim(0), 1, 1, 0};
  Var<T> y = conv_impl(x, weight, bias, d, "dense");
  if (xv.rank() == 2) {
    // conv_impl produced [N,O,1,1]; rank-2 callers expect [N,O].
    Tape<T>& tape = tape_of(x);
    return tape.record(y.value().reshaped({b, wv.dim(0)}), {y.id},
                       [](Tape<T>& t, const typename Tape<T>::Node& self) {
                         auto g = t.grad_buffer(self.parents[0]);
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                       });
  }
  return y;
}

template <class T>
Var<T> relu(Var<T> x) {
  double margin = std::numeric_limits<double>::infinity();
  for (T v : x.value().data()) margin = std::min(margin, double(std::abs(v)));
  tape_of(x).note_kink_distance(margin);
  return unary<T>(
      x, [](T v) { return v > T(0) ? v : T(0); }, [](T v) { return v > T(0) ? T(1) : T(0); });
}

template <class T>
Var<T> sin(Var<T> x, T omega) {
  return unary<T>(
      x, [omega](T v) { return std::sin(omega * v); },
      [omega](T v) { return omega * std::cos(omega * v); });
}

template <class T>
Var<T> scale(Var<T> x, T factor) {
  return unary<T>(
      x, [factor](T v) { return factor * v; }, [factor](T) { return factor; });
}

template <class T>
Var<T> hadamard(Var<T> a, Var<T> b) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  require_same_shape(av, bv, "hadamard");
  Tensor<T> out(av.shape());
  const std::int64_t n = std::int64_t(av.numel());
  const T *pa = av.data().data(), *pb = bv.data().data();
  T* dst = out.data().data();
#pragma omp parallel for simd if (n > kParallelElems)
  for (std::int64_t i = 0; i < n; ++i) dst[i] = pa[i] * pb[i];
  return tape_of(a).record(std::move(out), {a.id, b.id},
                           [](Tape<T>& t, const typename Tape<T>::Node& self) {
                             const std::size_t ai = self.parents[0], bi = self.parents[1];
                             const T* g = self.grad.data();
                             const std::int64_t m = std::int64_t(self.grad.size());
                             if (t.needs_grad(ai)) {
                               auto ga = t.grad_buffer(ai);
                               const T* other = t.node(bi).val().data().data();
#pragma omp parallel for simd if (m > kParallelElems)
                               for (std::int64_t i = 0; i < m; ++i) ga[i] += g[i] * other[i];
                             }
                             if (t.needs_grad(bi)) {
                               auto gb = t.grad_buffer(bi);
                               const T* other = t.node(ai).val().data().data();
#pragma omp parallel for simd if (m > kParallelElems)
                               for (std::int64_t i = 0; i < m; ++i) gb[i] += g[i] * other[i];
                             }
                           });
}

template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  const Tensor<T>& av = a.value();
  const Tensor<T>& bv = b.value();
  require_same_shape(av, bv, "add");
  Tensor<T> out(av.shape());
  for (std::size_t i = 0; i < av.numel(); ++i) out[i] = av[i] + bv[i];
  return tape_of(a).record(std::move(out), {a.id, b.id},
                           [](Tape<T>& t, const typename Tape<T>::Node& self) {
                             for (std::size_t p : self.parents) {
                               if (!t.needs_grad(p)) continue;
                               auto g = t.grad_buffer(p);
                               for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                             }
                           });
}

template <class T>
Var<T> concat_channels(const std::vector<Var<T>>& xs) {
  if (xs.empty()) throw DimensionError("concat_channels: no inputs");
  const Tensor<T>& first = xs.front().value();
  require_rank4(first, "concat_channels");
  std::size_t channels = 0;
  for (const auto& v : xs) {
    const Tensor<T>& t = v.value();
    require_rank4(t, "concat_channels");
    if (t.dim(0) != first.dim(0) || t.dim(2) != first.dim(2) || t.dim(3) != first.dim(3))
      throw DimensionError("concat_channels: non-channel dims differ: " + shape_str(first.shape()) +
                           " vs " + shape_str(t.shape()));
    channels += t.dim(1);
  }
  const std::size_t batch = first.dim(0), plane = first.dim(2) * first.dim(3);
  Tensor<T> out({batch, channels, first.dim(2), first.dim(3)});
  std::vector<std::size_t> parents, offsets;
  std::size_t off = 0;
  for (const auto& v : xs) {
    const Tensor<T>& t = v.value();
    const std::size_t c = t.dim(1);
    for (std::size_t b = 0; b < batch; ++b)
      std::copy_n(t.data().data() + b * c * plane, c * plane,
                  out.data().data() + (b * channels + off) * plane);
    parents.push_back(v.id);
    offsets.push_back(off);
    off += c;
  }
  return tape_of(xs.front())
      .record(std::move(out), std::move(parents),
              [offsets, channels, batch, plane](Tape<T>& t, const typename Tape<T>::Node& self) {
                for (std::size_t k = 0; k < self.parents.size(); ++k) {
                  const std::size_t p = self.parents[k];
                  if (!t.needs_grad(p)) continue;
                  const std::size_t c = t.node(p).val().dim(1);
                  auto g = t.grad_buffer(p);
                  for (std::size_t b = 0; b < batch; ++b) {
                    const T* src = self.grad.data() + (b * channels + offsets[k]) * plane;
                    T* dst = g.data() + b * c * plane;
                    for (std::size_t i = 0; i < c * plane; ++i) dst[i] += src[i];
                  }
                }
              });
}

template <class T>
Var<T> slice_channels(Var<T> x, std::size_t begin, std::size_t end) {
  const Tensor<T>& xv = x.value();
  require_rank4(xv, "slice_channels");
  if (begin >= end || end > xv.dim(1)) throw DimensionError("slice_channels: bad channel range");
  const std::size_t batch = xv.dim(0), channels = xv.dim(1), plane = xv.dim(2) * xv.dim(3);
  const std::size_t c = end - begin;
  Tensor<T> out({batch, c, xv.dim(2), xv.dim(3)});
  for (std::size_t b = 0; b < batch; ++b)
    std::copy_n(xv.data().data() + (b * channels + begin) * plane, c * plane,
                out.data().data() + b * c * plane);
  return tape_of(x).record(
      std::move(out), {x.id},
      [batch, channels, plane, begin, c](Tape<T>& t, const typename Tape<T>::Node& self) {
        auto g = t.grad_buffer(self.parents[0]);
        for (std::size_t b = 0; b < batch; ++b) {
          const T* src = self.grad.data() + b * c * plane;
          T* dst = g.data() + (b * channels + begin) * plane;
          for (std::size_t i = 0; i < c * plane; ++i) dst[i] += src[i];
        }
      });
}

template <class T>
Var<T> l1_loss(Var<T> pred, Var<T> target) {
  const Tensor<T>& pv = pred.value();
  const Tensor<T>& tv = target.value();
  require_same_shape(pv, tv, "l1_loss");
  T acc = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pv.numel(); ++i) {
    acc += std::abs(pv[i] - tv[i]);
    margin = std::min(margin, double(std::abs(pv[i] - tv[i])));
  }
  tape_of(pred).note_kink_distance(margin);
  const T n = T(pv.numel());
  Tensor<T> out({1}, acc / n);
  return tape_of(pred).record(std::move(out), {pred.id, target.id},
                              [n](Tape<T>& t, const typename Tape<T>::Node& self) {
                                const std::size_t pi = self.parents[0], ti = self.parents[1];
                                const Tensor<T>& p = t.node(pi).val();
                                const Tensor<T>& q = t.node(ti).val();
                                const T g = self.grad[0] / n;
                                auto sign = [](T v) {
                                  return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
                                };
                                if (t.needs_grad(pi)) {
                                  auto gp = t.grad_buffer(pi);
                                  for (std::size_t i = 0; i < gp.size(); ++i)
                                    gp[i] += g * sign(p[i] - q[i]);
                                }
                                if (t.needs_grad(ti)) {
                                  auto gt = t.grad_buffer(ti);
                                  for (std::size_t i = 0; i < gt.size(); ++i)
                                    gt[i] -= g * sign(p[i] - q[i]);
                                }
                              });
}

template <class T>
Var<T> nearest_upsample(Var<T> x, std::size_t out_h, std::size_t out_w) {
  const Tensor<T>& xv = x.value();
  require_rank4(xv, "nearest_upsample");
  const std::size_t bc = xv.dim(0) * xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  if (out_h < h || out_w < w)
    throw ArgumentError("nearest_upsample: output " + std::to_string(out_h) + "x" +
                        std::to_string(out_w) + " is smaller than input " + std::to_string(h) +
                        "x" + std::to_string(w));
  std::vector<std::size_t> rows(out_h), cols(out_w);
  for (std::size_t i = 0; i < out_h; ++i) rows[i] = nearest_source_index(i, h, out_h);
  for (std::size_t j = 0; j < out_w; ++j) cols[j] = nearest_source_index(j, w, out_w);

  Tensor<T> out({xv.dim(0), xv.dim(1), out_h, out_w});
  const T* src = xv.data().data();
  T* dst = out.data().data();
  const std::int64_t planes = std::int64_t(bc);
#pragma omp parallel for if (bc * out_h * out_w > std::size_t(kParallelElems))
  for (std::int64_t p = 0; p < planes; ++p)
    for (std::size_t i = 0; i < out_h; ++i) {
      const T* srow = src + (std::size_t(p) * h + rows[i]) * w;
      T* drow = dst + (std::size_t(p) * out_h + i) * out_w;
      for (std::size_t j = 0; j < out_w; ++j) drow[j] = srow[cols[j]];
    }
  return tape_of(x).record(
      std::move(out), {x.id},
      [rows, cols, bc, h, w, out_h, out_w](Tape<T>& t, const typename Tape<T>::Node& self) {
        auto g = t.grad_buffer(self.parents[0]);
        const std::int64_t planes = std::int64_t(bc);
#pragma omp parallel for if (bc * out_h * out_w > std::size_t(kParallelElems))
        for (std::int64_t p = 0; p < planes; ++p)
          for (std::size_t i = 0; i < out_h; ++i) {
            const T* grow = self.grad.data() + (std::size_t(p) * out_h + i) * out_w;
            T* drow = g.data() + (std::size_t(p) * h + rows[i]) * w;
            for (std::size_t j = 0; j < out_w; ++j) drow[cols[j]] += grow[j];
          }
      });
}

template <class T>
Var<T> unfold3(Var<T> x) {
  const Tensor<T>& xv = x.value();
  require_rank4(xv, "unfold3");
  const std::size_t batch = xv.dim(0), f = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  Tensor<T> out({batch, 9 * f, h, w});
  // out[b, k*f + c, y, x] = in[b, c, y + k/3 - 1, x + k%3 - 1]
  auto visit = [=](auto&& fn) {
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t k = 0; k < 9; ++k) {
        const std::int64_t dy = std::int64_t(k / 3) - 1, dx = std::int64_t(k % 3) - 1;
        for (std::size_t c = 0; c < f; ++c)
          for (std::size_t y = 0; y < h; ++y) {
            const std::int64_t sy = std::int64_t(y) + dy;
            if (sy < 0 || sy >= std::int64_t(h)) continue;
            for (std::size_t xx = 0; xx < w; ++xx) {
              const std::int64_t sx = std::int64_t(xx) + dx;
              if (sx < 0 || sx >= std::int64_t(w)) continue;
              fn(((b * 9 * f + k * f + c) * h + y) * w + xx,
                 ((b * f + c) * h + std::size_t(sy)) * w + std::size_t(sx));
            }
          }
      }
  };
  const T* src = xv.data().data();
  T* dst = out.data().data();
  visit([&](std::size_t o, std::size_t i) { dst[o] = src[i]; });
  return tape_of(x).record(std::move(out), {x.id},
                           [visit](Tape<T>& t, const typename Tape<T>::Node& self) {
                             auto g = t.grad_buffer(self.parents[0]);
                             const T* go = self.grad.data();
                             visit([&](std::size_t o, std::size_t i) { g[i] += go[o]; });
                           });
}

#define DIINN_INSTANTIATE_OPS(T)                                                  \
  template Var<T> conv2d<T>(Var<T>, Var<T>, Var<T>, std::size_t);                 \
  template Var<T> dense<T>(Var<T>, Var<T>, Var<T>);                               \
  template Var<T> relu<T>(Var<T>);                                                \
  template Var<T> sin<T>(Var<T>, T);                                              \
  template Var<T> scale<T>(Var<T>, T);                                            \
  template Var<T> hadamard<T>(Var<T>, Var<T>);                                    \
  template Var<T> add<T>(Var<T>, Var<T>);                                         \
  template Var<T> concat_channels<T>(const std::vector<Var<T>>&);                 \
  template Var<T> slice_channels<T>(Var<T>, std::size_t, std::size_t);            \
  template Var<T> l1_loss<T>(Var<T>, Var<T>);                                     \
  template Var<T> nearest_upsample<T>(Var<T>, std::size_t, std::size_t);          \
  template Var<T> unfold3<T>(Var<T>);

DIINN_INSTANTIATE_OPS(float)
DIINN_INSTANTIATE_OPS(double)

}  // namespace diinn
