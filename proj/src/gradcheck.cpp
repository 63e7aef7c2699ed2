// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace diinn {

namespace {

double evaluate(const LossBuilder& loss) {
  Tape<double> tape;
  return loss(tape).value()[0];
}

}  // namespace

std::vector<std::vector<double>> analytic_gradients(const LossBuilder& loss,
                                                    const std::vector<Tensor<double>*>& params) {
  for (auto* p : params) p->set_requires_grad(true);
  Tape<double> tape;
  Var<double> l = loss(tape);
  tape.backward(l);
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (auto* p : params) out.emplace_back(p->grad().begin(), p->grad().end());
  return out;
}

GradCheckReport compare_gradients(const LossBuilder& loss,
                                  const std::vector<Tensor<double>*>& params,
                                  const std::vector<std::vector<double>>& analytic, double h) {
  GradCheckReport rep;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto data = params[pi]->data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double saved = data[k];
      data[k] = saved + h;
      const double up = evaluate(loss);
      data[k] = saved - h;
      const double down = evaluate(loss);
      data[k] = saved;
      const double cd = (up - down) / (2.0 * h);
      const double a = analytic[pi][k];
      const double err = std::abs(a - cd) / std::max({std::abs(a), std::abs(cd), 1e-8});
      ++rep.checked;
      if (err > rep.max_rel_error) {
        rep.max_rel_error = err;
        rep.worst_param = pi;
        rep.worst_index = k;
        rep.worst_analytic = a;
        rep.worst_numeric = cd;
      }
    }
  }
  return rep;
}

GradCheckReport grad_check(const LossBuilder& loss, const std::vector<Tensor<double>*>& params,
                           double h) {
  return compare_gradients(loss, params, analytic_gradients(loss, params), h);
}

}  // namespace diinn
