// Copyright 2026 The vqmc authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vqmc/optimizer.hpp"

#include <cmath>

namespace vqmc {

void adam_step(AdamState& state, Vector& params, const Vector& grad) {
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
  }
  state.t += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  const Vector m_hat = state.m / bc1;
  const Vector v_hat = state.v / bc2;
  params -= state.lr * m_hat.cwiseQuotient(v_hat.cwiseSqrt().array().matrix() +
                                            Vector::Constant(params.size(), state.eps));
}

namespace {

struct CgOutcome {
  Vector x;
  double relative_residual;
  int iterations;
};

// Conjugate gradient on v -> F v + lambda v, zero initial guess.
CgOutcome conjugate_gradient(const FisherEstimate& fisher, double lambda, const Vector& rhs,
                             double tol, int max_iterations) {
  const double rhs_norm = rhs.norm();
  CgOutcome out{Vector::Zero(rhs.size()), 0.0, 0};
  if (rhs_norm == 0.0) return out;
  Vector r = rhs;
  Vector p = r;
  double rs = r.squaredNorm();
  for (int it = 0; it < max_iterations; ++it) {
    const Vector ap = fisher.apply(p) + lambda * p;
    const double alpha = rs / p.dot(ap);
    out.x += alpha * p;
    r -= alpha * ap;
    out.iterations = it + 1;
    const double rs_next = r.squaredNorm();
    if (std::sqrt(rs_next) <= tol * rhs_norm) {
      rs = rs_next;
      break;
    }
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  out.relative_residual = std::sqrt(rs) / rhs_norm;
  return out;
}

}  // namespace

Vector sr_direction(const SrConfig& cfg, const Vector& grad, const FisherEstimate& fisher) {
  const Eigen::Index d = grad.size();
  if (d <= 2000) {
    Matrix system = fisher.dense();
    system.diagonal().array() += cfg.lambda;
    Vector delta = system.ldlt().solve(grad);
    const double residual = (system * delta - grad).norm();
    if (residual > cfg.tol * grad.norm() && grad.norm() > 0.0) {
      throw SrSolveError(residual / grad.norm(), 0);
    }
    return delta;
  }
  const CgOutcome out =
      conjugate_gradient(fisher, cfg.lambda, grad, cfg.tol, cfg.max_iterations);
  if (out.relative_residual > cfg.tol) {
    throw SrSolveError(out.relative_residual, out.iterations);
  }
  return out.x;
}

Vector sr_step(const SrConfig& cfg, const Vector& params, const Vector& grad,
               const FisherEstimate& fisher) {
  try {
    return params - cfg.lr * sr_direction(cfg, grad, fisher);
  } catch (const SrSolveError&) {
    if (!cfg.fallback) throw;
    return params - cfg.lr * grad;
  }
}

}  // namespace vqmc
