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

#ifndef VQMC_OPTIMIZER_HPP
#define VQMC_OPTIMIZER_HPP

#include <stdexcept>

#include "vqmc/estimator.hpp"

namespace vqmc {

enum class OptimizerKind { kSgd, kAdam, kSgdSr };

struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  Vector m;  // first moment
  Vector v;  // second moment
};

struct SrConfig {
  double lr = 0.1;
  double lambda = 1e-3;      // diagonal regularization
  double tol = 1e-6;         // relative residual
  int max_iterations = 200;  // CG budget
  bool fallback = false;     // on CG failure, continue with the raw gradient
  bool centered = true;      // subtract the mean score before forming F
};

/// Thrown on CG non-convergence when no fallback is requested.
struct SrSolveError : std::runtime_error {
  SrSolveError(double residual, int iterations)
      : std::runtime_error("SR conjugate gradient did not converge (relative residual " +
                           std::to_string(residual) + " after " +
                           std::to_string(iterations) + " iterations)"),
        residual(residual),
        iterations(iterations) {}
  double residual;
  int iterations;
};

inline Vector sgd_step(const Vector& params, const Vector& grad, double lr) {
  return params - lr * grad;
}

/// Standard bias-corrected ADAM update, applied in place.
void adam_step(AdamState& state, Vector& params, const Vector& grad);

/// Natural-gradient direction: solves (F + lambda I) delta = grad.
/// Direct dense solve when d <= 2000, conjugate gradient on the implicit
/// operator otherwise. The accepted solution always satisfies
/// ||(F + lambda I) delta - grad|| <= tol * ||grad||.
Vector sr_direction(const SrConfig& cfg, const Vector& grad, const FisherEstimate& fisher);

/// params - lr * delta, with delta from sr_direction; falls back to the raw
/// gradient on CG failure only when cfg.fallback is set.
Vector sr_step(const SrConfig& cfg, const Vector& params, const Vector& grad,
               const FisherEstimate& fisher);

}  // namespace vqmc

#endif  // VQMC_OPTIMIZER_HPP
