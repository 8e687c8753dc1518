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

#ifndef VQMC_MODELS_HPP
#define VQMC_MODELS_HPP

#include <cstdint>
#include <string>

#include "vqmc/common.hpp"

namespace vqmc {

/// Conditionals are clamped to [kProbEps, 1 - kProbEps] before any log.
inline constexpr double kProbEps = 1e-7;

/// Two-layer masked autoencoder over n bits. The masks enforce that output
/// unit i depends on inputs 1..i-1 only, so the induced distribution
/// pi(x) = prod_i p_i(x_i | x_{<i}) is normalized by construction and the
/// amplitude is psi(x) = sqrt(pi(x)).
///
/// Models are value types: cloneable and immutable during evaluation.
struct MadeModel {
  int n = 0;
  int h = 0;
  Matrix W1;                 // h x n
  Vector b1;                 // h
  Matrix W2;                 // n x h
  Vector b2;                 // n
  Matrix M1;                 // h x n binary, M1(k,j) = 1 iff j+1 <= degrees[k]
  Matrix M2;                 // n x h binary, M2(i,k) = 1 iff degrees[k] < i+1
  std::vector<int> degrees;  // h entries in [1, n-1]

  int param_count() const { return 2 * h * n + h + n; }
};

/// Restricted Boltzmann machine log-amplitude:
/// log psi(x) = sum_k ln cosh((W x + c)_k) + a . x (unnormalized).
struct RbmModel {
  int n = 0;
  int h = 0;
  Matrix W;  // h x n
  Vector c;  // h
  Vector a;  // n

  int param_count() const { return h * n + h + n; }
};

/// Test double: explicit unit-norm non-negative amplitude table over 2^n
/// configurations. log psi is floored at -700 to stay finite.
struct TableWavefunction {
  int n = 0;
  Vector amplitudes;  // 2^n entries, >= 0, unit Euclidean norm
};

/// Default hidden width, round(5 (ln n)^2); natural log.
int default_made_hidden(int n);

/// Cyclic degree assignment degrees[k] = 1 + (k mod (n-1)); weights uniform
/// in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero. Requires n >= 2.
MadeModel made_init(int n, int h, std::uint64_t seed);
RbmModel rbm_init(int n, int h, std::uint64_t seed);

/// All n conditionals p(x_i = 1 | x_{<i}) per row, clamped.
Matrix conditionals(const MadeModel& model, const ConfigBatch& configs);

/// log pi(x) = sum_i [x_i log p_i + (1 - x_i) log(1 - p_i)] per row.
Vector log_prob(const MadeModel& model, const ConfigBatch& configs);

Vector log_psi_batch(const MadeModel& model, const ConfigBatch& configs);
Vector log_psi_batch(const RbmModel& model, const ConfigBatch& configs);
Vector log_psi_batch(const TableWavefunction& model, const ConfigBatch& configs);

double log_psi(const MadeModel& model, const Config& x);
double log_psi(const RbmModel& model, const Config& x);
double log_psi(const TableWavefunction& model, const Config& x);

/// sum_b weights[b] * grad_theta log psi(configs[b]), flattened parameter
/// order (W1 row-major, b1, W2 row-major, b2) / (W row-major, c, a).
Vector weighted_grad_log_psi(const MadeModel& model, const ConfigBatch& configs,
                             const Vector& weights);
Vector weighted_grad_log_psi(const RbmModel& model, const ConfigBatch& configs,
                             const Vector& weights);

/// grad of log psi at a single configuration (exact reverse mode).
template <class Model>
Vector grad_log_psi(const Model& model, const Config& x) {
  return weighted_grad_log_psi(model, x.transpose(), Vector::Ones(1));
}

/// Per-sample score rows, s_b = grad log pi(x_b) = 2 grad log psi(x_b); B x d.
Matrix score_matrix(const MadeModel& model, const ConfigBatch& configs);
Matrix score_matrix(const RbmModel& model, const ConfigBatch& configs);

Vector parameter_vector(const MadeModel& model);
Vector parameter_vector(const RbmModel& model);
void set_parameters(MadeModel& model, const Vector& params);
void set_parameters(RbmModel& model, const Vector& params);

// Checkpoint format: one header line "vqmc-model 1 <kind> <n> <h>", a
// "degrees ..." line for MADE, then the flattened parameters one per line.
// Loading rejects a parameter count that does not match (n, h).
void save_model(const MadeModel& model, const std::string& path);
void save_model(const RbmModel& model, const std::string& path);
MadeModel load_made(const std::string& path);
RbmModel load_rbm(const std::string& path);

}  // namespace vqmc

#endif  // VQMC_MODELS_HPP
