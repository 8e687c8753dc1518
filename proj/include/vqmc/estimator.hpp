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

#ifndef VQMC_ESTIMATOR_HPP
#define VQMC_ESTIMATOR_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "vqmc/hamiltonian.hpp"
#include "vqmc/models.hpp"
#include "vqmc/sampler.hpp"

namespace vqmc {

/// Per-iteration training statistics, streamed to the training-curve CSV.
struct StepStats {
  double energy_mean = 0.0;
  double energy_std = 0.0;
  double grad_norm = 0.0;
  double wall_time = 0.0;
  Vector local_energies;  // optional retention
};

/// Local energies l(x_b) = sum_{(y,H_xy)} H_xy exp(log_psi(y) - log_psi(x_b))
/// for the whole batch. All flipped neighbors are evaluated in chunked
/// batched forward passes; this is the dominant cost of an iteration.
/// Throws on a non-finite result (amplitude underflow is reported, not
/// swallowed).
template <class Model>
Vector local_energy_batch(const HamiltonianSpec& spec, const Model& model,
                          const ConfigBatch& configs, const Vector& cached_log_psi) {
  const Eigen::Index B = configs.rows();
  const int n = spec.n;
  std::vector<int> sites;
  for (int i = 0; i < n; ++i) {
    if (spec.alpha[i] > 0.0) sites.push_back(i);
  }
  const Eigen::Index s = static_cast<Eigen::Index>(sites.size());

  Vector local(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    local[b] = diagonal_energy(spec, configs.row(b).transpose());
  }
  if (s == 0) return local;

  // Chunk the B*s neighbor configurations to bound peak memory.
  const Eigen::Index chunk_rows = std::max<Eigen::Index>(1, (1 << 22) / std::max(1, n));
  const Eigen::Index samples_per_chunk = std::max<Eigen::Index>(1, chunk_rows / s);
  for (Eigen::Index b0 = 0; b0 < B; b0 += samples_per_chunk) {
    const Eigen::Index bc = std::min(samples_per_chunk, B - b0);
    ConfigBatch neighbors(bc * s, n);
    for (Eigen::Index b = 0; b < bc; ++b) {
      for (Eigen::Index k = 0; k < s; ++k) {
        neighbors.row(b * s + k) = configs.row(b0 + b);
        neighbors(b * s + k, sites[k]) = 1.0 - neighbors(b * s + k, sites[k]);
      }
    }
    const Vector lp = log_psi_batch(model, neighbors);
    for (Eigen::Index b = 0; b < bc; ++b) {
      double max_exponent = 0.0;
      for (Eigen::Index k = 0; k < s; ++k) {
        max_exponent = std::max(max_exponent, lp[b * s + k] - cached_log_psi[b0 + b]);
      }
      // Max-shift only when an exponent is large; the common path stays cheap.
      const double shift = max_exponent > 50.0 ? max_exponent : 0.0;
      double acc = 0.0;
      for (Eigen::Index k = 0; k < s; ++k) {
        acc -= spec.alpha[sites[k]] *
               std::exp(lp[b * s + k] - cached_log_psi[b0 + b] - shift);
      }
      local[b0 + b] += acc * std::exp(shift);
      if (!std::isfinite(local[b0 + b])) {
        throw std::runtime_error("non-finite local energy (amplitude underflow?)");
      }
    }
  }
  return local;
}

/// Sample mean and unbiased sample variance of the local energies.
inline std::pair<double, double> energy_and_variance(const Vector& local_energies) {
  const Eigen::Index B = local_energies.size();
  if (B < 2) throw std::invalid_argument("variance needs at least two samples");
  const double mean = local_energies.mean();
  const double ss = (local_energies.array() - mean).square().sum();
  return {mean, ss / static_cast<double>(B - 1)};
}

template <class Model>
std::pair<double, double> energy_and_variance(const HamiltonianSpec& spec,
                                              const Model& model, const SampleBatch& batch) {
  return energy_and_variance(local_energy_batch(spec, model, batch.configs, batch.log_psi));
}

/// 2 mean_b [(l_b - mean(l)) grad log psi(x_b)]; centering uses the in-batch
/// mean. Evaluated as one weighted backward pass.
template <class Model>
Vector gradient_from_locals(const Model& model, const ConfigBatch& configs,
                            const Vector& local_energies) {
  const Eigen::Index B = configs.rows();
  if (B < 2) throw std::invalid_argument("gradient estimate needs at least two samples");
  const double mean = local_energies.mean();
  const Vector weights =
      2.0 * (local_energies.array() - mean).matrix() / static_cast<double>(B);
  return weighted_grad_log_psi(model, configs, weights);
}

template <class Model>
Vector gradient_estimate(const HamiltonianSpec& spec, const Model& model,
                         const SampleBatch& batch) {
  return gradient_from_locals(
      model, batch.configs,
      local_energy_batch(spec, model, batch.configs, batch.log_psi));
}

/// Population (enumeration-weighted) gradient: 2 sum_x pi(x) (l(x) - L) g(x).
/// `probs` must sum to 1 over the supplied configurations.
template <class Model>
Vector gradient_population(const HamiltonianSpec& spec, const Model& model,
                           const ConfigBatch& configs, const Vector& probs) {
  const Vector lp = log_psi_batch(model, configs);
  const Vector local = local_energy_batch(spec, model, configs, lp);
  const double population_mean = probs.dot(local);
  const Vector weights =
      2.0 * probs.cwiseProduct((local.array() - population_mean).matrix());
  return weighted_grad_log_psi(model, configs, weights);
}

/// Empirical Fisher information of pi_theta from per-sample scores
/// s_b = grad log pi(x_b). Centered by default; the uncentered variant is
/// available behind the flag. Holds the (optionally centered) score rows, so
/// it can act as the implicit operator v -> F v or be densified for small d.
class FisherEstimate {
 public:
  FisherEstimate(Matrix scores, bool centered) : scores_(std::move(scores)) {
    if (scores_.rows() < 2) throw std::invalid_argument("Fisher needs at least two samples");
    if (centered) scores_.rowwise() -= scores_.colwise().mean();
  }

  Eigen::Index dim() const { return scores_.cols(); }
  Eigen::Index samples() const { return scores_.rows(); }

  /// F v = S^T (S v) / B without forming F.
  Vector apply(const Vector& v) const {
    return scores_.transpose() * (scores_ * v) / static_cast<double>(scores_.rows());
  }

  /// Explicit d x d matrix; intended for small d.
  Matrix dense() const {
    return scores_.transpose() * scores_ / static_cast<double>(scores_.rows());
  }

 private:
  Matrix scores_;  // B x d
};

template <class Model>
FisherEstimate fisher_estimate(const Model& model, const ConfigBatch& configs,
                               bool centered = true) {
  return FisherEstimate(score_matrix(model, configs), centered);
}

}  // namespace vqmc

#endif  // VQMC_ESTIMATOR_HPP
