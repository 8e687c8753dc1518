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

#include "vqmc/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace vqmc {

Matrix dense_matrix(const HamiltonianSpec& spec) {
  spec.validate();
  if (spec.n > 14) throw std::invalid_argument("dense_matrix is capped at n <= 14");
  const std::uint64_t N = std::uint64_t(1) << spec.n;
  Matrix H = Matrix::Zero(N, N);
  for (std::uint64_t x = 0; x < N; ++x) {
    const Config cfg = index_to_config(spec.n, x);
    H(x, x) = diagonal_energy(spec, cfg);
    for (int i = 0; i < spec.n; ++i) {
      if (spec.alpha[i] == 0.0) continue;
      const std::uint64_t y = x ^ (std::uint64_t(1) << (spec.n - 1 - i));
      H(x, y) = -spec.alpha[i];
    }
  }
  return H;
}

Eigenpair min_eigenpair(const Matrix& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("dense eigensolver failed to converge");
  }
  Eigenpair pair;
  pair.value = solver.eigenvalues()[0];
  pair.vector = solver.eigenvectors().col(0);
  if (pair.vector.sum() < 0.0) pair.vector = -pair.vector;
  return pair;
}

namespace {

void check_enumeration_size(int n) {
  if (n > 16) throw std::invalid_argument("enumerate_distribution is capped at n <= 16");
}

}  // namespace

Vector enumerate_distribution(const MadeModel& model) {
  check_enumeration_size(model.n);
  return log_prob(model, all_configs(model.n)).array().exp();
}

Vector enumerate_distribution(const RbmModel& model) {
  check_enumeration_size(model.n);
  Vector lp = 2.0 * log_psi_batch(model, all_configs(model.n));
  // Normalize in a shifted domain; RBM amplitudes are unnormalized.
  const double shift = lp.maxCoeff();
  Vector p = (lp.array() - shift).exp();
  return p / p.sum();
}

Vector enumerate_distribution(const TableWavefunction& model) {
  check_enumeration_size(model.n);
  return model.amplitudes.array().square();
}

namespace {

long cut_of_mask(const Graph& g, std::uint64_t mask) {
  long cut = 0;
  for (const auto& [i, j] : g.edges) {
    const std::uint64_t bi = (mask >> (g.n - 1 - i)) & 1u;
    const std::uint64_t bj = (mask >> (g.n - 1 - j)) & 1u;
    cut += bi != bj;
  }
  return cut;
}

MaxCutSolution scan_masks(const Graph& g, std::uint64_t count) {
  MaxCutSolution best{-1, Config()};
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const long cut = cut_of_mask(g, mask);
    if (cut > best.value) {
      best.value = cut;
      best_mask = mask;
    }
  }
  best.argmax = index_to_config(g.n, best_mask);
  return best;
}

}  // namespace

MaxCutSolution brute_force_maxcut(const Graph& g) {
  if (g.n > 24) throw std::invalid_argument("brute_force_maxcut is capped at n <= 24");
  // Fixing bit 1 to 0 halves the scan; cuts are invariant under global flip.
  return scan_masks(g, std::uint64_t(1) << (g.n - 1));
}

MaxCutSolution brute_force_maxcut_full(const Graph& g) {
  if (g.n > 16) throw std::invalid_argument("brute_force_maxcut_full is capped at n <= 16");
  return scan_masks(g, std::uint64_t(1) << g.n);
}

RandomCutResult random_cut_baseline(const Graph& g, int trials, std::mt19937_64& rng) {
  if (trials < 1) throw std::invalid_argument("random_cut_baseline requires trials >= 1");
  std::bernoulli_distribution coin(0.5);
  double total = 0.0;
  long best = 0;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t mask = 0;
    for (int i = 0; i < g.n; ++i) mask = (mask << 1) | (coin(rng) ? 1u : 0u);
    const long cut = cut_of_mask(g, mask);
    total += static_cast<double>(cut);
    best = std::max(best, cut);
  }
  return {total / static_cast<double>(trials), best};
}

GofReport goodness_of_fit(const Vector& probs, const std::vector<long>& counts,
                          double z_threshold) {
  if (static_cast<std::size_t>(probs.size()) != counts.size()) {
    throw std::invalid_argument("goodness_of_fit: probs and counts differ in length");
  }
  long total = 0;
  for (long c : counts) total += c;
  if (total < 1) throw std::invalid_argument("goodness_of_fit: empty sample");

  GofReport report{};
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    report.tv_distance +=
        std::abs(probs[i] - static_cast<double>(counts[i]) / static_cast<double>(total));
  }
  report.tv_distance *= 0.5;

  // Bins with expected count below 5 are pooled so the chi-square
  // approximation holds.
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  long bins = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    if (expected < 5.0) {
      pooled_expected += expected;
      pooled_observed += static_cast<double>(counts[i]);
      continue;
    }
    const double diff = static_cast<double>(counts[i]) - expected;
    report.chi_square += diff * diff / expected;
    ++bins;
  }
  if (pooled_expected > 0.0) {
    const double diff = pooled_observed - pooled_expected;
    report.chi_square += diff * diff / pooled_expected;
    ++bins;
  }
  report.dof = std::max(1L, bins - 1);

  // Wilson-Hilferty: (chi2/k)^(1/3) is approximately normal with mean
  // 1 - 2/(9k) and variance 2/(9k).
  const double k = static_cast<double>(report.dof);
  const double cube = std::cbrt(report.chi_square / k);
  report.z_score = (cube - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
  report.reject = report.z_score > z_threshold;
  return report;
}

std::vector<long> sample_counts(const ConfigBatch& configs) {
  const int n = static_cast<int>(configs.cols());
  if (n > 26) throw std::invalid_argument("sample_counts is capped at n <= 26");
  std::vector<long> counts(std::size_t(1) << n, 0);
  for (Eigen::Index b = 0; b < configs.rows(); ++b) {
    ++counts[config_index(configs.row(b).transpose())];
  }
  return counts;
}

}  // namespace vqmc
