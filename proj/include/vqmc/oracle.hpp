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

#ifndef VQMC_ORACLE_HPP
#define VQMC_ORACLE_HPP

#include <cstdint>
#include <utility>

#include "vqmc/hamiltonian.hpp"
#include "vqmc/models.hpp"

namespace vqmc {

/// Dense 2^n x 2^n assembly of H by Kronecker placement of X_i, Z_i, Z_i Z_j.
/// Ground truth for sparse_row; capped at n <= 14 (2 GB of doubles).
Matrix dense_matrix(const HamiltonianSpec& spec);

struct Eigenpair {
  double value;
  Vector vector;  // unit norm, global sign chosen so that sum(v) >= 0
};

/// Minimal eigenpair with residual ||Hv - lambda v|| <= 1e-9 ||H||.
Eigenpair min_eigenpair(const Matrix& op);

/// Exact probability of every configuration in index order (n <= 16):
/// exp(log_prob) for MADE, exp(2 log_psi) normalized explicitly for RBM,
/// squared amplitudes for the table wavefunction.
Vector enumerate_distribution(const MadeModel& model);
Vector enumerate_distribution(const RbmModel& model);
Vector enumerate_distribution(const TableWavefunction& model);

struct MaxCutSolution {
  long value;
  Config argmax;
};

/// Exhaustive scan over 2^{n-1} configurations (global flip symmetry);
/// n <= 24. The unreduced variant scans all 2^n and exists to cross-check
/// the symmetry reduction.
MaxCutSolution brute_force_maxcut(const Graph& g);
MaxCutSolution brute_force_maxcut_full(const Graph& g);

struct RandomCutResult {
  double mean;
  long best;
};

/// Uniform random assignments, the classic 0.5-approximation baseline.
RandomCutResult random_cut_baseline(const Graph& g, int trials, std::mt19937_64& rng);

struct GofReport {
  double tv_distance;  // 0.5 sum |p_i - counts_i / N| over all bins
  double chi_square;   // after merging bins with expected count < 5
  long dof;
  double z_score;  // Wilson-Hilferty normal approximation of the chi-square
  bool reject;     // z_score > z_threshold
};

/// Goodness of fit of observed counts against an exact finite distribution.
/// counts.size() must equal probs.size(); z_threshold 3.090232 corresponds
/// to alpha = 0.001 one-sided.
GofReport goodness_of_fit(const Vector& probs, const std::vector<long>& counts,
                          double z_threshold = 3.090232);

/// Histogram of sampled configurations by row index (n <= 26).
std::vector<long> sample_counts(const ConfigBatch& configs);

}  // namespace vqmc

#endif  // VQMC_ORACLE_HPP
