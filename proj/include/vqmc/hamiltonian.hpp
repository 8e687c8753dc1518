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

#ifndef VQMC_HAMILTONIAN_HPP
#define VQMC_HAMILTONIAN_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vqmc/common.hpp"

namespace vqmc {

/// One ZZ coupling term; indices are 0-based with i < j.
struct PairCoupling {
  int i;
  int j;
  double value;
};

/// Coefficients of H = -sum_i (alpha_i X_i + beta_i Z_i) - sum_{i<j} beta_ij Z_i Z_j.
/// This is the only representation of the 2^n x 2^n matrix; rows are computed
/// on demand. Immutable after construction, safe for concurrent reads.
struct HamiltonianSpec {
  int n = 0;
  Vector alpha;  // transverse fields, all >= 0
  Vector beta;   // longitudinal fields
  std::vector<PairCoupling> pairs;

  /// Throws std::invalid_argument on negative alpha, bad pair indices,
  /// duplicate pairs, or inconsistent sizes.
  void validate() const;
};

/// Nonzero entries of one row. Off-diagonal columns differ from the row
/// index in exactly one bit, so they are stored as the flipped site.
struct SparseRow {
  double diagonal = 0.0;                       // always present, even when 0
  std::vector<std::pair<int, double>> flips;   // (site, -alpha_site), alpha > 0 only

  std::size_t size() const { return flips.size() + 1; }
};

Config flip_bit(Config x, int site);

/// All nonzero entries of row x in O(n + |pairs|) time.
SparseRow sparse_row(const HamiltonianSpec& spec, const Config& x);

/// H_xx = -sum_i beta_i s_i - sum_{i<j} beta_ij s_i s_j with s_i = 1 - 2 x_i.
double diagonal_energy(const HamiltonianSpec& spec, const Config& x);

/// Undirected simple graph on vertices 0..n-1, edges stored with i < j.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

/// Validates a symmetric 0/1 adjacency matrix with zero diagonal.
Graph graph_from_adjacency(const Matrix& adjacency);
Matrix adjacency_matrix(const Graph& g);

/// Max-Cut instance as a ground-state problem: alpha = beta = 0 and
/// beta_ij = -1/4 on every edge, so minimizing H maximizes the cut via
/// cut(x) = |E|/2 - 2 H_xx.
struct MaxCutProblem {
  HamiltonianSpec spec;
  std::size_t num_edges = 0;
};

MaxCutProblem maxcut_spec(const Graph& g);
double cut_value(const MaxCutProblem& problem, const Config& x);

/// Random fully-connected instance: beta_i, beta_ij ~ U(-1,1), alpha_i ~ U(0,1).
/// Deterministic in (n, seed).
HamiltonianSpec random_tim(int n, std::uint64_t seed);

/// Random graph from rounding (B + B^T)/2 with B_ij ~ Bernoulli(0.5) and a
/// zeroed diagonal; 0.5 rounds up, so the edge probability is exactly 3/4.
Graph random_maxcut_graph(int n, std::uint64_t seed);

// Line-oriented instance files: "tim <n>" header with alpha/beta/pair lines,
// or "graph <n>" with edge lines. Indices are 1-based, '#' starts a comment.
void save_spec(const HamiltonianSpec& spec, const std::string& path);
HamiltonianSpec load_spec(const std::string& path);
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

}  // namespace vqmc

#endif  // VQMC_HAMILTONIAN_HPP
