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

#include "vqmc/hamiltonian.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vqmc {

namespace {

void check_length(const HamiltonianSpec& spec, const Config& x) {
  if (x.size() != spec.n) {
    throw std::invalid_argument("configuration length " + std::to_string(x.size()) +
                                " does not match spec n = " + std::to_string(spec.n));
  }
}

}  // namespace

void HamiltonianSpec::validate() const {
  if (n < 1) throw std::invalid_argument("spec requires n >= 1");
  if (alpha.size() != n || beta.size() != n) {
    throw std::invalid_argument("alpha/beta length does not match n");
  }
  for (int i = 0; i < n; ++i) {
    if (alpha[i] < 0.0) throw std::invalid_argument("alpha must be non-negative");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& p : pairs) {
    if (p.i < 0 || p.j >= n || p.i >= p.j) {
      throw std::invalid_argument("pair indices must satisfy 0 <= i < j < n");
    }
    if (!seen.insert({p.i, p.j}).second) {
      throw std::invalid_argument("duplicate pair (" + std::to_string(p.i + 1) + "," +
                                  std::to_string(p.j + 1) + ")");
    }
  }
}

Config flip_bit(Config x, int site) {
  x[site] = 1.0 - x[site];
  return x;
}

double diagonal_energy(const HamiltonianSpec& spec, const Config& x) {
  check_length(spec, x);
  double energy = 0.0;
  for (int i = 0; i < spec.n; ++i) energy -= spec.beta[i] * (1.0 - 2.0 * x[i]);
  for (const auto& p : spec.pairs) {
    energy -= p.value * (1.0 - 2.0 * x[p.i]) * (1.0 - 2.0 * x[p.j]);
  }
  return energy;
}

SparseRow sparse_row(const HamiltonianSpec& spec, const Config& x) {
  SparseRow row;
  row.diagonal = diagonal_energy(spec, x);
  row.flips.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    if (spec.alpha[i] > 0.0) row.flips.emplace_back(i, -spec.alpha[i]);
  }
  return row;
}

Graph graph_from_adjacency(const Matrix& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != n) throw std::invalid_argument("adjacency matrix must be square");
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) throw std::invalid_argument("adjacency diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      const double v = adjacency(i, j);
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("adjacency entries must be 0 or 1");
      if (adjacency(i, j) != adjacency(j, i)) {
        throw std::invalid_argument("adjacency matrix must be symmetric");
      }
      if (i < j && v == 1.0) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

Matrix adjacency_matrix(const Graph& g) {
  Matrix adj = Matrix::Zero(g.n, g.n);
  for (const auto& [i, j] : g.edges) {
    adj(i, j) = 1.0;
    adj(j, i) = 1.0;
  }
  return adj;
}

MaxCutProblem maxcut_spec(const Graph& g) {
  MaxCutProblem problem;
  problem.spec.n = g.n;
  problem.spec.alpha = Vector::Zero(g.n);
  problem.spec.beta = Vector::Zero(g.n);
  problem.spec.pairs.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) problem.spec.pairs.push_back({i, j, -0.25});
  problem.num_edges = g.edges.size();
  problem.spec.validate();
  return problem;
}

double cut_value(const MaxCutProblem& problem, const Config& x) {
  return 0.5 * static_cast<double>(problem.num_edges) -
         2.0 * diagonal_energy(problem.spec, x);
}

HamiltonianSpec random_tim(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_tim requires n >= 1");
  auto rng = make_stream(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> symmetric(-1.0, 1.0);
  HamiltonianSpec spec;
  spec.n = n;
  spec.alpha = Vector(n);
  spec.beta = Vector(n);
  for (int i = 0; i < n; ++i) spec.alpha[i] = unit(rng);
  for (int i = 0; i < n; ++i) spec.beta[i] = symmetric(rng);
  spec.pairs.reserve(std::size_t(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) spec.pairs.push_back({i, j, symmetric(rng)});
  }
  return spec;
}

Graph random_maxcut_graph(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_maxcut_graph requires n >= 1");
  auto rng = make_stream(seed);
  std::bernoulli_distribution coin(0.5);
  // Full n x n draw of B in row-major order; entry (i,j) of the rounded
  // symmetrization is 1 unless B_ij = B_ji = 0.
  std::vector<std::uint8_t> b(std::size_t(n) * n);
  for (auto& v : b) v = coin(rng) ? 1 : 0;
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (b[std::size_t(i) * n + j] || b[std::size_t(j) * n + i]) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

void save_spec(const HamiltonianSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  out << "tim " << spec.n << "\n";
  for (int i = 0; i < spec.n; ++i) {
    if (spec.alpha[i] != 0.0) out << "alpha " << (i + 1) << " " << spec.alpha[i] << "\n";
  }
  for (int i = 0; i < spec.n; ++i) {
    if (spec.beta[i] != 0.0) out << "beta " << (i + 1) << " " << spec.beta[i] << "\n";
  }
  for (const auto& p : spec.pairs) {
    out << "pair " << (p.i + 1) << " " << (p.j + 1) << " " << p.value << "\n";
  }
}

namespace {

std::vector<std::vector<std::string>> read_instance_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream stream(line);
    std::vector<std::string> tokens;
    std::string token;
    while (stream >> token) tokens.push_back(token);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
  }
  if (lines.empty()) throw std::runtime_error(path + ": empty instance file");
  return lines;
}

int parse_index(const std::string& token, int n, const std::string& path) {
  int idx = std::stoi(token);
  if (idx < 1 || idx > n) throw std::runtime_error(path + ": index out of range: " + token);
  return idx - 1;
}

}  // namespace

HamiltonianSpec load_spec(const std::string& path) {
  const auto lines = read_instance_lines(path);
  const auto& header = lines.front();
  if (header.size() != 2 || header[0] != "tim") {
    throw std::runtime_error(path + ": expected 'tim <n>' header");
  }
  HamiltonianSpec spec;
  spec.n = std::stoi(header[1]);
  if (spec.n < 1) throw std::runtime_error(path + ": n must be >= 1");
  spec.alpha = Vector::Zero(spec.n);
  spec.beta = Vector::Zero(spec.n);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& t = lines[k];
    if (t[0] == "alpha" && t.size() == 3) {
      spec.alpha[parse_index(t[1], spec.n, path)] = std::stod(t[2]);
    } else if (t[0] == "beta" && t.size() == 3) {
      spec.beta[parse_index(t[1], spec.n, path)] = std::stod(t[2]);
    } else if (t[0] == "pair" && t.size() == 4) {
      const int i = parse_index(t[1], spec.n, path);
      const int j = parse_index(t[2], spec.n, path);
      if (i >= j) throw std::runtime_error(path + ": pair indices must satisfy i < j");
      spec.pairs.push_back({i, j, std::stod(t[3])});
    } else {
      throw std::runtime_error(path + ": malformed line starting with '" + t[0] + "'");
    }
  }
  spec.validate();
  return spec;
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "graph " << g.n << "\n";
  for (const auto& [i, j] : g.edges) out << "edge " << (i + 1) << " " << (j + 1) << "\n";
}

Graph load_graph(const std::string& path) {
  const auto lines = read_instance_lines(path);
  const auto& header = lines.front();
  if (header.size() != 2 || header[0] != "graph") {
    throw std::runtime_error(path + ": expected 'graph <n>' header");
  }
  Graph g;
  g.n = std::stoi(header[1]);
  if (g.n < 1) throw std::runtime_error(path + ": n must be >= 1");
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& t = lines[k];
    if (t[0] != "edge" || t.size() != 3) {
      throw std::runtime_error(path + ": malformed line starting with '" + t[0] + "'");
    }
    int i = parse_index(t[1], g.n, path);
    int j = parse_index(t[2], g.n, path);
    if (i == j) throw std::runtime_error(path + ": self loops are not allowed");
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second) throw std::runtime_error(path + ": duplicate edge");
    g.edges.emplace_back(i, j);
  }
  return g;
}

}  // namespace vqmc
