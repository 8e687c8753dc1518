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

#ifndef VQMC_COMMON_HPP
#define VQMC_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace vqmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A single n-bit configuration; entries are exactly 0.0 or 1.0.
/// Bit 1 (index 0) is the most significant bit of the row index.
using Config = Eigen::VectorXd;

/// A batch of configurations, one per row.
using ConfigBatch = Eigen::MatrixXd;

/// Row index encoded by a configuration, x = 2^{n-1} x_1 + ... + 2^0 x_n.
inline std::uint64_t config_index(const Config& x) {
  std::uint64_t idx = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) idx = (idx << 1) | (x[i] > 0.5 ? 1u : 0u);
  return idx;
}

inline Config index_to_config(int n, std::uint64_t idx) {
  Config x(n);
  for (int i = 0; i < n; ++i) x[i] = (idx >> (n - 1 - i)) & 1u ? 1.0 : 0.0;
  return x;
}

/// All 2^n configurations in index order, one per row. Intended for small n.
inline ConfigBatch all_configs(int n) {
  const std::uint64_t count = std::uint64_t(1) << n;
  ConfigBatch batch(count, n);
  for (std::uint64_t idx = 0; idx < count; ++idx) batch.row(idx) = index_to_config(n, idx).transpose();
  return batch;
}

/// splitmix64 finalizer; used to derive decorrelated per-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent RNG stream for (seed, stream). Streams never share state.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(mix_seed(seed, stream));
}

}  // namespace vqmc

#endif  // VQMC_COMMON_HPP
