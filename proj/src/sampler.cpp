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

#include "vqmc/sampler.hpp"

#include <chrono>

#include "vqmc/hamiltonian.hpp"
#include <cmath>
#include <stdexcept>

namespace vqmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SampleBatch auto_sample(const MadeModel& model, int batch_size, std::mt19937_64& rng) {
  if (batch_size < 1) throw std::invalid_argument("auto_sample requires batch_size >= 1");
  const auto start = Clock::now();
  const int n = model.n;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SampleBatch batch;
  batch.kind = SamplerKind::kAuto;
  batch.configs = ConfigBatch::Zero(batch_size, n);
  batch.log_psi = Vector::Zero(batch_size);

  Vector log_prob_acc = Vector::Zero(batch_size);
  for (int i = 0; i < n; ++i) {
    const Matrix p = conditionals(model, batch.configs);  // one forward pass
    for (int b = 0; b < batch_size; ++b) {
      const double pi = p(b, i);
      const double bit = unit(rng) < pi ? 1.0 : 0.0;
      batch.configs(b, i) = bit;
      log_prob_acc[b] += bit > 0.5 ? std::log(pi) : std::log(1.0 - pi);
    }
  }
  batch.log_psi = 0.5 * log_prob_acc;
  batch.wall_time = seconds_since(start);
  return batch;
}

SampleBatch mcmc_sample(const RbmModel& model, int batch_size, const McmcConfig& cfg,
                        std::mt19937_64& rng, McmcState& state) {
  if (cfg.chains < 1) throw std::invalid_argument("mcmc_sample requires chains >= 1");
  if (cfg.thinning < 1) throw std::invalid_argument("mcmc_sample requires thinning >= 1");
  if (batch_size % cfg.chains != 0) {
    throw std::invalid_argument("batch size must be divisible by the number of chains");
  }
  const auto start = Clock::now();
  const int n = model.n;
  const long burn_in = cfg.burn_in < 0 ? default_burn_in(n) : cfg.burn_in;
  const int per_chain = batch_size / cfg.chains;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> site(0, n - 1);

  SampleBatch batch;
  batch.kind = SamplerKind::kMcmc;
  batch.configs = ConfigBatch(batch_size, n);
  batch.log_psi = Vector(batch_size);

  if (!state.initialized) {
    state.positions = ConfigBatch(cfg.chains, n);
    for (int c = 0; c < cfg.chains; ++c) {
      for (int i = 0; i < n; ++i) state.positions(c, i) = unit(rng) < 0.5 ? 1.0 : 0.0;
    }
    state.log_psi = log_psi_batch(model, state.positions);
  }

  long proposals = 0;
  long accepted = 0;
  auto step = [&](int chain) {
    Config x = state.positions.row(chain).transpose();
    const int flip = site(rng);
    Config proposal = flip_bit(x, flip);
    const double lp_new = log_psi(model, proposal);
    const double lp_old = state.log_psi[chain];
    ++proposals;
    if (unit(rng) < std::exp(std::min(0.0, 2.0 * (lp_new - lp_old)))) {
      state.positions.row(chain) = proposal.transpose();
      state.log_psi[chain] = lp_new;
      ++accepted;
    }
  };

  if (!state.initialized) {
    for (int c = 0; c < cfg.chains; ++c) {
      for (long t = 0; t < burn_in; ++t) step(c);
    }
    state.initialized = true;
  }
  for (int c = 0; c < cfg.chains; ++c) {
    for (int s = 0; s < per_chain; ++s) {
      for (int t = 0; t < cfg.thinning; ++t) step(c);
      const int row = c * per_chain + s;
      batch.configs.row(row) = state.positions.row(c);
      batch.log_psi[row] = state.log_psi[c];
    }
  }
  batch.acceptance_rate =
      proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 1.0;
  batch.wall_time = seconds_since(start);
  return batch;
}

long forward_pass_count(SamplerKind kind, int n, int batch_size, const McmcConfig& cfg) {
  if (kind == SamplerKind::kAuto) return n;
  const long burn_in = cfg.burn_in < 0 ? default_burn_in(n) : cfg.burn_in;
  return burn_in + (static_cast<long>(batch_size) / cfg.chains) * cfg.thinning;
}

}  // namespace vqmc
