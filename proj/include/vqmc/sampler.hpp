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

#ifndef VQMC_SAMPLER_HPP
#define VQMC_SAMPLER_HPP

#include "vqmc/models.hpp"

namespace vqmc {

enum class SamplerKind { kAuto, kMcmc };

struct SampleBatch {
  ConfigBatch configs;       // B x n
  Vector log_psi;            // cached log-amplitude per row
  SamplerKind kind = SamplerKind::kAuto;
  double acceptance_rate = 1.0;  // MCMC only
  double wall_time = 0.0;
};

struct McmcConfig {
  int chains = 2;
  long burn_in = -1;  // < 0 selects default_burn_in(n)
  int thinning = 1;
};

/// Default burn-in schedule k = 3n + 100.
inline long default_burn_in(int n) { return 3L * n + 100; }

/// Persistent chain positions so later iterations skip the burn-in.
struct McmcState {
  ConfigBatch positions;  // chains x n
  Vector log_psi;         // per chain
  bool initialized = false;
};

/// Exact ancestral sampling: n batched forward passes, bit i drawn from
/// p(x_i | x_{<i}). The log_psi cache is accumulated bit by bit, no extra
/// pass. Deterministic in the RNG state.
SampleBatch auto_sample(const MadeModel& model, int batch_size, std::mt19937_64& rng);

/// Single-site-flip Metropolis-Hastings on pi = psi^2; acceptance
/// min(1, exp(2 (log_psi' - log_psi))). Runs cfg.chains independent chains,
/// burns in only when `state` is fresh, then keeps every thinning-th state
/// until batch_size/chains samples per chain are collected.
SampleBatch mcmc_sample(const RbmModel& model, int batch_size, const McmcConfig& cfg,
                        std::mt19937_64& rng, McmcState& state);

/// Model forward passes per sampling call: n for AUTO (batched), and
/// burn_in + (B / chains) * thinning per chain for MCMC.
long forward_pass_count(SamplerKind kind, int n, int batch_size, const McmcConfig& cfg);

}  // namespace vqmc

#endif  // VQMC_SAMPLER_HPP
