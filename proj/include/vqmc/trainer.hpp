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

#ifndef VQMC_TRAINER_HPP
#define VQMC_TRAINER_HPP

#include <functional>
#include <optional>
#include <vector>

#include "vqmc/optimizer.hpp"

namespace vqmc {

enum class ModelKind { kMade, kRbm };

/// Full experiment description. The effective batch size is
/// workers * minibatch; the model-sampler pairing is fixed (MADE with AUTO,
/// RBM with MCMC).
struct RunConfig {
  HamiltonianSpec spec;
  std::optional<MaxCutProblem> maxcut;  // set when the instance is a cut problem

  ModelKind model = ModelKind::kMade;
  int hidden = 0;  // 0 selects the default: round(5 (ln n)^2) for MADE, n for RBM

  McmcConfig mcmc;          // burn_in < 0 selects 3n + 100
  bool mcmc_reburn = false; // pay the burn-in every iteration (timing-study mode)

  OptimizerKind optimizer = OptimizerKind::kAdam;
  double lr = 0.0;  // 0 selects the default: SGD 0.1, ADAM 0.01, SR 0.1
  SrConfig sr;

  int iterations = 300;
  int workers = 1;
  int minibatch = 1024;  // per worker
  int eval_batch = 1024;
  std::uint64_t seed = 0;

  /// Hitting-time mode: stop once the evaluation metric passes the target
  /// (cut >= target for Max-Cut, energy <= target otherwise). Evaluation
  /// time is excluded from the reported figure.
  std::optional<double> target;

  /// Test hook, called on worker 0 with the reduced gradient each iteration.
  std::function<void(int iteration, const Vector& reduced_grad)> gradient_observer;
};

struct PhaseTimings {
  double sample = 0.0;
  double estimate = 0.0;
  double reduce = 0.0;
  double update = 0.0;
};

struct RunResult {
  std::vector<StepStats> stats;  // one entry per completed iteration
  double final_energy = 0.0;     // mean local energy over a fresh eval batch
  double final_energy_std = 0.0;
  std::optional<double> best_cut;  // Max-Cut runs only
  std::optional<double> mean_cut;
  double total_time = 0.0;
  PhaseTimings phases;
  bool replicas_identical = true;  // bitwise, checked after every iteration
  Vector final_params;
  std::optional<double> hit_time;  // hitting-time mode: training seconds to target
  int hit_iteration = -1;

  std::optional<MadeModel> made;
  std::optional<RbmModel> rbm;
};

RunResult train(const RunConfig& config);

/// Arithmetic mean with a fixed pairwise-tree summation order
/// (worker-index ascending, adjacent pairs per level), so the result is
/// bitwise reproducible for a fixed worker count.
Vector allreduce_mean(const std::vector<Vector>& vectors);

struct EfficiencyModel {
  double efficiency;
  double a;
  double b;  // efficiency = a + b L
};

/// Closed-form MCMC sampling parallel efficiency
/// (k + (nL - 1)j + 1) / (k + (n - 1)j + 1) for burn-in k, thinning j and
/// n samples per unit.
EfficiencyModel parallel_efficiency_model(double burn_in, double thinning,
                                          double samples_per_unit, double units);

struct ScalingRow {
  int workers;
  double seconds_per_iteration;
  double normalized;  // divided by the largest-worker-count row
};

/// Weak scaling: per-iteration wall time at fixed per-worker minibatch
/// across the given worker counts (MADE + AUTO + ADAM on a random instance).
std::vector<ScalingRow> weak_scaling_benchmark(const HamiltonianSpec& spec, int minibatch,
                                               const std::vector<int>& worker_counts,
                                               int iterations, std::uint64_t seed);

}  // namespace vqmc

#endif  // VQMC_TRAINER_HPP
