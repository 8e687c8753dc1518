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

#include "vqmc/trainer.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace vqmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double resolve_lr(const RunConfig& cfg) {
  if (cfg.lr > 0.0) return cfg.lr;
  switch (cfg.optimizer) {
    case OptimizerKind::kSgd:
      return 0.1;
    case OptimizerKind::kAdam:
      return 0.01;
    case OptimizerKind::kSgdSr:
      return 0.1;
  }
  return 0.01;
}

constexpr std::uint64_t kEvalStream = 1'000'000'007ULL;

// Per-worker sampler state; the model-sampler pairing is fixed.
struct AutoSamplerState {
  SampleBatch draw(const MadeModel& model, int batch_size, std::mt19937_64& rng,
                   const McmcConfig&, bool) {
    return auto_sample(model, batch_size, rng);
  }
};

struct McmcSamplerState {
  McmcState state;
  SampleBatch draw(const RbmModel& model, int batch_size, std::mt19937_64& rng,
                   const McmcConfig& cfg, bool reburn) {
    if (reburn) state = McmcState{};
    return mcmc_sample(model, batch_size, cfg, rng, state);
  }
};

template <class Model>
SampleBatch eval_batch_for(const Model& model, int batch_size, const McmcConfig& mcmc,
                           std::mt19937_64& rng);

template <>
SampleBatch eval_batch_for(const MadeModel& model, int batch_size, const McmcConfig&,
                           std::mt19937_64& rng) {
  return auto_sample(model, batch_size, rng);
}

template <>
SampleBatch eval_batch_for(const RbmModel& model, int batch_size, const McmcConfig& mcmc,
                           std::mt19937_64& rng) {
  McmcState fresh;
  return mcmc_sample(model, batch_size, mcmc, rng, fresh);
}

struct EvalMetrics {
  double energy;
  double energy_std;
  double best_cut = 0.0;
  double mean_cut = 0.0;
};

template <class Model>
EvalMetrics evaluate(const RunConfig& cfg, const Model& model, std::mt19937_64& rng) {
  const SampleBatch batch = eval_batch_for(model, cfg.eval_batch, cfg.mcmc, rng);
  const Vector local = local_energy_batch(cfg.spec, model, batch.configs, batch.log_psi);
  const auto [mean, var] = energy_and_variance(local);
  EvalMetrics metrics{mean, std::sqrt(var)};
  if (cfg.maxcut) {
    double best = 0.0, total = 0.0;
    for (Eigen::Index b = 0; b < batch.configs.rows(); ++b) {
      const double cut = cut_value(*cfg.maxcut, batch.configs.row(b).transpose());
      best = std::max(best, cut);
      total += cut;
    }
    metrics.best_cut = best;
    metrics.mean_cut = total / static_cast<double>(batch.configs.rows());
  }
  return metrics;
}

template <class Model, class SamplerState>
RunResult train_impl(const RunConfig& cfg, const Model& initial) {
  const int L = cfg.workers;
  const int mbs = cfg.minibatch;
  const double lr = resolve_lr(cfg);
  const bool use_sr = cfg.optimizer == OptimizerKind::kSgdSr;
  const int d = initial.param_count();

  RunResult result;
  result.stats.reserve(cfg.iterations);

  std::vector<Model> replicas(L, initial);
  std::vector<SamplerState> samplers(L);
  std::vector<AdamState> adam_states(L);
  for (auto& s : adam_states) s.lr = lr;
  std::vector<std::mt19937_64> rngs;
  for (int w = 0; w < L; ++w) rngs.push_back(make_stream(cfg.seed, w + 1));
  std::mt19937_64 eval_rng = make_stream(cfg.seed, kEvalStream);

  std::vector<Vector> worker_grads(L);
  std::vector<Vector> worker_locals(L);
  std::vector<double> worker_sample_time(L, 0.0);
  Matrix shared_scores;
  if (use_sr) shared_scores.resize(static_cast<Eigen::Index>(L) * mbs, d);
  Vector shared_update;  // reduced gradient, or SR direction
  Vector reduced_grad;

  std::barrier sync(L);
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto record_error = [&](std::exception_ptr e) {
    std::lock_guard<std::mutex> lock(error_mutex);
    if (!error) error = e;
    stop.store(true);
  };

  const auto run_start = Clock::now();
  double accumulated_training_time = 0.0;

  auto worker_body = [&](int w) {
    for (int iteration = 0; iteration < cfg.iterations; ++iteration) {
      const auto iter_start = Clock::now();
      Clock::time_point t_sampled{}, t_estimated{};
      // Phase 1 (parallel): sample and estimate on the local replica.
      if (!stop.load()) {
        try {
          const SampleBatch batch = samplers[w].draw(replicas[w], mbs, rngs[w], cfg.mcmc,
                                                     cfg.mcmc_reburn);
          t_sampled = Clock::now();
          worker_sample_time[w] = batch.wall_time;
          const Vector local =
              local_energy_batch(cfg.spec, replicas[w], batch.configs, batch.log_psi);
          worker_locals[w] = local;
          worker_grads[w] = gradient_from_locals(replicas[w], batch.configs, local);
          if (use_sr) {
            shared_scores.middleRows(static_cast<Eigen::Index>(w) * mbs, mbs) =
                score_matrix(replicas[w], batch.configs);
          }
          t_estimated = Clock::now();
        } catch (...) {
          record_error(std::current_exception());
        }
      }
      sync.arrive_and_wait();
      if (stop.load()) {
        sync.arrive_and_wait();  // keep the barrier phases aligned
        sync.arrive_and_wait();
        break;
      }

      // Phase 2: deterministic fixed-order reduction and, for SR, the
      // natural-gradient solve. Worker 0 only; the result is broadcast
      // through shared memory.
      Clock::time_point t_reduced{};
      if (w == 0) {
        try {
          reduced_grad = allreduce_mean(worker_grads);
          if (cfg.gradient_observer) cfg.gradient_observer(iteration, reduced_grad);
          if (use_sr) {
            FisherEstimate fisher(shared_scores, cfg.sr.centered);
            try {
              SrConfig sr = cfg.sr;
              sr.lr = lr;
              shared_update = sr_direction(sr, reduced_grad, fisher);
            } catch (const SrSolveError&) {
              if (!cfg.sr.fallback) throw;
              shared_update = reduced_grad;
            }
          } else {
            shared_update = reduced_grad;
          }
        } catch (...) {
          record_error(std::current_exception());
        }
        t_reduced = Clock::now();
      }
      sync.arrive_and_wait();
      if (stop.load()) {
        sync.arrive_and_wait();
        break;
      }

      // Phase 3 (parallel): identical replicated update on every worker.
      try {
        Vector params = parameter_vector(replicas[w]);
        switch (cfg.optimizer) {
          case OptimizerKind::kSgd:
            params = sgd_step(params, shared_update, lr);
            break;
          case OptimizerKind::kAdam:
            adam_step(adam_states[w], params, shared_update);
            break;
          case OptimizerKind::kSgdSr:
            params = sgd_step(params, shared_update, lr);
            break;
        }
        set_parameters(replicas[w], params);
      } catch (...) {
        record_error(std::current_exception());
      }
      sync.arrive_and_wait();
      if (stop.load()) break;

      // Phase 4: bookkeeping on worker 0 - replica consistency, stats,
      // timings, and the hitting-time evaluation (excluded from timings).
      if (w == 0) {
        try {
          const Vector reference = parameter_vector(replicas[0]);
          for (int other = 1; other < L; ++other) {
            if ((parameter_vector(replicas[other]) - reference).cwiseAbs().maxCoeff() !=
                0.0) {
              result.replicas_identical = false;
            }
          }

          Vector pooled(static_cast<Eigen::Index>(L) * mbs);
          for (int v = 0; v < L; ++v) pooled.segment(static_cast<Eigen::Index>(v) * mbs, mbs) = worker_locals[v];
          const auto [mean, var] = energy_and_variance(pooled);

          StepStats stats;
          stats.energy_mean = mean;
          stats.energy_std = std::sqrt(var);
          stats.grad_norm = reduced_grad.norm();
          stats.wall_time = seconds_since(iter_start);
          result.stats.push_back(std::move(stats));
          accumulated_training_time += result.stats.back().wall_time;

          result.phases.sample += worker_sample_time[0];
          result.phases.estimate += std::chrono::duration<double>(t_estimated - t_sampled).count();
          result.phases.update += result.stats.back().wall_time -
                                  std::chrono::duration<double>(t_estimated - iter_start).count() -
                                  std::chrono::duration<double>(Clock::now() - t_reduced).count();
          result.phases.reduce += std::chrono::duration<double>(t_reduced - t_estimated).count();

          if (cfg.target) {
            const EvalMetrics metrics = evaluate(cfg, replicas[0], eval_rng);
            const bool hit = cfg.maxcut ? metrics.best_cut >= *cfg.target
                                        : metrics.energy <= *cfg.target;
            if (hit) {
              result.hit_time = accumulated_training_time;
              result.hit_iteration = iteration + 1;
              stop.store(true);
            }
          }
        } catch (...) {
          record_error(std::current_exception());
        }
      }
      sync.arrive_and_wait();
      if (stop.load()) break;
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(L);
  for (int w = 0; w < L; ++w) threads.emplace_back(worker_body, w);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  const EvalMetrics metrics = evaluate(cfg, replicas[0], eval_rng);
  result.final_energy = metrics.energy;
  result.final_energy_std = metrics.energy_std;
  if (cfg.maxcut) {
    result.best_cut = metrics.best_cut;
    result.mean_cut = metrics.mean_cut;
  }
  result.final_params = parameter_vector(replicas[0]);
  result.total_time = seconds_since(run_start);

  if constexpr (std::is_same_v<Model, MadeModel>) {
    result.made = replicas[0];
  } else {
    result.rbm = replicas[0];
  }
  return result;
}

}  // namespace

RunResult train(const RunConfig& cfg) {
  cfg.spec.validate();
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (cfg.minibatch < 2) throw std::invalid_argument("minibatch must be >= 2");
  const int n = cfg.spec.n;
  if (cfg.model == ModelKind::kMade) {
    const int h = cfg.hidden > 0 ? cfg.hidden : default_made_hidden(n);
    return train_impl<MadeModel, AutoSamplerState>(cfg, made_init(n, h, cfg.seed));
  }
  const int h = cfg.hidden > 0 ? cfg.hidden : n;
  return train_impl<RbmModel, McmcSamplerState>(cfg, rbm_init(n, h, cfg.seed));
}

Vector allreduce_mean(const std::vector<Vector>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("allreduce_mean needs at least one vector");
  std::vector<Vector> level = vectors;
  while (level.size() > 1) {
    std::vector<Vector> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front() / static_cast<double>(vectors.size());
}

EfficiencyModel parallel_efficiency_model(double burn_in, double thinning,
                                          double samples_per_unit, double units) {
  const double denom = burn_in + (samples_per_unit - 1.0) * thinning + 1.0;
  const double b = samples_per_unit * thinning / denom;
  const double a = 1.0 - b;
  return {a + b * units, a, b};
}

std::vector<ScalingRow> weak_scaling_benchmark(const HamiltonianSpec& spec, int minibatch,
                                               const std::vector<int>& worker_counts,
                                               int iterations, std::uint64_t seed) {
  std::vector<ScalingRow> rows;
  for (int workers : worker_counts) {
    RunConfig cfg;
    cfg.spec = spec;
    cfg.model = ModelKind::kMade;
    cfg.optimizer = OptimizerKind::kAdam;
    cfg.iterations = iterations;
    cfg.workers = workers;
    cfg.minibatch = minibatch;
    cfg.eval_batch = std::max(2, minibatch);
    cfg.seed = seed;
    const RunResult result = train(cfg);
    // Skip the first iteration (allocation warmup) when there is a choice.
    double total = 0.0;
    int counted = 0;
    for (std::size_t i = result.stats.size() > 1 ? 1 : 0; i < result.stats.size(); ++i) {
      total += result.stats[i].wall_time;
      ++counted;
    }
    rows.push_back({workers, total / std::max(1, counted), 0.0});
  }
  const double reference = rows.back().seconds_per_iteration;
  for (auto& row : rows) row.normalized = row.seconds_per_iteration / reference;
  return rows;
}

}  // namespace vqmc
