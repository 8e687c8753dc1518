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

#include <doctest.h>

#include "vqmc/trainer.hpp"

using namespace vqmc;

TEST_CASE("allreduce mean on fixed examples") {
  Vector a(2), b(2), c(2);
  a << 1.0, 2.0;
  b << 3.0, 4.0;
  c << 5.0, 6.0;
  const Vector two = allreduce_mean({a, b});
  CHECK(two[0] == 2.0);
  CHECK(two[1] == 3.0);
  const Vector one = allreduce_mean({a});
  CHECK((one.array() == a.array()).all());
  // Odd count: tree is ((a+b) + c) / 3.
  const Vector three = allreduce_mean({a, b, c});
  CHECK(three[0] == ((a[0] + b[0]) + c[0]) / 3.0);
  CHECK_THROWS(allreduce_mean({}));
}

TEST_CASE("data-parallel gradient equals the serial fixed-order construction") {
  const int n = 6, mbs = 64, L = 4;
  RunConfig cfg;
  cfg.spec = random_tim(n, 3);
  cfg.model = ModelKind::kMade;
  cfg.hidden = 8;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.iterations = 1;
  cfg.workers = L;
  cfg.minibatch = mbs;
  cfg.eval_batch = 256;
  cfg.seed = 11;

  Vector observed;
  cfg.gradient_observer = [&](int iteration, const Vector& grad) {
    if (iteration == 0) observed = grad;
  };
  train(cfg);

  // Serial replay: same per-worker streams, same reduction order.
  const MadeModel model = made_init(n, 8, cfg.seed);
  std::vector<Vector> grads;
  for (int w = 0; w < L; ++w) {
    std::mt19937_64 rng = make_stream(cfg.seed, w + 1);
    const SampleBatch batch = auto_sample(model, mbs, rng);
    const Vector local = local_energy_batch(cfg.spec, model, batch.configs, batch.log_psi);
    grads.push_back(gradient_from_locals(model, batch.configs, local));
  }
  const Vector expected = allreduce_mean(grads);
  REQUIRE(observed.size() == expected.size());
  CHECK((observed - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("replicas stay bitwise identical and match the single-worker run") {
  RunConfig cfg;
  cfg.spec = random_tim(6, 1);
  cfg.model = ModelKind::kMade;
  cfg.hidden = 8;
  cfg.optimizer = OptimizerKind::kAdam;
  cfg.iterations = 10;
  cfg.minibatch = 32;
  cfg.eval_batch = 128;
  cfg.seed = 5;

  cfg.workers = 4;
  const RunResult parallel = train(cfg);
  CHECK(parallel.replicas_identical);
  CHECK(int(parallel.stats.size()) == 10);

  // A single worker consuming the same four streams' gradients is not the
  // same experiment, but determinism of the parallel run itself is: rerunning
  // must reproduce parameters bit for bit.
  const RunResult again = train(cfg);
  CHECK((parallel.final_params.array() == again.final_params.array()).all());
  CHECK(parallel.final_energy == again.final_energy);
}

TEST_CASE("training lowers the energy toward the ground state") {
  RunConfig cfg;
  cfg.spec = random_tim(6, 7);
  cfg.model = ModelKind::kMade;
  cfg.optimizer = OptimizerKind::kAdam;
  cfg.iterations = 150;
  cfg.minibatch = 256;
  cfg.eval_batch = 1024;
  cfg.seed = 0;
  const RunResult result = train(cfg);
  const double first = result.stats.front().energy_mean;
  const double last = result.stats.back().energy_mean;
  CHECK(last < first);
}

TEST_CASE("rbm path trains and reports mcmc metadata") {
  RunConfig cfg;
  cfg.spec = random_tim(5, 2);
  cfg.model = ModelKind::kRbm;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.iterations = 5;
  cfg.minibatch = 64;
  cfg.eval_batch = 128;
  cfg.seed = 9;
  const RunResult result = train(cfg);
  CHECK(int(result.stats.size()) == 5);
  CHECK(std::isfinite(result.final_energy));
  CHECK(result.rbm.has_value());
  CHECK(!result.made.has_value());
}

TEST_CASE("sr training works under the trainer") {
  RunConfig cfg;
  cfg.spec = random_tim(5, 4);
  cfg.model = ModelKind::kMade;
  cfg.hidden = 8;
  cfg.optimizer = OptimizerKind::kSgdSr;
  cfg.iterations = 20;
  cfg.minibatch = 128;
  cfg.eval_batch = 512;
  cfg.seed = 2;
  const RunResult result = train(cfg);
  CHECK(result.stats.back().energy_mean < result.stats.front().energy_mean);
}

TEST_CASE("hitting-time mode stops early on a loose target") {
  RunConfig cfg;
  cfg.spec = random_tim(5, 6);
  cfg.model = ModelKind::kMade;
  cfg.optimizer = OptimizerKind::kAdam;
  cfg.iterations = 50;
  cfg.minibatch = 64;
  cfg.eval_batch = 128;
  cfg.seed = 1;
  cfg.target = 100.0;  // any energy satisfies energy <= 100
  const RunResult result = train(cfg);
  CHECK(result.hit_iteration == 1);
  REQUIRE(result.hit_time.has_value());
  CHECK(*result.hit_time > 0.0);
  CHECK(int(result.stats.size()) == 1);
}

TEST_CASE("max-cut runs report best and mean cut") {
  const Graph g = random_maxcut_graph(8, 3);
  RunConfig cfg;
  cfg.maxcut = maxcut_spec(g);
  cfg.spec = cfg.maxcut->spec;
  cfg.model = ModelKind::kMade;
  cfg.optimizer = OptimizerKind::kAdam;
  cfg.iterations = 40;
  cfg.minibatch = 128;
  cfg.eval_batch = 512;
  cfg.seed = 4;
  const RunResult result = train(cfg);
  REQUIRE(result.best_cut.has_value());
  REQUIRE(result.mean_cut.has_value());
  CHECK(*result.best_cut >= *result.mean_cut);
  CHECK(*result.best_cut <= double(g.edges.size()));
}

TEST_CASE("efficiency model closed form") {
  // No burn-in and unit thinning: every kept sample costs one step, so
  // L units cost exactly L times one unit.
  const EfficiencyModel unit = parallel_efficiency_model(0.0, 1.0, 64.0, 4.0);
  CHECK(unit.efficiency == doctest::Approx(4.0));
  CHECK(unit.a + unit.b * 4.0 == doctest::Approx(unit.efficiency));

  // Burn-in dominated: doubling the units barely changes the cost.
  const EfficiencyModel burned = parallel_efficiency_model(1e6, 1.0, 64.0, 8.0);
  CHECK(burned.efficiency == doctest::Approx(1.0).epsilon(1e-3));

  // Exact value for k = 400, j = 1, n = 512, L = 2:
  // (400 + 1023 + 1) / (400 + 511 + 1) = 1424 / 912.
  const EfficiencyModel mixed = parallel_efficiency_model(400.0, 1.0, 512.0, 2.0);
  CHECK(mixed.efficiency == doctest::Approx(1424.0 / 912.0));
}

TEST_CASE("invalid run configurations are rejected") {
  RunConfig cfg;
  cfg.spec = random_tim(4, 0);
  cfg.workers = 0;
  CHECK_THROWS(train(cfg));
  cfg.workers = 1;
  cfg.iterations = 0;
  CHECK_THROWS(train(cfg));
  cfg.iterations = 1;
  cfg.minibatch = 1;
  CHECK_THROWS(train(cfg));
}
