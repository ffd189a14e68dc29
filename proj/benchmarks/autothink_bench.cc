// Copyright 2026 The autothink Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "autothink/grammar.h"
#include "autothink/grpo.h"
#include "autothink/reward.h"
#include "autothink/router.h"
#include "autothink/sim_trainer.h"

namespace autothink {
namespace {

const std::string kResponse =
    "\\boxed{B}<think>The clip shows the red car turning left before the "
    "cyclist enters the frame, so option B fits.</think>\\boxed{B}";

void BM_ParseResponse(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ParseResponse(kResponse, TemplateKind::kDualAnswer));
  }
}
BENCHMARK(BM_ParseResponse);

void BM_CombineDualReward(benchmark::State& state) {
  const auto parsed = ParseResponse(kResponse, TemplateKind::kDualAnswer);
  const QaTruth truth{"B", AnswerKind::kMcq};
  const RewardConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(CombineDualReward(parsed, truth, cfg));
  }
}
BENCHMARK(BM_CombineDualReward);

std::vector<TokenEvent> Trace() {
  std::vector<TokenEvent> t = {{"\\boxed{", -0.01}, {"B", -0.02}, {"}", -0.01},
                               {"<think>", -0.3}};
  for (int i = 0; i < 64; ++i) t.push_back({" step", -0.5});
  t.push_back({"</think>", -0.1});
  t.push_back({"\\boxed{B}", -0.05});
  return t;
}

void BM_RouteTrace(benchmark::State& state) {
  const auto trace = Trace();
  for (auto _ : state) benchmark::DoNotOptimize(RouteTrace(trace, 0.97));
}
BENCHMARK(BM_RouteTrace);

void BM_RouteStream(benchmark::State& state) {
  const auto trace = Trace();
  for (auto _ : state) benchmark::DoNotOptimize(RouteStream(trace, 0.97));
}
BENCHMARK(BM_RouteStream);

void BM_GrpoLoss(benchmark::State& state) {
  const size_t g = static_cast<size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lp(-3.0, -0.1);
  grpo::GroupRollout group;
  for (size_t i = 0; i < g; ++i) {
    group.outputs.push_back({static_cast<double>(i % 3), lp(rng), lp(rng), lp(rng)});
  }
  grpo::GrpoConfig cfg;
  cfg.group_size = g;
  for (auto _ : state) benchmark::DoNotOptimize(grpo::GrpoLoss(group, cfg));
}
BENCHMARK(BM_GrpoLoss)->Arg(8)->Arg(16)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  const auto tasks = sim::MakeToyEnv(0, sim::kDefaultContexts,
                                     sim::kDefaultOptions,
                                     sim::kDefaultHardFraction);
  const auto reference = sim::ToyPolicy::Initial(tasks, sim::kDefaultOptions);
  auto policy = reference;
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::TrainStep(policy, reference, tasks, {}, {}, 0.5, seed++));
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace
}  // namespace autothink

BENCHMARK_MAIN();
