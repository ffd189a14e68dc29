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

#ifndef AUTOTHINK_SIM_TRAINER_H_
#define AUTOTHINK_SIM_TRAINER_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "autothink/grpo.h"
#include "autothink/reward.h"

// Desk-scale GRPO on a synthetic verifiable environment. Each context asks a
// K-way question; a response is a pair of choices (first answer or fallback,
// second answer) rendered into the dual-answer template and scored by the
// real reward engine.
namespace autothink::sim {

// Default toy environment: contexts, answer options per context, and the
// share of hard contexts.
inline constexpr size_t kDefaultContexts = 8;
inline constexpr size_t kDefaultOptions = 4;
inline constexpr double kDefaultHardFraction = 0.25;

enum class Difficulty { kEasy, kHard };

struct ToyTask {
  size_t context_id = 0;
  std::vector<std::string> answer_set;
  size_t correct_index = 0;
  // On hard contexts the first-answer head can never pick the correct
  // option; only the fallback -> second-answer route earns task reward.
  Difficulty difficulty = Difficulty::kEasy;

  QaTruth truth() const;
};

// Deterministic for a given seed. Exactly round(hard_fraction * n_contexts)
// contexts are hard. Throws Error(kInvalidConfig) unless n_contexts >= 1,
// k >= 2 and hard_fraction lies in [0, 1].
std::vector<ToyTask> MakeToyEnv(uint64_t seed, size_t n_contexts, size_t k,
                                double hard_fraction);

// One structured action. `first == k` selects the fallback string.
struct Action {
  size_t first = 0;
  size_t second = 0;
  friend bool operator==(const Action&, const Action&) = default;
};

// Tabular softmax policy: per context, a first-answer head over K answers
// plus fallback and an independent second-answer head over K answers.
class ToyPolicy {
 public:
  // Zero logits except the fallback logit, which starts at `fallback_bias`.
  static ToyPolicy Initial(std::span<const ToyTask> tasks, size_t k,
                           double temperature = 1.0,
                           double fallback_bias = -1.0);

  size_t k() const { return k_; }
  size_t num_contexts() const { return num_contexts_; }
  double temperature() const { return temperature_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  size_t FirstOffset(size_t context) const;
  size_t SecondOffset(size_t context) const;

  // Probabilities of each head at the policy temperature. Masked first-head
  // entries (the correct option on hard contexts) have probability 0.
  std::vector<double> FirstProbs(const ToyTask& task) const;
  std::vector<double> SecondProbs(const ToyTask& task) const;

  double LogProb(const ToyTask& task, const Action& action) const;
  // d LogProb / d params, dense over the whole parameter vector.
  std::vector<double> LogProbGradient(const ToyTask& task,
                                      const Action& action) const;

  // Largest |log sum_j p_j| over all heads and contexts.
  double NormalizationError(std::span<const ToyTask> tasks) const;

 private:
  std::vector<double> HeadLogits(const ToyTask& task, bool first) const;

  size_t k_ = 0;
  size_t num_contexts_ = 0;
  double temperature_ = 1.0;
  std::vector<double> params_;
};

// Inverse-CDF categorical draw using 53 random bits; portable across
// standard libraries, unlike std::discrete_distribution.
size_t SampleCategorical(std::span<const double> probs, std::mt19937_64& rng);

struct SampledGroup {
  grpo::GroupRollout rollout;
  std::vector<Action> actions;
  std::vector<std::string> responses;
  std::vector<RewardBreakdown> rewards;
};

// G on-policy samples: logprob_old = logprob_new under `policy`, logprob_ref
// under `reference`. Rewards come from rendering and parsing each response.
SampledGroup SampleGroup(const ToyPolicy& policy, const ToyPolicy& reference,
                         const ToyTask& task, size_t group_size,
                         const RewardConfig& reward_cfg, uint64_t seed);

struct StepRecord {
  size_t step = 0;
  double mean_r_task_first = 0.0;
  double mean_r_task_second = 0.0;
  double mean_total = 0.0;
  double fallback_rate = 0.0;
  double hard_fallback_rate = 0.0;  // NaN without hard contexts
};

using TrainingCurve = std::vector<StepRecord>;

// Mean over tasks of the per-group GRPO gradient for already-sampled groups.
std::vector<double> SurrogateGradient(const ToyPolicy& policy,
                                      std::span<const ToyTask> tasks,
                                      std::span<const SampledGroup> groups,
                                      const grpo::GrpoConfig& cfg);

// Mean over tasks of the GRPO loss of `groups` with logprob_new recomputed
// under `policy`; the finite-difference target of SurrogateGradient.
double SurrogateLoss(const ToyPolicy& policy, std::span<const ToyTask> tasks,
                     std::span<const SampledGroup> groups,
                     const grpo::GrpoConfig& cfg);

// Samples one group per task (in task order), then takes one plain gradient
// descent step of size `lr` on the mean GRPO loss. pi_old is the policy
// before the step. Throws Error(kInvalidConfig) unless lr > 0.
StepRecord TrainStep(ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const ToyTask> tasks,
                     const grpo::GrpoConfig& cfg,
                     const RewardConfig& reward_cfg, double lr, uint64_t seed,
                     size_t step = 0);

struct TrainOptions {
  size_t steps = 500;
  double lr = 0.5;
  uint64_t seed = 0;
};

struct TrainingResult {
  TrainingCurve curve;
  ToyPolicy final_policy;
};

// The reference policy is the initial policy. Bit-identical for equal seeds.
TrainingResult RunTraining(std::span<const ToyTask> tasks,
                           const ToyPolicy& initial,
                           const grpo::GrpoConfig& cfg,
                           const RewardConfig& reward_cfg,
                           const TrainOptions& options);

// Exact probability of the fallback first answer, averaged over the selected
// contexts (all, or hard only). NaN when the selection is empty.
double FallbackProbability(const ToyPolicy& policy,
                           std::span<const ToyTask> tasks, bool hard_only);

// Exact probability that the first head picks the correct option, averaged
// over tasks.
double FirstCorrectProbability(const ToyPolicy& policy,
                               std::span<const ToyTask> tasks);

// Trailing moving average; element i averages values[i - window + 1 .. i],
// so the output has values.size() - window + 1 entries.
std::vector<double> MovingAverage(std::span<const double> values,
                                  size_t window);

std::string CurveToCsv(const TrainingCurve& curve);
std::string CurveToJson(const TrainingCurve& curve);

}  // namespace autothink::sim

#endif  // AUTOTHINK_SIM_TRAINER_H_
