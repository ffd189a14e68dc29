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

#include "autothink/sim_trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "autothink/error.h"
#include "autothink/grammar.h"
#include "autothink/records.h"
#include "json.hpp"

namespace autothink::sim {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double LogSumExp(std::span<const double> logits) {
  double max = kNegInf;
  for (double z : logits) max = std::max(max, z);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - max);
  return max + std::log(sum);
}

std::vector<double> Softmax(std::span<const double> logits) {
  const double lse = LogSumExp(logits);
  std::vector<double> p;
  p.reserve(logits.size());
  for (double z : logits) p.push_back(std::exp(z - lse));
  return p;
}

std::string AnswerLabel(size_t index, size_t k) {
  if (k <= 5) return std::string(1, static_cast<char>('A' + index));
  return "option " + std::to_string(index + 1);
}

const ToyTask& TaskFor(std::span<const ToyTask> tasks, size_t i) {
  return tasks[i];
}

void CheckGroupsMatch(std::span<const ToyTask> tasks,
                      std::span<const SampledGroup> groups) {
  if (tasks.size() != groups.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one sampled group per task is required");
  }
}

}  // namespace

QaTruth ToyTask::truth() const {
  return {answer_set[correct_index],
          answer_set.size() <= 5 ? AnswerKind::kMcq : AnswerKind::kText};
}

std::vector<ToyTask> MakeToyEnv(uint64_t seed, size_t n_contexts, size_t k,
                                double hard_fraction) {
  if (n_contexts < 1 || k < 2 || !(hard_fraction >= 0.0 && hard_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "toy env needs n_contexts >= 1, k >= 2, hard_fraction in [0,1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<ToyTask> tasks(n_contexts);
  for (size_t c = 0; c < n_contexts; ++c) {
    tasks[c].context_id = c;
    for (size_t j = 0; j < k; ++j) tasks[c].answer_set.push_back(AnswerLabel(j, k));
    tasks[c].correct_index = static_cast<size_t>(rng() % k);
  }
  std::vector<size_t> order(n_contexts);
  for (size_t i = 0; i < n_contexts; ++i) order[i] = i;
  for (size_t i = n_contexts; i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<size_t>(rng() % i)]);
  }
  const auto n_hard = static_cast<size_t>(
      std::llround(hard_fraction * static_cast<double>(n_contexts)));
  for (size_t i = 0; i < n_hard; ++i) {
    tasks[order[i]].difficulty = Difficulty::kHard;
  }
  return tasks;
}

ToyPolicy ToyPolicy::Initial(std::span<const ToyTask> tasks, size_t k,
                             double temperature, double fallback_bias) {
  if (k < 2 || !(temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "toy policy needs k >= 2 and a positive temperature");
  }
  ToyPolicy policy;
  policy.k_ = k;
  policy.temperature_ = temperature;
  for (const ToyTask& t : tasks) {
    if (t.answer_set.size() != k) {
      throw Error(ErrorCode::kDimensionMismatch, "task answer set size != k");
    }
    policy.num_contexts_ = std::max(policy.num_contexts_, t.context_id + 1);
  }
  policy.params_.assign(policy.num_contexts_ * (2 * k + 1), 0.0);
  for (size_t c = 0; c < policy.num_contexts_; ++c) {
    policy.params_[policy.FirstOffset(c) + k] = fallback_bias;
  }
  return policy;
}

size_t ToyPolicy::FirstOffset(size_t context) const {
  return context * (2 * k_ + 1);
}

size_t ToyPolicy::SecondOffset(size_t context) const {
  return FirstOffset(context) + k_ + 1;
}

std::vector<double> ToyPolicy::HeadLogits(const ToyTask& task,
                                          bool first) const {
  const size_t size = first ? k_ + 1 : k_;
  const size_t offset =
      first ? FirstOffset(task.context_id) : SecondOffset(task.context_id);
  std::vector<double> logits(size);
  for (size_t j = 0; j < size; ++j) logits[j] = params_[offset + j] / temperature_;
  if (first && task.difficulty == Difficulty::kHard) {
    logits[task.correct_index] = kNegInf;
  }
  return logits;
}

std::vector<double> ToyPolicy::FirstProbs(const ToyTask& task) const {
  return Softmax(HeadLogits(task, true));
}

std::vector<double> ToyPolicy::SecondProbs(const ToyTask& task) const {
  return Softmax(HeadLogits(task, false));
}

double ToyPolicy::LogProb(const ToyTask& task, const Action& action) const {
  const auto first = HeadLogits(task, true);
  const auto second = HeadLogits(task, false);
  return (first[action.first] - LogSumExp(first)) +
         (second[action.second] - LogSumExp(second));
}

std::vector<double> ToyPolicy::LogProbGradient(const ToyTask& task,
                                               const Action& action) const {
  std::vector<double> grad(params_.size(), 0.0);
  const auto p1 = FirstProbs(task);
  const size_t o1 = FirstOffset(task.context_id);
  const bool masked = task.difficulty == Difficulty::kHard;
  for (size_t j = 0; j <= k_; ++j) {
    if (masked && j == task.correct_index) continue;
    grad[o1 + j] = ((j == action.first ? 1.0 : 0.0) - p1[j]) / temperature_;
  }
  const auto p2 = SecondProbs(task);
  const size_t o2 = SecondOffset(task.context_id);
  for (size_t j = 0; j < k_; ++j) {
    grad[o2 + j] = ((j == action.second ? 1.0 : 0.0) - p2[j]) / temperature_;
  }
  return grad;
}

double ToyPolicy::NormalizationError(std::span<const ToyTask> tasks) const {
  double worst = 0.0;
  for (const ToyTask& t : tasks) {
    for (bool first : {true, false}) {
      double sum = 0.0;
      for (double p : Softmax(HeadLogits(t, first))) sum += p;
      worst = std::max(worst, std::fabs(std::log(sum)));
    }
  }
  return worst;
}

size_t SampleCategorical(std::span<const double> probs, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  size_t last_positive = 0;
  for (size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    cumulative += probs[j];
    last_positive = j;
    if (u < cumulative) return j;
  }
  return last_positive;
}

SampledGroup SampleGroup(const ToyPolicy& policy, const ToyPolicy& reference,
                         const ToyTask& task, size_t group_size,
                         const RewardConfig& reward_cfg, uint64_t seed) {
  if (group_size < 2) {
    throw Error(ErrorCode::kGroupTooSmall, "group size must be >= 2");
  }
  std::mt19937_64 rng(seed);
  const auto p1 = policy.FirstProbs(task);
  const auto p2 = policy.SecondProbs(task);
  const QaTruth truth = task.truth();
  const std::string think =
      "reviewing context " + std::to_string(task.context_id);

  SampledGroup group;
  group.rollout.prompt_id = "context-" + std::to_string(task.context_id);
  for (size_t i = 0; i < group_size; ++i) {
    Action a;
    a.first = SampleCategorical(p1, rng);
    a.second = SampleCategorical(p2, rng);
    const std::string first_text = a.first == policy.k()
                                       ? reward_cfg.fallback
                                       : task.answer_set[a.first];
    std::string response = RenderTemplate(first_text, think,
                                          task.answer_set[a.second],
                                          TemplateKind::kDualAnswer);
    const RewardBreakdown reward = CombineDualReward(
        ParseResponse(response, TemplateKind::kDualAnswer, reward_cfg.fallback),
        truth, reward_cfg);
    const double logprob = policy.LogProb(task, a);
    group.rollout.outputs.push_back(
        {reward.total, logprob, logprob, reference.LogProb(task, a)});
    group.actions.push_back(a);
    group.responses.push_back(std::move(response));
    group.rewards.push_back(reward);
  }
  return group;
}

std::vector<double> SurrogateGradient(const ToyPolicy& policy,
                                      std::span<const ToyTask> tasks,
                                      std::span<const SampledGroup> groups,
                                      const grpo::GrpoConfig& cfg) {
  CheckGroupsMatch(tasks, groups);
  std::vector<double> grad(policy.params().size(), 0.0);
  for (size_t t = 0; t < tasks.size(); ++t) {
    const ToyTask& task = TaskFor(tasks, t);
    grpo::GroupRollout rollout = groups[t].rollout;
    std::vector<std::vector<double>> logprob_grads;
    logprob_grads.reserve(rollout.outputs.size());
    for (size_t i = 0; i < rollout.outputs.size(); ++i) {
      rollout.outputs[i].logprob_new = policy.LogProb(task, groups[t].actions[i]);
      logprob_grads.push_back(policy.LogProbGradient(task, groups[t].actions[i]));
    }
    const auto g = grpo::PolicyGradient(rollout, logprob_grads, cfg);
    for (size_t k = 0; k < grad.size(); ++k) grad[k] += g[k];
  }
  const double n = static_cast<double>(tasks.size());
  for (double& g : grad) g /= n;
  return grad;
}

double SurrogateLoss(const ToyPolicy& policy, std::span<const ToyTask> tasks,
                     std::span<const SampledGroup> groups,
                     const grpo::GrpoConfig& cfg) {
  CheckGroupsMatch(tasks, groups);
  double total = 0.0;
  for (size_t t = 0; t < tasks.size(); ++t) {
    grpo::GroupRollout rollout = groups[t].rollout;
    for (size_t i = 0; i < rollout.outputs.size(); ++i) {
      rollout.outputs[i].logprob_new =
          policy.LogProb(TaskFor(tasks, t), groups[t].actions[i]);
    }
    total += grpo::GrpoLoss(rollout, cfg);
  }
  return total / static_cast<double>(tasks.size());
}

StepRecord TrainStep(ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const ToyTask> tasks,
                     const grpo::GrpoConfig& cfg,
                     const RewardConfig& reward_cfg, double lr, uint64_t seed,
                     size_t step) {
  if (!(lr > 0.0)) throw Error(ErrorCode::kInvalidConfig, "lr must be > 0");
  if (tasks.empty()) throw Error(ErrorCode::kInvalidConfig, "no tasks");
  grpo::ValidateConfig(cfg);
  const size_t group_size = cfg.group_size;

  std::vector<SampledGroup> groups;
  groups.reserve(tasks.size());
  for (size_t t = 0; t < tasks.size(); ++t) {
    groups.push_back(SampleGroup(policy, reference, tasks[t], group_size,
                                 reward_cfg, SplitMix64(seed + t)));
  }

  StepRecord record;
  record.step = step;
  size_t samples = 0;
  size_t fallbacks = 0;
  size_t hard_samples = 0;
  size_t hard_fallbacks = 0;
  for (size_t t = 0; t < tasks.size(); ++t) {
    const bool hard = tasks[t].difficulty == Difficulty::kHard;
    for (size_t i = 0; i < groups[t].actions.size(); ++i) {
      const RewardBreakdown& r = groups[t].rewards[i];
      record.mean_r_task_first += r.r_task_first;
      record.mean_r_task_second += r.r_task_second;
      record.mean_total += r.total;
      const bool fallback = groups[t].actions[i].first == policy.k();
      fallbacks += fallback;
      ++samples;
      if (hard) {
        ++hard_samples;
        hard_fallbacks += fallback;
      }
    }
  }
  const double n = static_cast<double>(samples);
  record.mean_r_task_first /= n;
  record.mean_r_task_second /= n;
  record.mean_total /= n;
  record.fallback_rate = static_cast<double>(fallbacks) / n;
  record.hard_fallback_rate =
      hard_samples == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : static_cast<double>(hard_fallbacks) /
                              static_cast<double>(hard_samples);

  const auto grad = SurrogateGradient(policy, tasks, groups, cfg);
  auto& params = policy.params();
  for (size_t k = 0; k < params.size(); ++k) params[k] -= lr * grad[k];
  return record;
}

TrainingResult RunTraining(std::span<const ToyTask> tasks,
                           const ToyPolicy& initial,
                           const grpo::GrpoConfig& cfg,
                           const RewardConfig& reward_cfg,
                           const TrainOptions& options) {
  if (options.steps < 1) {
    throw Error(ErrorCode::kInvalidConfig, "steps must be >= 1");
  }
  TrainingResult result{{}, initial};
  result.curve.reserve(options.steps);
  for (size_t s = 0; s < options.steps; ++s) {
    const uint64_t step_seed =
        SplitMix64(options.seed * 0x100000001b3ULL + s);
    result.curve.push_back(TrainStep(result.final_policy, initial, tasks, cfg,
                                     reward_cfg, options.lr, step_seed, s));
  }
  return result;
}

double FallbackProbability(const ToyPolicy& policy,
                           std::span<const ToyTask> tasks, bool hard_only) {
  double sum = 0.0;
  size_t count = 0;
  for (const ToyTask& t : tasks) {
    if (hard_only && t.difficulty != Difficulty::kHard) continue;
    sum += policy.FirstProbs(t)[policy.k()];
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / static_cast<double>(count);
}

double FirstCorrectProbability(const ToyPolicy& policy,
                               std::span<const ToyTask> tasks) {
  double sum = 0.0;
  for (const ToyTask& t : tasks) sum += policy.FirstProbs(t)[t.correct_index];
  return tasks.empty() ? 0.0 : sum / static_cast<double>(tasks.size());
}

std::vector<double> MovingAverage(std::span<const double> values,
                                  size_t window) {
  std::vector<double> out;
  if (window == 0 || values.size() < window) return out;
  for (size_t i = window - 1; i < values.size(); ++i) {
    double sum = 0.0;
    for (size_t j = i + 1 - window; j <= i; ++j) sum += values[j];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

std::string CurveToCsv(const TrainingCurve& curve) {
  std::ostringstream out;
  out << "step,mean_r1,mean_r2,mean_total,fallback_rate\n";
  for (const StepRecord& r : curve) {
    out << r.step << ',' << records::FormatReal(r.mean_r_task_first) << ','
        << records::FormatReal(r.mean_r_task_second) << ','
        << records::FormatReal(r.mean_total) << ','
        << records::FormatReal(r.fallback_rate) << '\n';
  }
  return out.str();
}

std::string CurveToJson(const TrainingCurve& curve) {
  nlohmann::json rows = nlohmann::json::array();
  for (const StepRecord& r : curve) {
    rows.push_back({{"step", r.step},
                    {"mean_r_task_first", r.mean_r_task_first},
                    {"mean_r_task_second", r.mean_r_task_second},
                    {"mean_total", r.mean_total},
                    {"fallback_rate", r.fallback_rate},
                    {"hard_fallback_rate",
                     std::isnan(r.hard_fallback_rate)
                         ? nlohmann::json()
                         : nlohmann::json(r.hard_fallback_rate)}});
  }
  return nlohmann::json{{"curve", rows}}.dump();
}

}  // namespace autothink::sim
