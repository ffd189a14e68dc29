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

#ifndef AUTOTHINK_GRPO_H_
#define AUTOTHINK_GRPO_H_

#include <span>
#include <string>
#include <vector>

namespace autothink::grpo {

// One sampled output with sequence-level log-probabilities under the current,
// behaviour and reference policies.
struct Output {
  double reward = 0.0;
  double logprob_new = 0.0;
  double logprob_old = 0.0;
  double logprob_ref = 0.0;
};

struct GroupRollout {
  std::string prompt_id;
  std::vector<Output> outputs;

  std::vector<double> rewards() const;
};

struct GrpoConfig {
  double eps_adv = 1e-4;
  double clip_eps = 0.2;
  double beta = 0.01;
  // Expected number of outputs per group; 0 accepts any size >= 2.
  size_t group_size = 16;
};

// Throws Error(kInvalidConfig) on a non-positive eps_adv, clip_eps outside
// (0, 1) or negative beta.
void ValidateConfig(const GrpoConfig& cfg);

struct AdvantageSet {
  std::vector<double> values;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// A_i = (r_i - mean) / (std + eps_adv). Constant groups short-circuit to
// exact zeros. Throws Error(kGroupTooSmall) for fewer than two rewards.
AdvantageSet NormalizeAdvantages(std::span<const double> rewards,
                                 double eps_adv);

inline constexpr double kLogRatioClamp = 20.0;

// exp(clamp(logprob_new - logprob_old, -20, 20)).
double ImportanceRatio(double logprob_new, double logprob_old);

// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double ClippedSurrogate(double rho, double advantage, double clip_eps);

// Per-sample KL(pi_new || pi_ref) estimate exp(x) - x - 1 with
// x = logprob_ref - logprob_new. Never negative.
double KlPenaltyK3(double logprob_new, double logprob_ref);

// -(1/G) sum_i surrogate_i + beta (1/G) sum_i kl_i, advantages taken from
// the group's own rewards. Sums run left to right over the group.
double GrpoLoss(const GroupRollout& group, const GrpoConfig& cfg);

// Same loss with precomputed advantages; the building block of GrpoLoss.
double GrpoLossWithAdvantages(const GroupRollout& group,
                              std::span<const double> advantages,
                              const GrpoConfig& cfg);

// Gradient of GrpoLoss with respect to the policy parameters, holding the
// advantages and pi_old fixed. `logprob_grads[i]` is d logprob_new_i / d theta
// for output i. Throws Error(kDimensionMismatch) when the gradient count or
// lengths disagree with the group.
std::vector<double> PolicyGradient(
    const GroupRollout& group,
    std::span<const std::vector<double>> logprob_grads,
    const GrpoConfig& cfg);

}  // namespace autothink::grpo

#endif  // AUTOTHINK_GRPO_H_
