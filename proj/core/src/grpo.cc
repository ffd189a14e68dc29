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

#include "autothink/grpo.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "autothink/error.h"

namespace autothink::grpo {
namespace {

void CheckGroup(const GroupRollout& group, const GrpoConfig& cfg) {
  if (group.outputs.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall,
                "group '" + group.prompt_id + "' has fewer than 2 outputs");
  }
  if (cfg.group_size != 0 && group.outputs.size() != cfg.group_size) {
    throw Error(ErrorCode::kGroupSizeMismatch,
                "group '" + group.prompt_id + "' has " +
                    std::to_string(group.outputs.size()) +
                    " outputs, expected " + std::to_string(cfg.group_size));
  }
}

// d rho / d logprob_new; zero where the log-ratio clamp is active.
double RatioSlope(double logprob_new, double logprob_old) {
  const double diff = logprob_new - logprob_old;
  if (diff <= -kLogRatioClamp || diff >= kLogRatioClamp) return 0.0;
  return std::exp(diff);
}

// d surrogate / d rho, following whichever branch the min selects.
double SurrogateSlope(double rho, double advantage, double clip_eps) {
  const double clipped_rho = std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps);
  const double unclipped = rho * advantage;
  const double clipped = clipped_rho * advantage;
  if (unclipped <= clipped) return advantage;
  return clipped_rho == rho ? advantage : 0.0;
}

}  // namespace

std::vector<double> GroupRollout::rewards() const {
  std::vector<double> out;
  out.reserve(outputs.size());
  for (const Output& o : outputs) out.push_back(o.reward);
  return out;
}

void ValidateConfig(const GrpoConfig& cfg) {
  if (!(cfg.eps_adv > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "eps_adv must be positive");
  }
  if (!(cfg.clip_eps > 0.0 && cfg.clip_eps < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "clip_eps must lie in (0, 1)");
  }
  if (!(cfg.beta >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "beta must be non-negative");
  }
}

AdvantageSet NormalizeAdvantages(std::span<const double> rewards,
                                 double eps_adv) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::kGroupTooSmall,
                "advantage normalization needs at least 2 rewards");
  }
  AdvantageSet out;
  const double n = static_cast<double>(rewards.size());
  if (std::all_of(rewards.begin(), rewards.end(),
                  [&](double r) { return r == rewards.front(); })) {
    out.mean = rewards.front();
    out.values.assign(rewards.size(), 0.0);
    return out;
  }
  double sum = 0.0;
  for (double r : rewards) sum += r;
  out.mean = sum / n;
  double sq = 0.0;
  for (double r : rewards) sq += (r - out.mean) * (r - out.mean);
  out.std = std::sqrt(sq / n);
  out.values.reserve(rewards.size());
  for (double r : rewards) {
    out.values.push_back((r - out.mean) / (out.std + eps_adv));
  }
  return out;
}

double ImportanceRatio(double logprob_new, double logprob_old) {
  return std::exp(
      std::clamp(logprob_new - logprob_old, -kLogRatioClamp, kLogRatioClamp));
}

double ClippedSurrogate(double rho, double advantage, double clip_eps) {
  const double clipped = std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(rho * advantage, clipped * advantage);
}

double KlPenaltyK3(double logprob_new, double logprob_ref) {
  const double x = logprob_ref - logprob_new;
  if (std::fabs(x) < 0.05) {
    // expm1(x) - x cancels near 0; sum the series from x^2/2 instead.
    return x * x *
           (1.0 / 2 +
            x * (1.0 / 6 +
                 x * (1.0 / 24 +
                      x * (1.0 / 120 +
                           x * (1.0 / 720 +
                                x * (1.0 / 5040 +
                                     x * (1.0 / 40320 + x / 362880)))))));
  }
  return std::max(0.0, std::expm1(x) - x);
}

double GrpoLossWithAdvantages(const GroupRollout& group,
                              std::span<const double> advantages,
                              const GrpoConfig& cfg) {
  if (advantages.size() != group.outputs.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "advantage count differs from group size");
  }
  const double n = static_cast<double>(group.outputs.size());
  double surrogate = 0.0;
  double kl = 0.0;
  for (size_t i = 0; i < group.outputs.size(); ++i) {
    const Output& o = group.outputs[i];
    surrogate += ClippedSurrogate(ImportanceRatio(o.logprob_new, o.logprob_old),
                                  advantages[i], cfg.clip_eps);
    kl += KlPenaltyK3(o.logprob_new, o.logprob_ref);
  }
  return -surrogate / n + cfg.beta * (kl / n);
}

double GrpoLoss(const GroupRollout& group, const GrpoConfig& cfg) {
  CheckGroup(group, cfg);
  const AdvantageSet adv = NormalizeAdvantages(group.rewards(), cfg.eps_adv);
  return GrpoLossWithAdvantages(group, adv.values, cfg);
}

std::vector<double> PolicyGradient(
    const GroupRollout& group,
    std::span<const std::vector<double>> logprob_grads,
    const GrpoConfig& cfg) {
  CheckGroup(group, cfg);
  if (logprob_grads.size() != group.outputs.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one log-prob gradient per output is required");
  }
  const size_t dim = logprob_grads.front().size();
  for (const auto& g : logprob_grads) {
    if (g.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "log-prob gradients have inconsistent lengths");
    }
  }

  const AdvantageSet adv = NormalizeAdvantages(group.rewards(), cfg.eps_adv);
  const double n = static_cast<double>(group.outputs.size());
  std::vector<double> grad(dim, 0.0);
  for (size_t i = 0; i < group.outputs.size(); ++i) {
    const Output& o = group.outputs[i];
    const double rho = ImportanceRatio(o.logprob_new, o.logprob_old);
    // d loss / d logprob_new_i.
    const double d_surrogate = SurrogateSlope(rho, adv.values[i], cfg.clip_eps) *
                               RatioSlope(o.logprob_new, o.logprob_old);
    const double d_kl = -std::expm1(o.logprob_ref - o.logprob_new);
    const double coeff = (-d_surrogate + cfg.beta * d_kl) / n;
    if (coeff == 0.0) continue;
    const auto& g = logprob_grads[i];
    for (size_t k = 0; k < dim; ++k) grad[k] += coeff * g[k];
  }
  return grad;
}

}  // namespace autothink::grpo
