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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "autothink/data_filter.h"
#include "autothink/error.h"
#include "autothink/grammar.h"
#include "autothink/grpo.h"
#include "autothink/metrics.h"
#include "autothink/records.h"
#include "autothink/reward.h"
#include "autothink/router.h"
#include "autothink/sim_trainer.h"
#include "json.hpp"

namespace autothink::cli {
namespace {

struct Settings {
  std::string input = "-";
  std::string output = "-";
  bool strict = false;

  double tau = kDefaultTau;
  RewardConfig reward;
  grpo::GrpoConfig grpo;
  std::string template_name = "dual_answer";
  size_t rollouts = kDefaultRollouts;
  uint64_t seed = 0;

  std::string mode = "batch";
  std::string report;
  std::string cot;
  std::string format = "json";
  std::vector<double> taus = {0.86, 0.90, 0.94, 0.97, 0.98};
  size_t steps = 500;
  double lr = sim::TrainOptions{}.lr;
  size_t contexts = sim::kDefaultContexts;
  size_t options = sim::kDefaultOptions;
  double hard_fraction = sim::kDefaultHardFraction;
  double temperature = 1.0;
  double fallback_bias = -1.0;
  std::string json_output;
};

// Thrown for bad flag values found after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Strict-mode abort after the offending record was already reported.
struct RecordFailure {};

std::string Quote(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

// Per-invocation I/O and counters shared by every subcommand.
class Context {
 public:
  Context(std::string name, const Settings& settings, std::istream& in,
          std::ostream& out, std::ostream& err)
      : name_(std::move(name)), settings_(settings), err_(err) {
    if (settings.input == "-") {
      in_ = &in;
    } else {
      file_in_ = std::make_unique<std::ifstream>(settings.input);
      if (!*file_in_) throw UsageError("cannot open input " + settings.input);
      in_ = file_in_.get();
    }
    out_ = OpenOutput(settings.output, out);
  }

  std::istream& in() { return *in_; }
  std::ostream& out() { return *out_; }
  std::ostream& err() { return err_; }
  const Settings& settings() const { return settings_; }

  std::ostream* OpenOutput(const std::string& path, std::ostream& fallback) {
    if (path == "-") return &fallback;
    auto file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file) throw UsageError("cannot open output " + path);
    extra_outputs_.push_back(std::move(file));
    return extra_outputs_.back().get();
  }

  void ReportError(size_t line, const Error& e) {
    ++errors_;
    err_ << "autothink: error subcommand=" << name_ << " line=" << line
         << " code=" << ErrorCodeName(e.code())
         << " message=" << Quote(e.what()) << '\n';
  }

  // Applies `fn` to every non-blank line of the input. Per-record failures
  // are counted and skipped, or rethrown in strict mode.
  void ForEachLine(const std::function<void(const std::string&)>& fn) {
    std::string line;
    size_t number = 0;
    while (std::getline(*in_, line)) {
      ++number;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++read_;
      try {
        fn(line);
      } catch (const Error& e) {
        ReportError(number, e);
        if (settings_.strict) throw RecordFailure{};
      }
    }
  }

  void Wrote(size_t n = 1) { written_ += n; }
  void Read(size_t n) { read_ += n; }
  size_t read() const { return read_; }
  size_t written() const { return written_; }
  size_t errors() const { return errors_; }

  void Summary(const std::string& extra = "") {
    err_ << "autothink: summary subcommand=" << name_ << " read=" << read_
         << " written=" << written_ << " errors=" << errors_;
    if (!extra.empty()) err_ << ' ' << extra;
    err_ << '\n';
  }

 private:
  std::string name_;
  const Settings& settings_;
  std::ostream& err_;
  std::istream* in_ = nullptr;
  std::ostream* out_ = nullptr;
  std::unique_ptr<std::ifstream> file_in_;
  std::vector<std::unique_ptr<std::ofstream>> extra_outputs_;
  size_t read_ = 0;
  size_t written_ = 0;
  size_t errors_ = 0;
};

TemplateKind TemplateFlag(const Settings& s) {
  auto kind = ParseTemplateName(s.template_name);
  if (!kind) throw UsageError("unknown template " + s.template_name);
  return *kind;
}

void CheckTau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw UsageError("tau must lie in (0, 1], got " + records::FormatReal(tau));
  }
}

void CmdParse(Context& ctx) {
  const TemplateKind kind = TemplateFlag(ctx.settings());
  const std::string& fallback = ctx.settings().reward.fallback;
  ctx.ForEachLine([&](const std::string& line) {
    const auto req = records::ParseParseRequest(line, kind);
    ctx.out() << records::ParsedToJson(
                     req.id, ParseResponse(req.response, req.kind, fallback))
              << '\n';
    ctx.Wrote();
  });
  ctx.Summary();
}

void CmdScore(Context& ctx) {
  const TemplateKind kind = TemplateFlag(ctx.settings());
  const RewardConfig& cfg = ctx.settings().reward;
  double total = 0.0;
  ctx.ForEachLine([&](const std::string& line) {
    const auto req = records::ParseScoreRequest(line, kind);
    const RewardBreakdown r = ScoreResponse(
        ParseResponse(req.response, req.kind, cfg.fallback), req.truth, cfg);
    ctx.out() << records::RewardToJson(req.id, r) << '\n';
    total += r.total;
    ctx.Wrote();
  });
  ctx.Summary("mean_total=" +
              records::FormatReal(ctx.written() == 0
                                      ? 0.0
                                      : total / static_cast<double>(
                                                    ctx.written())));
}

void CmdRoute(Context& ctx, bool tau_given) {
  const Settings& s = ctx.settings();
  if (s.mode != "batch" && s.mode != "stream") {
    throw UsageError("--mode must be batch or stream");
  }
  const bool stream = s.mode == "stream";
  size_t exits = 0;
  ctx.ForEachLine([&](const std::string& line) {
    const auto rec = records::ParseTraceRecord(line);
    const double tau = tau_given ? s.tau : rec.tau.value_or(s.tau);
    const ConfidenceDecision d =
        stream ? RouteStream(rec.tokens, tau, s.reward.fallback)
               : RouteTrace(rec.tokens, tau, s.reward.fallback);
    ctx.out() << records::DecisionToJson(rec.id, d) << '\n';
    exits += d.action == RouteAction::kEarlyExit;
    ctx.Wrote();
  });
  ctx.Summary("early_exit=" + std::to_string(exits) +
              " continue=" + std::to_string(ctx.written() - exits));
}

void CheckGroupSize(const grpo::GroupRollout& group,
                    const grpo::GrpoConfig& cfg) {
  if (cfg.group_size != 0 && group.outputs.size() != cfg.group_size) {
    throw Error(ErrorCode::kGroupSizeMismatch,
                "group has " + std::to_string(group.outputs.size()) +
                    " outputs, expected " + std::to_string(cfg.group_size));
  }
}

void CmdAdvantage(Context& ctx) {
  const grpo::GrpoConfig& cfg = ctx.settings().grpo;
  grpo::ValidateConfig(cfg);
  ctx.ForEachLine([&](const std::string& line) {
    const auto group = records::ParseGroupRecord(line);
    CheckGroupSize(group, cfg);
    const std::vector<double> rewards = group.rewards();
    ctx.out() << records::AdvantagesToJson(
                     group.prompt_id,
                     grpo::NormalizeAdvantages(rewards, cfg.eps_adv))
              << '\n';
    ctx.Wrote();
  });
  ctx.Summary();
}

void CmdLoss(Context& ctx) {
  const grpo::GrpoConfig& cfg = ctx.settings().grpo;
  grpo::ValidateConfig(cfg);
  double sum = 0.0;
  ctx.ForEachLine([&](const std::string& line) {
    const auto group = records::ParseGroupRecord(line);
    const double loss = grpo::GrpoLoss(group, cfg);
    ctx.out() << records::LossToJson(group.prompt_id, loss) << '\n';
    sum += loss;
    ctx.Wrote();
  });
  ctx.Summary("mean_loss=" +
              records::FormatReal(ctx.written() == 0
                                      ? 0.0
                                      : sum / static_cast<double>(
                                                  ctx.written())));
}

void CmdTrainSim(Context& ctx, std::ostream& fallback_out) {
  const Settings& s = ctx.settings();
  if (s.steps < 1) throw UsageError("--steps must be >= 1");
  if (!(s.lr > 0.0)) throw UsageError("--lr must be > 0");
  const auto tasks =
      sim::MakeToyEnv(s.seed, s.contexts, s.options, s.hard_fraction);
  const auto initial = sim::ToyPolicy::Initial(tasks, s.options, s.temperature,
                                               s.fallback_bias);
  const auto result = sim::RunTraining(tasks, initial, s.grpo, s.reward,
                                       {s.steps, s.lr, s.seed});
  ctx.out() << sim::CurveToCsv(result.curve);
  ctx.Wrote(result.curve.size());
  if (!s.json_output.empty()) {
    *ctx.OpenOutput(s.json_output, fallback_out)
        << sim::CurveToJson(result.curve) << '\n';
  }
  const sim::StepRecord& last = result.curve.back();
  ctx.Summary("steps=" + std::to_string(result.curve.size()) +
              " final_mean_r1=" + records::FormatReal(last.mean_r_task_first) +
              " final_mean_r2=" + records::FormatReal(last.mean_r_task_second) +
              " final_mean_total=" + records::FormatReal(last.mean_total));
}

void CmdFilter(Context& ctx, std::ostream& fallback_out) {
  const Settings& s = ctx.settings();
  if (s.rollouts < 1) throw UsageError("--rollouts must be >= 1");
  const FilterReport report = FilterDataset(
      ctx.in(), ctx.out(), {s.rollouts, s.strict},
      [&](size_t line, const std::string& message) {
        ctx.ReportError(line, Error(ErrorCode::kSchemaError, message));
      });
  if (!s.report.empty()) {
    *ctx.OpenOutput(s.report, fallback_out) << report.ToJson() << '\n';
  }
  ctx.Read(report.total());
  ctx.Wrote(report.kept);
  ctx.Summary("total=" + std::to_string(report.total()) +
              " kept=" + std::to_string(report.kept) +
              " dropped_easy=" + std::to_string(report.dropped_easy) +
              " dropped_hard=" + std::to_string(report.dropped_hard) +
              " dropped_invalid=" + std::to_string(report.dropped_invalid));
}

std::vector<metrics::EvalRecord> ReadEvalRecords(Context& ctx) {
  std::vector<metrics::EvalRecord> records;
  ctx.ForEachLine([&](const std::string& line) {
    records.push_back(records::ParseEvalRecord(line));
  });
  return records;
}

void CmdBench(Context& ctx) {
  const Settings& s = ctx.settings();
  if (s.format != "json" && s.format != "table") {
    throw UsageError("--format must be json or table");
  }
  const auto direct = ReadEvalRecords(ctx);
  if (!s.cot.empty()) {
    Settings cot_settings = s;
    cot_settings.input = s.cot;
    cot_settings.output = "-";
    std::istringstream unused_in;
    std::ostringstream unused_out;
    Context cot_ctx("bench", cot_settings, unused_in, unused_out, ctx.err());
    const auto cot = ReadEvalRecords(cot_ctx);
    const auto cmp = metrics::CompareStrategies(direct, cot);
    ctx.out() << (s.format == "json" ? metrics::ComparisonToJson(cmp) + "\n"
                                     : metrics::FormatComparisonTable(cmp));
  } else {
    const auto m = metrics::Evaluate(direct);
    ctx.out() << (s.format == "json" ? metrics::MetricsToJson(m) + "\n"
                                     : metrics::FormatMetricsTable(m));
  }
  ctx.Wrote();
  ctx.Summary("records=" + std::to_string(direct.size()));
}

void CmdSweepTau(Context& ctx) {
  const Settings& s = ctx.settings();
  if (s.taus.empty()) throw UsageError("--taus needs at least one value");
  for (double tau : s.taus) CheckTau(tau);
  std::vector<records::TraceRecord> traces;
  ctx.ForEachLine([&](const std::string& line) {
    auto rec = records::ParseTraceRecord(line);
    if (!rec.correct_first || !rec.correct_second) {
      throw Error(ErrorCode::kSchemaError,
                  "sweep-tau needs correct_first and correct_second");
    }
    traces.push_back(std::move(rec));
  });
  if (traces.empty()) throw Error(ErrorCode::kEmptyCorpus, "no usable traces");

  ctx.out() << "tau,think_ratio,accuracy\n";
  for (double tau : s.taus) {
    std::vector<metrics::EvalRecord> evals;
    evals.reserve(traces.size());
    for (const auto& t : traces) {
      metrics::EvalRecord e;
      e.id = t.id;
      e.correct_first = t.correct_first;
      e.correct_second = t.correct_second;
      e.action = RouteTrace(t.tokens, tau, s.reward.fallback).action;
      evals.push_back(std::move(e));
    }
    const auto accuracy = metrics::Accuracy(evals);
    ctx.out() << records::FormatReal(tau) << ','
              << records::FormatReal(metrics::ThinkRatio(evals)) << ','
              << (accuracy ? records::FormatReal(*accuracy) : "null") << '\n';
    ctx.Wrote();
  }
  ctx.Summary("traces=" + std::to_string(traces.size()));
}

void AddInput(CLI::App* sub, Settings& s) {
  sub->add_option("input", s.input, "Input JSONL path, - for stdin")
      ->capture_default_str();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Dual-answer reasoning toolkit: parsing, rewards, GRPO, "
               "early-exit routing, data filtering and evaluation."};
  app.name(args.empty() ? "autothink" : args.front());
  app.fallthrough();
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "",
                 "Read flags from a key = value (INI/TOML) file");

  app.add_option("--output", s.output, "Output path, - for stdout");
  app.add_flag("--strict", s.strict,
               "Fail on the first malformed record (exit 2) instead of "
               "counting and skipping it");
  app.add_option("--tau", s.tau, "Early-exit confidence threshold");
  app.add_option("--w1", s.reward.w1, "Weight of the first-answer reward");
  app.add_option("--w2", s.reward.w2, "Weight of the second-answer reward");
  app.add_option("--lambda-fmt", s.reward.lambda_fmt, "Format reward weight");
  app.add_option("--alpha", s.reward.alpha, "Fallback bonus weight");
  app.add_option("--fallback", s.reward.fallback, "Fallback answer string");
  app.add_option("--group-size", s.grpo.group_size,
                 "Outputs per group (0 accepts any size >= 2)");
  app.add_option("--eps-adv", s.grpo.eps_adv,
                 "Advantage normalization epsilon");
  app.add_option("--clip-eps", s.grpo.clip_eps, "Ratio clipping epsilon");
  app.add_option("--beta", s.grpo.beta, "KL penalty weight");
  app.add_option("--seed", s.seed, "Random seed");
  app.add_option("--template", s.template_name,
                 "Template for records without one: dual_answer, "
                 "think_then_answer or direct_answer");
  app.add_option("--rollouts", s.rollouts,
                 "Rollouts per sample for the difficulty filter");

  auto* parse = app.add_subcommand("parse", "Parse responses");
  auto* score = app.add_subcommand("score", "Score responses");
  auto* route = app.add_subcommand("route", "Route recorded traces");
  route->add_option("--mode", s.mode, "batch or stream");
  auto* advantage =
      app.add_subcommand("advantage", "Group-normalized advantages");
  auto* loss = app.add_subcommand("loss", "GRPO loss per group");
  auto* train = app.add_subcommand("train-sim", "Train the toy policy");
  train->add_option("--steps", s.steps, "Training steps");
  train->add_option("--lr", s.lr, "Learning rate");
  train->add_option("--contexts", s.contexts, "Toy contexts");
  train->add_option("--options", s.options, "Answer options per context");
  train->add_option("--hard-fraction", s.hard_fraction,
                    "Share of hard contexts");
  train->add_option("--temperature", s.temperature, "Policy temperature");
  train->add_option("--fallback-bias", s.fallback_bias,
                    "Initial fallback logit");
  train->add_option("--json", s.json_output, "Also write the curve as JSON");
  auto* filter = app.add_subcommand("filter", "Difficulty filter");
  filter->add_option("--report", s.report, "Write the filter report JSON");
  auto* bench = app.add_subcommand("bench", "Corpus metrics");
  bench->add_option("--cot", s.cot,
                    "Compare against this CoT corpus (input is direct)");
  bench->add_option("--format", s.format, "json or table");
  auto* sweep = app.add_subcommand("sweep-tau", "Think ratio and accuracy "
                                                "per threshold, as CSV");
  sweep->add_option("--taus", s.taus, "Thresholds")->delimiter(',');
  for (auto* sub : {parse, score, route, advantage, loss, filter, bench,
                    sweep}) {
    AddInput(sub, s);
  }

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "autothink: error code=usage message=" << Quote(e.what()) << '\n'
        << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    CheckTau(s.tau);
    Context ctx(name, s, in, out, err);
    if (name == "parse") CmdParse(ctx);
    else if (name == "score") CmdScore(ctx);
    else if (name == "route") CmdRoute(ctx, app.count("--tau") > 0);
    else if (name == "advantage") CmdAdvantage(ctx);
    else if (name == "loss") CmdLoss(ctx);
    else if (name == "train-sim") CmdTrainSim(ctx, out);
    else if (name == "filter") CmdFilter(ctx, out);
    else if (name == "bench") CmdBench(ctx);
    else if (name == "sweep-tau") CmdSweepTau(ctx);
    ctx.out().flush();
  } catch (const UsageError& e) {
    err << "autothink: error subcommand=" << name
        << " code=usage message=" << Quote(e.what()) << '\n';
    return kExitUsage;
  } catch (const RecordFailure&) {
    return kExitData;
  } catch (const Error& e) {
    err << "autothink: error subcommand=" << name
        << " code=" << ErrorCodeName(e.code())
        << " message=" << Quote(e.what()) << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kExitUsage : kExitData;
  }
  return kExitOk;
}

}  // namespace autothink::cli
