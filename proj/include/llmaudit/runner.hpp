#pragma once

// Workflow drivers shared by the C API and the command-line tool. Each
// command takes a gateway, a benchmark and run options, and produces a
// report document plus the overall verdict.

#include <optional>
#include <string>
#include <vector>

#include "llmaudit/benchmark.hpp"
#include "llmaudit/consistency.hpp"
#include "llmaudit/gateway.hpp"
#include "llmaudit/report.hpp"
#include "llmaudit/validation.hpp"

namespace llmaudit {

struct RunOptions {
  /// Defaults to 5 for every command.
  int k = 5;
  ThresholdProfile profile = ThresholdProfile::medium();
  AggregationRule rule;
  ValidationOptions validation;
  double agreement_fraction = 0.66;
  PoolConvention pool = PoolConvention::kVoting;
  std::vector<std::string> exclude_validators;
  std::optional<QuestionKind> kind;
  /// Subset of configured providers to audit; empty means all of them.
  std::vector<std::string> providers;
};

/// Reads run options from a JSON object. Recognised fields: k, profile (a
/// name), thresholds {sequence, levenshtein, jaccard, cosine}, pair_quota,
/// question_quota, rule, m, qthreshold, yes_quota, non_validatable_fraction,
/// agreement_fraction, pool, kind, providers, exclude_validators. Unknown
/// fields and bad values raise kInvalidArgument naming the field.
RunOptions parse_run_options(const Json& doc);
Json to_json(const RunOptions& options);

struct CommandResult {
  Json report;
  bool all_passed = false;
  std::optional<RunFailure> failure;
};

/// Providers are audited concurrently. A gateway failure keeps the verdicts
/// of providers that completed and records the error in the report.
CommandResult run_consistency_command(Gateway& gateway, const Benchmark& benchmark,
                                      const RunOptions& options);
CommandResult run_self_validation_command(Gateway& gateway, const Benchmark& benchmark,
                                          const RunOptions& options);
CommandResult run_cross_validation_command(Gateway& gateway, const Benchmark& benchmark,
                                           const RunOptions& options);

}  // namespace llmaudit
