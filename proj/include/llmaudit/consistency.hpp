#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmaudit/benchmark.hpp"
#include "llmaudit/error.hpp"
#include "llmaudit/similarity.hpp"

namespace llmaudit {

class Gateway;

/// Per-metric pass thresholds plus the two quotas. A pair passes a metric
/// when its score is >= that metric's threshold.
struct ThresholdProfile {
  std::string name = "custom";
  double sequence_min = 0.0;
  double levenshtein_min = 0.0;
  double jaccard_min = 0.0;
  double cosine_min = 0.0;
  double pair_quota = 0.8;
  double question_quota = 0.8;

  static ThresholdProfile low();
  static ThresholdProfile medium();
  static ThresholdProfile high();

  bool operator==(const ThresholdProfile&) const = default;
};

/// "low", "medium" or "high".
std::optional<ThresholdProfile> named_profile(std::string_view name);

enum class AggregationSemantics {
  /// A pair passes when >= m of its four scores pass; the question passes
  /// when the passing pairs reach the pair quota.
  kPerPair,
  /// Each metric counts its passing pairs; the question passes when >= m
  /// metrics reach the pair quota. m = 4 is the all-metrics condition.
  kPerMetric,
};

std::string_view to_string(AggregationSemantics semantics);
std::optional<AggregationSemantics> parse_semantics(std::string_view text);

struct AggregationRule {
  AggregationSemantics semantics = AggregationSemantics::kPerMetric;
  int m = 4;

  bool operator==(const AggregationRule&) const = default;
};

/// Metric order used by every count array: sequence, levenshtein, jaccard,
/// cosine.
inline constexpr std::size_t kMetricCount = 4;
using MetricCounts = std::array<int, kMetricCount>;

std::array<bool, kMetricCount> metric_passes(const SimilarityVector& v,
                                             const ThresholdProfile& profile);

struct ScoredPair {
  int i = 0;  // 0-based response indices, i < j
  int j = 0;
  SimilarityVector scores;

  bool operator==(const ScoredPair&) const = default;
};

struct QuestionConsistencyVerdict {
  std::string question_id;
  QuestionKind kind = QuestionKind::kInformational;
  std::vector<ScoredPair> pairs;
  MetricCounts per_metric_pass_counts{};
  int passing_pair_count = 0;
  int required_pairs = 0;
  bool passed = false;

  bool operator==(const QuestionConsistencyVerdict&) const = default;
};

struct ModelConsistencyVerdict {
  std::string provider_id;
  ThresholdProfile profile;
  AggregationRule rule;
  int k = 0;
  std::vector<QuestionConsistencyVerdict> questions;
  int passed_questions = 0;
  double consistent_question_fraction = 0.0;
  bool passed = false;

  bool operator==(const ModelConsistencyVerdict&) const = default;
};

/// ceil(pair_quota * k(k-1)/2). Throws kInvalidArgument for k < 2 or a quota
/// outside (0, 1].
int required_pair_count(int k, double pair_quota);

/// All k(k-1)/2 pairs (i, j), i < j, in row-major order.
std::vector<ScoredPair> score_all_pairs(const std::vector<std::string>& responses,
                                        const TokenizerConfig& cfg = {});

QuestionConsistencyVerdict evaluate_question(std::string question_id,
                                             QuestionKind kind,
                                             std::vector<ScoredPair> pairs,
                                             const ThresholdProfile& profile,
                                             const AggregationRule& rule, int k);

/// Throws kInvalidArgument on an empty verdict list.
ModelConsistencyVerdict evaluate_model(std::string provider_id,
                                       std::vector<QuestionConsistencyVerdict> questions,
                                       const ThresholdProfile& profile,
                                       const AggregationRule& rule, int k);

/// Scored responses for one question, reusable under any profile and rule.
struct ScoredQuestion {
  std::string question_id;
  QuestionKind kind = QuestionKind::kInformational;
  std::vector<std::string> responses;
  std::vector<ScoredPair> pairs;

  bool operator==(const ScoredQuestion&) const = default;
};

struct RunFailure {
  ErrorCode code = ErrorCode::kInternal;
  std::string message;
};

/// Responses collected and scored for one provider. On a gateway failure the
/// questions completed so far are kept and `failure` is set.
struct ConsistencyRun {
  std::string provider_id;
  int k = 0;
  std::vector<ScoredQuestion> questions;
  std::optional<RunFailure> failure;
};

ConsistencyRun collect_consistency(Gateway& gateway, const std::string& provider_id,
                                   const Benchmark& benchmark, int k,
                                   const TokenizerConfig& cfg = {});

/// Throws kInvalidArgument when the run has no questions.
ModelConsistencyVerdict evaluate_run(const ConsistencyRun& run,
                                     const ThresholdProfile& profile,
                                     const AggregationRule& rule);

/// collect_consistency followed by evaluate_run; gateway failures throw.
ModelConsistencyVerdict run_consistency(Gateway& gateway, const std::string& provider_id,
                                        const Benchmark& benchmark, int k,
                                        const ThresholdProfile& profile,
                                        const AggregationRule& rule);

}  // namespace llmaudit
