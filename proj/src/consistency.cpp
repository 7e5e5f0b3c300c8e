#include "llmaudit/consistency.hpp"

#include <cmath>

#include "llmaudit/gateway.hpp"
#include "parallel.hpp"
#include "utf8.hpp"

namespace llmaudit {

namespace {

// Quota arithmetic works on decimal fractions like 0.8; the slack absorbs the
// binary representation error of the product.
constexpr double kQuotaSlack = 1e-9;

void check_fraction(double value, const char* name) {
  if (!(value > 0.0 && value <= 1.0)) {
    fail(ErrorCode::kInvalidArgument,
         std::string(name) + " must be in (0, 1], got " + std::to_string(value));
  }
}

}  // namespace

ThresholdProfile ThresholdProfile::low() {
  return {.name = "low", .sequence_min = 20, .levenshtein_min = 20,
          .jaccard_min = 70, .cosine_min = 70};
}

ThresholdProfile ThresholdProfile::medium() {
  return {.name = "medium", .sequence_min = 40, .levenshtein_min = 40,
          .jaccard_min = 80, .cosine_min = 80};
}

ThresholdProfile ThresholdProfile::high() {
  return {.name = "high", .sequence_min = 60, .levenshtein_min = 60,
          .jaccard_min = 90, .cosine_min = 90};
}

std::optional<ThresholdProfile> named_profile(std::string_view name) {
  if (name == "low") return ThresholdProfile::low();
  if (name == "medium") return ThresholdProfile::medium();
  if (name == "high") return ThresholdProfile::high();
  return std::nullopt;
}

std::string_view to_string(AggregationSemantics semantics) {
  return semantics == AggregationSemantics::kPerPair ? "per_pair" : "per_metric";
}

std::optional<AggregationSemantics> parse_semantics(std::string_view text) {
  if (text == "per_pair") return AggregationSemantics::kPerPair;
  if (text == "per_metric") return AggregationSemantics::kPerMetric;
  return std::nullopt;
}

std::array<bool, kMetricCount> metric_passes(const SimilarityVector& v,
                                             const ThresholdProfile& p) {
  return {v.sequence >= p.sequence_min, v.levenshtein >= p.levenshtein_min,
          v.jaccard >= p.jaccard_min, v.cosine >= p.cosine_min};
}

int required_pair_count(int k, double pair_quota) {
  if (k < 2) {
    fail(ErrorCode::kInvalidArgument, "k must be >= 2 to form pairs, got " + std::to_string(k));
  }
  check_fraction(pair_quota, "pair_quota");
  const double pairs = static_cast<double>(k) * (k - 1) / 2.0;
  return static_cast<int>(std::ceil(pair_quota * pairs - kQuotaSlack));
}

std::vector<ScoredPair> score_all_pairs(const std::vector<std::string>& responses,
                                        const TokenizerConfig& cfg) {
  const int k = static_cast<int>(responses.size());
  if (k < 2) {
    fail(ErrorCode::kInvalidArgument,
         "need at least 2 responses to score pairs, got " + std::to_string(k));
  }
  std::vector<ScoredPair> pairs;
  pairs.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
  for (int i = 0; i < k - 1; ++i) {
    for (int j = i + 1; j < k; ++j) {
      pairs.push_back({i, j, similarity_vector(responses[i], responses[j], cfg)});
    }
  }
  return pairs;
}

QuestionConsistencyVerdict evaluate_question(std::string question_id, QuestionKind kind,
                                             std::vector<ScoredPair> pairs,
                                             const ThresholdProfile& profile,
                                             const AggregationRule& rule, int k) {
  if (rule.m < 1 || rule.m > 4) {
    fail(ErrorCode::kInvalidArgument, "m must be in 1..4, got " + std::to_string(rule.m));
  }
  const std::size_t expected = static_cast<std::size_t>(k) * (k - 1) / 2;
  const int npt = required_pair_count(k, profile.pair_quota);
  if (pairs.size() != expected) {
    fail(ErrorCode::kInvalidArgument,
         "question " + question_id + ": expected " + std::to_string(expected) +
             " pairs for k=" + std::to_string(k) + ", got " + std::to_string(pairs.size()));
  }

  QuestionConsistencyVerdict v;
  v.question_id = std::move(question_id);
  v.kind = kind;
  v.required_pairs = npt;
  for (const auto& pair : pairs) {
    const auto passes = metric_passes(pair.scores, profile);
    int metrics_passed = 0;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      if (passes[m]) {
        ++v.per_metric_pass_counts[m];
        ++metrics_passed;
      }
    }
    if (metrics_passed >= rule.m) ++v.passing_pair_count;
  }
  if (rule.semantics == AggregationSemantics::kPerMetric) {
    int metrics_meeting_quota = 0;
    for (int count : v.per_metric_pass_counts) {
      if (count >= npt) ++metrics_meeting_quota;
    }
    v.passed = metrics_meeting_quota >= rule.m;
  } else {
    v.passed = v.passing_pair_count >= npt;
  }
  v.pairs = std::move(pairs);
  return v;
}

ModelConsistencyVerdict evaluate_model(std::string provider_id,
                                       std::vector<QuestionConsistencyVerdict> questions,
                                       const ThresholdProfile& profile,
                                       const AggregationRule& rule, int k) {
  if (questions.empty()) {
    fail(ErrorCode::kInvalidArgument, "provider " + provider_id + ": no question verdicts");
  }
  check_fraction(profile.question_quota, "question_quota");
  ModelConsistencyVerdict out;
  out.provider_id = std::move(provider_id);
  out.profile = profile;
  out.rule = rule;
  out.k = k;
  for (const auto& q : questions) {
    if (q.passed) ++out.passed_questions;
  }
  out.consistent_question_fraction =
      static_cast<double>(out.passed_questions) / static_cast<double>(questions.size());
  out.passed = out.consistent_question_fraction >= profile.question_quota - kQuotaSlack;
  out.questions = std::move(questions);
  return out;
}

ConsistencyRun collect_consistency(Gateway& gateway, const std::string& provider_id,
                                   const Benchmark& benchmark, int k,
                                   const TokenizerConfig& cfg) {
  if (k < 2) {
    fail(ErrorCode::kInvalidArgument,
         "k must be >= 2 for consistency analysis, got " + std::to_string(k));
  }
  ConsistencyRun run;
  run.provider_id = provider_id;
  run.k = k;
  for (const auto& q : benchmark.questions) {
    try {
      auto records = gateway.query_repeated(provider_id, q.id, q.text, k);
      ScoredQuestion sq{q.id, q.kind, {}, {}};
      sq.responses.reserve(records.size());
      for (auto& r : records) sq.responses.push_back(utf8::rtrim_whitespace(r.response_text));
      run.questions.push_back(std::move(sq));
    } catch (const Error& e) {
      run.failure = RunFailure{e.code(), e.what()};
      break;
    }
  }
  detail::parallel_for(run.questions.size(), [&](std::size_t i) {
    run.questions[i].pairs = score_all_pairs(run.questions[i].responses, cfg);
  });
  return run;
}

ModelConsistencyVerdict evaluate_run(const ConsistencyRun& run,
                                     const ThresholdProfile& profile,
                                     const AggregationRule& rule) {
  std::vector<QuestionConsistencyVerdict> verdicts;
  verdicts.reserve(run.questions.size());
  for (const auto& q : run.questions) {
    verdicts.push_back(evaluate_question(q.question_id, q.kind, q.pairs, profile, rule, run.k));
  }
  return evaluate_model(run.provider_id, std::move(verdicts), profile, rule, run.k);
}

ModelConsistencyVerdict run_consistency(Gateway& gateway, const std::string& provider_id,
                                        const Benchmark& benchmark, int k,
                                        const ThresholdProfile& profile,
                                        const AggregationRule& rule) {
  ConsistencyRun run = collect_consistency(gateway, provider_id, benchmark, k);
  if (run.failure) throw Error(run.failure->code, run.failure->message);
  return evaluate_run(run, profile, rule);
}

}  // namespace llmaudit
