#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmaudit/benchmark.hpp"

namespace llmaudit {

class Gateway;

enum class YesNo { kYes, kNo, kIndeterminate };

std::string_view to_string(YesNo value);

struct YesNoVerdict {
  YesNo value = YesNo::kIndeterminate;
  std::string raw_text;

  bool operator==(const YesNoVerdict&) const = default;
};

inline constexpr std::string_view kValidationSuffix = "correct? yes or no";

/// question + "\n\n" + response + "\n\n" + "correct? yes or no".
/// Throws kInvalidArgument if either input is empty.
std::string build_validation_prompt(std::string_view question, std::string_view response);

/// Case-insensitive. The first word decides when it is "yes" or "no";
/// otherwise a lone standalone "yes" or "no" anywhere decides; anything else
/// is indeterminate. Words are runs of ASCII letters, digits and apostrophes.
YesNoVerdict parse_yes_no(std::string_view raw);

/// yes_count > yes_quota * k (strict).
bool validator_accepts(int yes_count, int k, double yes_quota);

enum class PoolConvention {
  /// Quota base is the validators actually voting: providers - 1 minus excluded.
  kVoting,
  /// Quota base is the full provider list, validated model included.
  kAllModels,
};

std::string_view to_string(PoolConvention pool);
std::optional<PoolConvention> parse_pool_convention(std::string_view text);

int quota_base(PoolConvention pool, int provider_count, int voting_validators);

/// agreeing > agreement_fraction * base (strict).
bool agreement_reached(int agreeing, int base, double agreement_fraction);

struct ValidationOptions {
  int k = 5;
  double qthreshold = 0.8;
  double yes_quota = 0.8;
  /// Providers whose probe verdicts are at least this fraction indeterminate
  /// are flagged non-validatable.
  double non_validatable_fraction = 0.5;
};

struct SelfValidationQuestion {
  std::string question_id;
  QuestionKind kind = QuestionKind::kInformational;
  std::string original_response;
  std::vector<YesNoVerdict> verdicts;
  int yes_count = 0;
  int indeterminate_count = 0;
  bool passed = false;

  bool operator==(const SelfValidationQuestion&) const = default;
};

struct SelfValidationReport {
  std::string provider_id;
  ValidationOptions options;
  std::vector<SelfValidationQuestion> questions;
  int passed_questions = 0;
  double passed_fraction = 0.0;
  double indeterminate_fraction = 0.0;
  bool non_validatable = false;
  bool passed = false;
};

/// Throws on gateway errors or k < 1.
SelfValidationReport self_validate(Gateway& gateway, const std::string& provider_id,
                                   const Benchmark& benchmark,
                                   const ValidationOptions& options);

struct CrossValidationOptions {
  ValidationOptions validation;
  double agreement_fraction = 0.66;
  PoolConvention pool = PoolConvention::kVoting;
  /// Validators to leave out regardless of their answers.
  std::vector<std::string> excluded_validators;
};

struct ValidatorVote {
  std::string validator_id;
  int yes_count = 0;
  int indeterminate_count = 0;
  bool agrees = false;

  bool operator==(const ValidatorVote&) const = default;
};

struct CrossValidationQuestion {
  std::string question_id;
  QuestionKind kind = QuestionKind::kInformational;
  std::string original_response;
  std::vector<ValidatorVote> votes;  // only validators in the pool
  int agreeing_validator_count = 0;
  int quota_base = 0;
  bool passed = false;

  bool operator==(const CrossValidationQuestion&) const = default;
};

struct CrossValidatedProvider {
  std::string provider_id;
  std::vector<CrossValidationQuestion> questions;
  int passed_questions = 0;
  double passed_fraction = 0.0;
  bool cross_validated = false;
};

struct ExcludedValidator {
  std::string provider_id;
  std::string reason;
  double indeterminate_fraction = 0.0;
};

struct CrossValidationReport {
  CrossValidationOptions options;
  /// One entry per input provider, in input order.
  std::vector<CrossValidatedProvider> providers;
  std::vector<ExcludedValidator> excluded;

  std::vector<bool> cv_flags() const;
};

/// Throws kInvalidArgument for fewer than two providers or k < 1, and
/// propagates gateway errors.
CrossValidationReport cross_validate(Gateway& gateway,
                                     const std::vector<std::string>& provider_ids,
                                     const Benchmark& benchmark,
                                     const CrossValidationOptions& options);

}  // namespace llmaudit
