#include "llmaudit/validation.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <set>
#include <thread>

#include "llmaudit/error.hpp"
#include "llmaudit/gateway.hpp"

namespace llmaudit {

namespace {

constexpr double kQuotaSlack = 1e-9;

void check_options(const ValidationOptions& o) {
  if (o.k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1, got " + std::to_string(o.k));
  auto fraction = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           std::string(name) + " must be in (0, 1], got " + std::to_string(v));
    }
  };
  fraction(o.qthreshold, "qthreshold");
  fraction(o.yes_quota, "yes_quota");
  fraction(o.non_validatable_fraction, "non_validatable_fraction");
}

// One thread per task; these are I/O bound and each talks to its own
// provider. Rethrows the failure of the lowest-indexed task.
template <typename Fn>
void run_per_task(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    threads.emplace_back([&, t] {
      try {
        fn(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct ProbeTally {
  std::vector<YesNoVerdict> verdicts;
  int yes = 0;
  int indeterminate = 0;
};

ProbeTally probe(Gateway& gateway, const std::string& validator_id, const Question& q,
                 const std::string& candidate, int k) {
  // An empty answer cannot be put to a validator; it collects no yes votes.
  if (candidate.empty()) return {};
  const std::string prompt = build_validation_prompt(q.text, candidate);
  ProbeTally tally;
  for (auto& record : gateway.query_repeated(validator_id, q.id, prompt, k)) {
    YesNoVerdict v = parse_yes_no(record.response_text);
    if (v.value == YesNo::kYes) ++tally.yes;
    if (v.value == YesNo::kIndeterminate) ++tally.indeterminate;
    tally.verdicts.push_back(std::move(v));
  }
  return tally;
}

}  // namespace

std::string_view to_string(YesNo value) {
  switch (value) {
    case YesNo::kYes: return "yes";
    case YesNo::kNo: return "no";
    case YesNo::kIndeterminate: break;
  }
  return "indeterminate";
}

std::string build_validation_prompt(std::string_view question, std::string_view response) {
  if (question.empty()) fail(ErrorCode::kInvalidArgument, "validation prompt: empty question");
  if (response.empty()) fail(ErrorCode::kInvalidArgument, "validation prompt: empty response");
  std::string out;
  out.reserve(question.size() + response.size() + kValidationSuffix.size() + 4);
  out.append(question).append("\n\n").append(response).append("\n\n").append(kValidationSuffix);
  return out;
}

YesNoVerdict parse_yes_no(std::string_view raw) {
  std::vector<std::string> words;
  std::string current;
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && (std::isalnum(u) || c == '\'')) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  YesNoVerdict out{YesNo::kIndeterminate, std::string(raw)};
  if (words.empty()) return out;
  if (words.front() == "yes") {
    out.value = YesNo::kYes;
  } else if (words.front() == "no") {
    out.value = YesNo::kNo;
  } else {
    const bool yes = std::find(words.begin(), words.end(), "yes") != words.end();
    const bool no = std::find(words.begin(), words.end(), "no") != words.end();
    if (yes != no) out.value = yes ? YesNo::kYes : YesNo::kNo;
  }
  return out;
}

bool validator_accepts(int yes_count, int k, double yes_quota) {
  return static_cast<double>(yes_count) > yes_quota * k + kQuotaSlack;
}

std::string_view to_string(PoolConvention pool) {
  return pool == PoolConvention::kVoting ? "voting" : "all_models";
}

std::optional<PoolConvention> parse_pool_convention(std::string_view text) {
  if (text == "voting") return PoolConvention::kVoting;
  if (text == "all_models" || text == "strict") return PoolConvention::kAllModels;
  return std::nullopt;
}

int quota_base(PoolConvention pool, int provider_count, int voting_validators) {
  return pool == PoolConvention::kVoting ? voting_validators : provider_count;
}

bool agreement_reached(int agreeing, int base, double agreement_fraction) {
  return static_cast<double>(agreeing) > agreement_fraction * base + kQuotaSlack;
}

SelfValidationReport self_validate(Gateway& gateway, const std::string& provider_id,
                                   const Benchmark& benchmark,
                                   const ValidationOptions& options) {
  check_options(options);
  SelfValidationReport report;
  report.provider_id = provider_id;
  report.options = options;

  int probes = 0;
  int indeterminate = 0;
  for (const auto& q : benchmark.questions) {
    const auto original = gateway.query(provider_id, q.id, q.text, 1);
    ProbeTally tally = probe(gateway, provider_id, q, original.response_text, options.k);
    SelfValidationQuestion sq;
    sq.question_id = q.id;
    sq.kind = q.kind;
    sq.original_response = original.response_text;
    sq.yes_count = tally.yes;
    sq.indeterminate_count = tally.indeterminate;
    sq.verdicts = std::move(tally.verdicts);
    sq.passed = validator_accepts(sq.yes_count, options.k, options.yes_quota);
    probes += static_cast<int>(sq.verdicts.size());
    indeterminate += sq.indeterminate_count;
    if (sq.passed) ++report.passed_questions;
    report.questions.push_back(std::move(sq));
  }
  if (!report.questions.empty()) {
    report.passed_fraction = static_cast<double>(report.passed_questions) /
                             static_cast<double>(report.questions.size());
    if (probes > 0) {
      report.indeterminate_fraction = static_cast<double>(indeterminate) / probes;
      report.non_validatable =
          report.indeterminate_fraction >= options.non_validatable_fraction - kQuotaSlack;
    }
  }
  report.passed = !report.questions.empty() &&
                  report.passed_fraction >= options.qthreshold - kQuotaSlack;
  return report;
}

std::vector<bool> CrossValidationReport::cv_flags() const {
  std::vector<bool> flags;
  for (const auto& p : providers) flags.push_back(p.cross_validated);
  return flags;
}

CrossValidationReport cross_validate(Gateway& gateway,
                                     const std::vector<std::string>& provider_ids,
                                     const Benchmark& benchmark,
                                     const CrossValidationOptions& options) {
  const ValidationOptions& vo = options.validation;
  check_options(vo);
  if (provider_ids.size() < 2) {
    fail(ErrorCode::kInvalidArgument, "cross-validation needs at least 2 providers, got " +
                                          std::to_string(provider_ids.size()));
  }
  if (!(options.agreement_fraction > 0.0 && options.agreement_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "agreement_fraction must be in (0, 1]");
  }
  if (std::set<std::string>(provider_ids.begin(), provider_ids.end()).size() !=
      provider_ids.size()) {
    fail(ErrorCode::kInvalidArgument, "cross-validation provider list has duplicates");
  }
  const std::size_t n = provider_ids.size();
  const std::size_t nq = benchmark.questions.size();

  // Each provider answers every question once.
  std::vector<std::vector<std::string>> originals(n, std::vector<std::string>(nq));
  run_per_task(n, [&](std::size_t i) {
    for (std::size_t q = 0; q < nq; ++q) {
      const auto& question = benchmark.questions[q];
      originals[i][q] = gateway.query(provider_ids[i], question.id, question.text, 1).response_text;
    }
  });

  // tallies[j][i][q]: validator j judging provider i's answer to question q.
  std::vector<std::vector<std::vector<ProbeTally>>> tallies(
      n, std::vector<std::vector<ProbeTally>>(n, std::vector<ProbeTally>(nq)));
  run_per_task(n, [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      for (std::size_t q = 0; q < nq; ++q) {
        tallies[j][i][q] = probe(gateway, provider_ids[j], benchmark.questions[q],
                                 originals[i][q], vo.k);
      }
    }
  });

  CrossValidationReport report;
  report.options = options;

  std::vector<bool> in_pool(n, true);
  for (std::size_t j = 0; j < n; ++j) {
    int probes = 0;
    int indeterminate = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      for (const auto& t : tallies[j][i]) {
        probes += static_cast<int>(t.verdicts.size());
        indeterminate += t.indeterminate;
      }
    }
    const double fraction = probes > 0 ? static_cast<double>(indeterminate) / probes : 0.0;
    const bool listed = std::find(options.excluded_validators.begin(),
                                  options.excluded_validators.end(),
                                  provider_ids[j]) != options.excluded_validators.end();
    if (listed) {
      in_pool[j] = false;
      report.excluded.push_back({provider_ids[j], "excluded by configuration", fraction});
    } else if (probes > 0 && fraction >= vo.non_validatable_fraction - kQuotaSlack) {
      in_pool[j] = false;
      report.excluded.push_back({provider_ids[j], "non-validatable: indeterminate verdicts",
                                 fraction});
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    CrossValidatedProvider p;
    p.provider_id = provider_ids[i];
    for (std::size_t q = 0; q < nq; ++q) {
      CrossValidationQuestion cq;
      cq.question_id = benchmark.questions[q].id;
      cq.kind = benchmark.questions[q].kind;
      cq.original_response = originals[i][q];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !in_pool[j]) continue;
        const auto& t = tallies[j][i][q];
        ValidatorVote vote{provider_ids[j], t.yes, t.indeterminate,
                           validator_accepts(t.yes, vo.k, vo.yes_quota)};
        if (vote.agrees) ++cq.agreeing_validator_count;
        cq.votes.push_back(std::move(vote));
      }
      cq.quota_base = quota_base(options.pool, static_cast<int>(n),
                                 static_cast<int>(cq.votes.size()));
      cq.passed = agreement_reached(cq.agreeing_validator_count, cq.quota_base,
                                    options.agreement_fraction);
      if (cq.passed) ++p.passed_questions;
      p.questions.push_back(std::move(cq));
    }
    if (nq > 0) {
      p.passed_fraction = static_cast<double>(p.passed_questions) / static_cast<double>(nq);
      p.cross_validated = p.passed_fraction >= vo.qthreshold - kQuotaSlack;
    }
    report.providers.push_back(std::move(p));
  }
  return report;
}

}  // namespace llmaudit
