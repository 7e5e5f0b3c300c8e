#include "llmaudit/runner.hpp"

#include <exception>
#include <set>
#include <thread>

#include "llmaudit/error.hpp"

namespace llmaudit {

namespace {

const std::set<std::string> kKnownFields = {
    "k",          "profile",    "thresholds",         "pair_quota",
    "question_quota", "rule",   "m",                  "qthreshold",
    "yes_quota",  "non_validatable_fraction", "agreement_fraction", "pool",
    "kind",       "providers",  "exclude_validators"};

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "config field \"" + field + "\": " + what);
}

double fraction_field(const Json& doc, const std::string& field, double fallback) {
  if (!doc.contains(field)) return fallback;
  const Json& v = doc[field];
  if (!v.is_number()) bad_field(field, "expected a number");
  const double x = v.get<double>();
  if (!(x > 0.0 && x <= 1.0)) bad_field(field, "must be in (0, 1], got " + v.dump());
  return x;
}

std::string string_field(const Json& doc, const std::string& field) {
  const Json& v = doc[field];
  if (!v.is_string()) bad_field(field, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& doc, const std::string& field) {
  std::vector<std::string> out;
  if (!doc.contains(field)) return out;
  const Json& v = doc[field];
  if (!v.is_array()) bad_field(field, "expected an array of strings");
  for (const auto& item : v) {
    if (!item.is_string()) bad_field(field, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<std::string> selected_providers(const Gateway& gateway, const RunOptions& options) {
  if (options.providers.empty()) {
    std::vector<std::string> ids;
    for (const auto& spec : gateway.providers()) ids.push_back(spec.provider_id);
    return ids;
  }
  for (const auto& id : options.providers) {
    if (!gateway.has_provider(id)) bad_field("providers", "unknown provider " + id);
  }
  return options.providers;
}

Benchmark selected_questions(const Benchmark& benchmark, const RunOptions& options) {
  Benchmark out = options.kind ? filter_by_kind(benchmark, *options.kind) : benchmark;
  if (out.questions.empty()) {
    fail(ErrorCode::kInvalidArgument, "no benchmark questions selected");
  }
  return out;
}

Json base_document(const char* kind, Gateway& gateway, const Benchmark& benchmark,
                   const RunOptions& options, const std::vector<std::string>& ids) {
  // Timestamps come from the records served, so a replay reproduces the
  // manifest of the recording it reads.
  const CollectionWindow window = gateway.window();
  RunManifest manifest{window.first, window.last, {}, benchmark.name, options.k, gateway.mode()};
  for (const auto& id : ids) manifest.providers.push_back(gateway.provider(id));
  return {{"format_version", kReportFormatVersion},
          {"report", kind},
          {"manifest", to_json(manifest)},
          {"config", to_json(options)},
          {"error", nullptr}};
}

void record_failure(CommandResult& result, const RunFailure& failure) {
  result.failure = failure;
  result.all_passed = false;
  result.report["error"] = {{"code", static_cast<int>(failure.code)},
                            {"message", failure.message}};
}

template <typename Fn>
std::vector<std::exception_ptr> run_each(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  return errors;
}

RunFailure failure_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    return {err.code(), err.what()};
  } catch (const std::exception& err) {
    return {ErrorCode::kInternal, err.what()};
  }
}

}  // namespace

RunOptions parse_run_options(const Json& doc) {
  RunOptions o;
  if (doc.is_null()) return o;
  if (!doc.is_object()) fail(ErrorCode::kInvalidArgument, "run options must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownFields.contains(key)) bad_field(key, "unknown field");
  }

  if (doc.contains("k")) {
    if (!doc["k"].is_number_integer()) bad_field("k", "expected an integer");
    o.k = doc["k"].get<int>();
    if (o.k < 1) bad_field("k", "must be >= 1, got " + std::to_string(o.k));
  }
  o.validation.k = o.k;

  if (doc.contains("profile")) {
    const std::string name = string_field(doc, "profile");
    auto profile = named_profile(name);
    if (!profile) bad_field("profile", "expected low, medium or high, got \"" + name + "\"");
    o.profile = *profile;
  }
  if (doc.contains("thresholds")) {
    const Json& t = doc["thresholds"];
    if (!t.is_object()) bad_field("thresholds", "expected an object");
    for (const auto& [key, value] : t.items()) {
      double* slot = key == "sequence"      ? &o.profile.sequence_min
                     : key == "levenshtein" ? &o.profile.levenshtein_min
                     : key == "jaccard"     ? &o.profile.jaccard_min
                     : key == "cosine"      ? &o.profile.cosine_min
                                            : nullptr;
      if (!slot) bad_field("thresholds." + key, "unknown metric");
      if (!value.is_number()) bad_field("thresholds." + key, "expected a number");
      const double x = value.get<double>();
      if (!(x >= 0.0 && x <= 100.0)) bad_field("thresholds." + key, "must be in [0, 100]");
      *slot = x;
    }
    o.profile.name = "custom";
  }
  o.profile.pair_quota = fraction_field(doc, "pair_quota", o.profile.pair_quota);
  o.profile.question_quota = fraction_field(doc, "question_quota", o.profile.question_quota);

  if (doc.contains("rule")) {
    const std::string text = string_field(doc, "rule");
    auto semantics = parse_semantics(text);
    if (!semantics) bad_field("rule", "expected per_metric or per_pair, got \"" + text + "\"");
    o.rule.semantics = *semantics;
  }
  if (doc.contains("m")) {
    if (!doc["m"].is_number_integer()) bad_field("m", "expected an integer");
    o.rule.m = doc["m"].get<int>();
    if (o.rule.m < 1 || o.rule.m > 4) bad_field("m", "must be in 1..4");
  }

  o.validation.qthreshold = fraction_field(doc, "qthreshold", o.validation.qthreshold);
  o.validation.yes_quota = fraction_field(doc, "yes_quota", o.validation.yes_quota);
  o.validation.non_validatable_fraction =
      fraction_field(doc, "non_validatable_fraction", o.validation.non_validatable_fraction);
  o.agreement_fraction = fraction_field(doc, "agreement_fraction", o.agreement_fraction);
  if (doc.contains("pool")) {
    const std::string text = string_field(doc, "pool");
    auto pool = parse_pool_convention(text);
    if (!pool) bad_field("pool", "expected voting or all_models, got \"" + text + "\"");
    o.pool = *pool;
  }
  if (doc.contains("kind")) {
    const std::string text = string_field(doc, "kind");
    if (text != "all") {
      auto kind = parse_question_kind(text);
      if (!kind) bad_field("kind", "expected informational, situational or all");
      o.kind = *kind;
    }
  }
  o.providers = string_list(doc, "providers");
  o.exclude_validators = string_list(doc, "exclude_validators");
  return o;
}

Json to_json(const RunOptions& o) {
  return {{"k", o.k},
          {"profile", to_json(o.profile)},
          {"rule", {{"semantics", to_string(o.rule.semantics)}, {"m", o.rule.m}}},
          {"qthreshold", o.validation.qthreshold},
          {"yes_quota", o.validation.yes_quota},
          {"non_validatable_fraction", o.validation.non_validatable_fraction},
          {"agreement_fraction", o.agreement_fraction},
          {"pool", to_string(o.pool)},
          {"kind", o.kind ? std::string(to_string(*o.kind)) : "all"},
          {"providers", o.providers},
          {"exclude_validators", o.exclude_validators}};
}

CommandResult run_consistency_command(Gateway& gateway, const Benchmark& benchmark,
                                      const RunOptions& options) {
  if (options.k < 2) bad_field("k", "must be >= 2 for consistency, got " + std::to_string(options.k));
  const auto ids = selected_providers(gateway, options);
  const Benchmark questions = selected_questions(benchmark, options);

  std::vector<ConsistencyRun> runs(ids.size());
  const auto errors = run_each(ids.size(), [&](std::size_t i) {
    runs[i] = collect_consistency(gateway, ids[i], questions, options.k);
  });

  CommandResult result;
  result.report = base_document("consistency", gateway, questions, options, ids);
  result.all_passed = true;
  Json providers = Json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (errors[i]) {
      if (!result.failure) record_failure(result, failure_of(errors[i]));
      continue;
    }
    const ConsistencyRun& run = runs[i];
    if (run.failure && !result.failure) record_failure(result, *run.failure);
    if (run.questions.empty()) {
      result.all_passed = false;
      continue;
    }
    ModelConsistencyVerdict verdict = evaluate_run(run, options.profile, options.rule);
    Json entry = to_json(verdict);
    entry["pass_rate_series"] = to_json(*pass_rate_series_for(verdict, options.profile, std::nullopt));
    providers.push_back(std::move(entry));
    if (!verdict.passed) result.all_passed = false;
  }
  if (result.failure) result.all_passed = false;
  result.report["providers"] = std::move(providers);
  return result;
}

CommandResult run_self_validation_command(Gateway& gateway, const Benchmark& benchmark,
                                          const RunOptions& options) {
  const auto ids = selected_providers(gateway, options);
  const Benchmark questions = selected_questions(benchmark, options);
  ValidationOptions vo = options.validation;
  vo.k = options.k;

  std::vector<std::optional<SelfValidationReport>> reports(ids.size());
  const auto errors = run_each(ids.size(), [&](std::size_t i) {
    reports[i] = self_validate(gateway, ids[i], questions, vo);
  });

  CommandResult result;
  result.report = base_document("self_validation", gateway, questions, options, ids);
  result.all_passed = true;
  Json providers = Json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (errors[i]) {
      if (!result.failure) record_failure(result, failure_of(errors[i]));
      continue;
    }
    providers.push_back(to_json(*reports[i]));
    if (!reports[i]->passed) result.all_passed = false;
  }
  if (result.failure) result.all_passed = false;
  result.report["providers"] = std::move(providers);
  return result;
}

CommandResult run_cross_validation_command(Gateway& gateway, const Benchmark& benchmark,
                                           const RunOptions& options) {
  const auto ids = selected_providers(gateway, options);
  if (ids.size() < 2) {
    bad_field("providers", "cross-validation needs at least 2 providers, got " +
                               std::to_string(ids.size()));
  }
  const Benchmark questions = selected_questions(benchmark, options);
  CrossValidationOptions co;
  co.validation = options.validation;
  co.validation.k = options.k;
  co.agreement_fraction = options.agreement_fraction;
  co.pool = options.pool;
  co.excluded_validators = options.exclude_validators;

  CommandResult result;
  try {
    CrossValidationReport report = cross_validate(gateway, ids, questions, co);
    result.report = base_document("cross_validation", gateway, questions, options, ids);
    result.report["cross_validation"] = to_json(report);
    const auto flags = report.cv_flags();
    result.all_passed = std::all_of(flags.begin(), flags.end(), [](bool f) { return f; });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw;
    result.report = base_document("cross_validation", gateway, questions, options, ids);
    result.report["cross_validation"] = nullptr;
    record_failure(result, {e.code(), e.what()});
  }
  return result;
}

}  // namespace llmaudit
