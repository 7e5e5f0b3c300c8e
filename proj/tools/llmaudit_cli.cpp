// llmaudit command-line tool. Exit status: 0 when every audited provider
// passes, 1 when any fails, 2 on configuration or operational errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "llmaudit/llmaudit.h"

namespace {

using json = nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct RunArgs {
  std::string providers;
  std::string benchmark = LLMAUDIT_DEFAULT_BENCHMARK;
  std::string cache;
  std::string mode = "replay";
  std::string out;
  std::string format = "both";
  std::optional<int> k;
  std::optional<std::string> kind;
  std::vector<std::string> only;

  std::optional<std::string> profile;
  std::optional<double> sequence_min, levenshtein_min, jaccard_min, cosine_min;
  std::optional<double> pair_quota, question_quota;
  std::optional<std::string> rule;
  std::optional<int> m;

  std::optional<double> qthreshold, yes_quota, non_validatable_fraction;
  std::optional<double> agreement_fraction;
  std::optional<std::string> pool;
  std::vector<std::string> exclude_validators;
};

template <typename T>
void put(json& doc, const char* key, const std::optional<T>& value) {
  if (value) doc[key] = *value;
}

std::string options_json(const RunArgs& a) {
  json doc = json::object();
  put(doc, "k", a.k);
  put(doc, "kind", a.kind);
  if (!a.only.empty()) doc["providers"] = a.only;
  put(doc, "profile", a.profile);
  json thresholds = json::object();
  put(thresholds, "sequence", a.sequence_min);
  put(thresholds, "levenshtein", a.levenshtein_min);
  put(thresholds, "jaccard", a.jaccard_min);
  put(thresholds, "cosine", a.cosine_min);
  if (!thresholds.empty()) doc["thresholds"] = thresholds;
  put(doc, "pair_quota", a.pair_quota);
  put(doc, "question_quota", a.question_quota);
  put(doc, "rule", a.rule);
  put(doc, "m", a.m);
  put(doc, "qthreshold", a.qthreshold);
  put(doc, "yes_quota", a.yes_quota);
  put(doc, "non_validatable_fraction", a.non_validatable_fraction);
  put(doc, "agreement_fraction", a.agreement_fraction);
  put(doc, "pool", a.pool);
  if (!a.exclude_validators.empty()) doc["exclude_validators"] = a.exclude_validators;
  return doc.dump();
}

int format_flags(const std::string& format) {
  if (format == "json") return LLMAUDIT_FORMAT_JSON;
  if (format == "csv") return LLMAUDIT_FORMAT_CSV;
  return LLMAUDIT_FORMAT_JSON | LLMAUDIT_FORMAT_CSV;
}

int report_error(const char* what) {
  std::cerr << "llmaudit: " << what << ": " << llmaudit_last_error() << "\n";
  return kExitError;
}

struct Freer {
  void operator()(char* s) const { llmaudit_string_free(s); }
  void operator()(llmaudit_benchmark* b) const { llmaudit_benchmark_free(b); }
  void operator()(llmaudit_gateway* g) const { llmaudit_gateway_free(g); }
};

void print_summary(const std::string& command, const json& doc) {
  const json* providers = &doc["providers"];
  if (command == "cross_validation") {
    if (doc["cross_validation"].is_null()) return;
    providers = &doc["cross_validation"]["providers"];
    for (const auto& e : doc["cross_validation"]["excluded_validators"]) {
      std::cout << "excluded validator " << e["provider_id"].get<std::string>() << ": "
                << e["reason"].get<std::string>() << "\n";
    }
  }
  for (const auto& p : *providers) {
    const bool passed = command == "cross_validation" ? p["cross_validated"].get<bool>()
                                                      : p["passed"].get<bool>();
    const double fraction = command == "consistency"
                                ? p["consistent_question_fraction"].get<double>()
                                : p["passed_fraction"].get<double>();
    std::printf("%-24s %s  %d/%d questions (%.2f)%s\n",
                p["provider_id"].get<std::string>().c_str(), passed ? "PASS" : "FAIL",
                p["passed_questions"].get<int>(), p["question_count"].get<int>(), fraction,
                p.value("non_validatable", false) ? "  non-validatable" : "");
  }
}

using RunFn = llmaudit_status (*)(llmaudit_gateway*, const llmaudit_benchmark*, const char*,
                                  char**, int*);

int run(const std::string& command, RunFn fn, const RunArgs& a) {
  llmaudit_benchmark* raw_bench = nullptr;
  if (llmaudit_benchmark_load(a.benchmark.c_str(), &raw_bench) != LLMAUDIT_OK) {
    return report_error("benchmark");
  }
  std::unique_ptr<llmaudit_benchmark, Freer> bench(raw_bench);

  llmaudit_gateway* raw_gw = nullptr;
  if (llmaudit_gateway_open(a.providers.c_str(), a.cache.c_str(), a.mode.c_str(), &raw_gw) !=
      LLMAUDIT_OK) {
    return report_error("gateway");
  }
  std::unique_ptr<llmaudit_gateway, Freer> gateway(raw_gw);

  char* raw_report = nullptr;
  int all_passed = 0;
  const std::string options = options_json(a);
  const llmaudit_status status =
      fn(gateway.get(), bench.get(), options.c_str(), &raw_report, &all_passed);
  std::unique_ptr<char, Freer> report(raw_report);
  const std::string error = status == LLMAUDIT_OK ? "" : llmaudit_last_error();

  if (llmaudit_gateway_flush(gateway.get()) != LLMAUDIT_OK) return report_error("cache");
  if (!report) {
    std::cerr << "llmaudit: " << command << ": " << error << "\n";
    return kExitError;
  }
  if (llmaudit_emit(report.get(), a.out.c_str(), command.c_str(), format_flags(a.format)) !=
      LLMAUDIT_OK) {
    return report_error("write report");
  }
  print_summary(command, json::parse(report.get()));
  if (status != LLMAUDIT_OK) {
    std::cerr << "llmaudit: " << command << ": " << error << "\n";
    return kExitError;
  }
  return all_passed ? kExitPass : kExitFail;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out,
               const std::string& format) {
  std::vector<std::string> docs;
  for (const auto& path : inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "llmaudit: report: cannot read input " << path << "\n";
      return kExitError;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    docs.push_back(ss.str());
  }
  std::vector<const char*> ptrs;
  for (const auto& d : docs) ptrs.push_back(d.c_str());

  char* raw = nullptr;
  if (llmaudit_build_tables(ptrs.data(), ptrs.size(), &raw) != LLMAUDIT_OK) {
    return report_error("report");
  }
  std::unique_ptr<char, Freer> tables(raw);
  if (llmaudit_emit(tables.get(), out.c_str(), "tables", format_flags(format)) != LLMAUDIT_OK) {
    return report_error("write report");
  }
  for (const auto& w : json::parse(tables.get())["warnings"]) {
    std::cerr << "warning: " << w.get<std::string>() << "\n";
  }
  return kExitPass;
}

void add_common(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--providers", a.providers, "Provider configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--benchmark", a.benchmark, "Benchmark file")->capture_default_str();
  cmd->add_option("--cache", a.cache, "Response cache journal")->required();
  cmd->add_option("--mode", a.mode, "record or replay")
      ->check(CLI::IsMember({"record", "live_record", "replay"}))
      ->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--format", a.format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();
  cmd->add_option("-k,--k", a.k, "Repetitions per question (default 5)");
  cmd->add_option("--kind", a.kind, "informational, situational or all");
  cmd->add_option("--only", a.only, "Audit only these provider ids");
}

void add_consistency(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--profile", a.profile, "low, medium or high (default medium)");
  cmd->add_option("--sequence-min", a.sequence_min, "Custom sequence threshold");
  cmd->add_option("--levenshtein-min", a.levenshtein_min, "Custom levenshtein threshold");
  cmd->add_option("--jaccard-min", a.jaccard_min, "Custom jaccard threshold");
  cmd->add_option("--cosine-min", a.cosine_min, "Custom cosine threshold");
  cmd->add_option("--pair-quota", a.pair_quota, "Fraction of pairs a metric needs (default 0.8)");
  cmd->add_option("--question-quota", a.question_quota,
                  "Fraction of questions that must pass (default 0.8)");
  cmd->add_option("--rule", a.rule, "per_metric or per_pair (default per_metric)");
  cmd->add_option("-m,--m", a.m, "Metrics required, 1..4 (default 4)");
}

void add_validation(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--qthreshold", a.qthreshold, "Fraction of questions that must pass (default 0.8)");
  cmd->add_option("--yes-quota", a.yes_quota, "Yes votes needed, as a fraction of k (default 0.8)");
  cmd->add_option("--non-validatable-fraction", a.non_validatable_fraction,
                  "Indeterminate fraction that flags a validator (default 0.5)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistency and validation audits for LLM providers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(llmaudit_version()));

  RunArgs consistency_args, self_args, cross_args;
  auto* consistency = app.add_subcommand("consistency", "Repeated-answer consistency audit");
  add_common(consistency, consistency_args);
  add_consistency(consistency, consistency_args);

  auto* self_validate = app.add_subcommand("self-validate", "Each provider judges its own answers");
  add_common(self_validate, self_args);
  add_validation(self_validate, self_args);

  auto* cross_validate =
      app.add_subcommand("cross-validate", "Providers judge each other's answers");
  add_common(cross_validate, cross_args);
  add_validation(cross_validate, cross_args);
  cross_validate->add_option("--agreement-fraction", cross_args.agreement_fraction,
                             "Validator agreement quota (default 0.66)");
  cross_validate->add_option("--pool", cross_args.pool, "voting or all_models (default voting)");
  cross_validate->add_option("--exclude-validator", cross_args.exclude_validators,
                             "Leave a provider out of the validator pool");

  std::vector<std::string> report_inputs;
  std::string report_out, report_format = "both";
  auto* report = app.add_subcommand("report", "Build tables from report files");
  report->add_option("--input", report_inputs, "Report JSON files");
  report->add_option("--out", report_out, "Output directory")->required();
  report->add_option("--format", report_format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  std::string text_a, text_b;
  auto* similarity = app.add_subcommand("similarity", "Score two texts");
  similarity->add_option("a", text_a)->required();
  similarity->add_option("b", text_b)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  if (consistency->parsed()) {
    return run("consistency", llmaudit_run_consistency, consistency_args);
  }
  if (self_validate->parsed()) {
    return run("self_validation", llmaudit_run_self_validation, self_args);
  }
  if (cross_validate->parsed()) {
    return run("cross_validation", llmaudit_run_cross_validation, cross_args);
  }
  if (report->parsed()) return run_report(report_inputs, report_out, report_format);

  double scores[4];
  if (llmaudit_similarity(text_a.c_str(), text_b.c_str(), scores) != LLMAUDIT_OK) {
    return report_error("similarity");
  }
  std::printf("sequence %.6f\nlevenshtein %.6f\njaccard %.6f\ncosine %.6f\n", scores[0],
              scores[1], scores[2], scores[3]);
  return kExitPass;
}
