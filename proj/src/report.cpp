#include "llmaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "llmaudit/error.hpp"

namespace llmaudit {

namespace {

constexpr std::array<const char*, kMetricCount> kMetricNames = {
    "sequence", "levenshtein", "jaccard", "cosine"};

Json scores_json(const SimilarityVector& v, bool rounded) {
  auto f = [&](double x) { return rounded ? round2(x) : x; };
  return {{"sequence", f(v.sequence)},
          {"levenshtein", f(v.levenshtein)},
          {"jaccard", f(v.jaccard)},
          {"cosine", f(v.cosine)}};
}

// Pooled mean with the summands sorted first, so the result does not depend
// on the order pairs arrive in.
double stable_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

const Json& require(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorCode::kParse, std::string("report: missing field \"") + key + "\"");
  }
  return *it;
}

QuestionKind kind_from_json(const Json& value) {
  auto kind = parse_question_kind(value.get<std::string>());
  if (!kind) fail(ErrorCode::kParse, "report: unknown question kind");
  return *kind;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

const std::array<std::optional<QuestionKind>, 3> kKindSelections = {
    std::optional<QuestionKind>{QuestionKind::kInformational},
    std::optional<QuestionKind>{QuestionKind::kSituational}, std::nullopt};

std::string selection_name(std::optional<QuestionKind> kind) {
  return kind ? std::string(to_string(*kind)) : "all";
}

bool selected(std::optional<QuestionKind> selection, const Json& question) {
  return !selection || kind_from_json(require(question, "kind")) == *selection;
}

}  // namespace

double round2(double value) {
  const double r = std::round(value * 100.0) / 100.0;
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out = buf;
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

Json to_json(const RunManifest& m) {
  Json providers = Json::array();
  for (const auto& p : m.providers) {
    Json sampling = {{"temperature", nullptr}, {"max_tokens", nullptr}};
    if (p.sampling.temperature) sampling["temperature"] = *p.sampling.temperature;
    if (p.sampling.max_tokens) sampling["max_tokens"] = *p.sampling.max_tokens;
    Json entry = {{"id", p.provider_id},
                  {"dialect", to_string(p.dialect)},
                  {"model", p.model_name},
                  {"endpoint", p.endpoint},
                  {"sampling", sampling}};
    if (p.mock) entry["mock_kind"] = to_string(p.mock->kind);
    providers.push_back(std::move(entry));
  }
  return {{"started_at", m.started_at}, {"finished_at", m.finished_at},
          {"providers", providers},     {"benchmark", m.benchmark},
          {"k", m.k},                   {"mode", to_string(m.mode)}};
}

Json to_json(const ThresholdProfile& p) {
  return {{"name", p.name},
          {"sequence_min", p.sequence_min},
          {"levenshtein_min", p.levenshtein_min},
          {"jaccard_min", p.jaccard_min},
          {"cosine_min", p.cosine_min},
          {"pair_quota", p.pair_quota},
          {"question_quota", p.question_quota}};
}

ThresholdProfile profile_from_json(const Json& doc) {
  ThresholdProfile p;
  p.name = require(doc, "name").get<std::string>();
  p.sequence_min = require(doc, "sequence_min").get<double>();
  p.levenshtein_min = require(doc, "levenshtein_min").get<double>();
  p.jaccard_min = require(doc, "jaccard_min").get<double>();
  p.cosine_min = require(doc, "cosine_min").get<double>();
  p.pair_quota = require(doc, "pair_quota").get<double>();
  p.question_quota = require(doc, "question_quota").get<double>();
  return p;
}

Json to_json(const ModelConsistencyVerdict& v) {
  Json questions = Json::array();
  for (const auto& q : v.questions) {
    Json pairs = Json::array();
    for (const auto& p : q.pairs) {
      Json pair = scores_json(p.scores, false);
      pair["i"] = p.i;
      pair["j"] = p.j;
      pairs.push_back(std::move(pair));
    }
    Json counts = Json::object();
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      counts[kMetricNames[m]] = q.per_metric_pass_counts[m];
    }
    questions.push_back({{"id", q.question_id},
                         {"kind", to_string(q.kind)},
                         {"passed", q.passed},
                         {"passing_pair_count", q.passing_pair_count},
                         {"required_pairs", q.required_pairs},
                         {"per_metric_pass_counts", counts},
                         {"pairs", pairs}});
  }
  return {{"provider_id", v.provider_id},
          {"profile", to_json(v.profile)},
          {"rule", {{"semantics", to_string(v.rule.semantics)}, {"m", v.rule.m}}},
          {"k", v.k},
          {"passed", v.passed},
          {"passed_questions", v.passed_questions},
          {"question_count", v.questions.size()},
          {"consistent_question_fraction", v.consistent_question_fraction},
          {"questions", questions}};
}

ModelConsistencyVerdict consistency_verdict_from_json(const Json& doc) {
  try {
    ModelConsistencyVerdict v;
    v.provider_id = require(doc, "provider_id").get<std::string>();
    v.profile = profile_from_json(require(doc, "profile"));
    const Json& rule = require(doc, "rule");
    auto semantics = parse_semantics(require(rule, "semantics").get<std::string>());
    if (!semantics) fail(ErrorCode::kParse, "report: unknown aggregation semantics");
    v.rule = {*semantics, require(rule, "m").get<int>()};
    v.k = require(doc, "k").get<int>();
    v.passed = require(doc, "passed").get<bool>();
    v.passed_questions = require(doc, "passed_questions").get<int>();
    v.consistent_question_fraction = require(doc, "consistent_question_fraction").get<double>();
    for (const auto& q : require(doc, "questions")) {
      QuestionConsistencyVerdict qv;
      qv.question_id = require(q, "id").get<std::string>();
      qv.kind = kind_from_json(require(q, "kind"));
      qv.passed = require(q, "passed").get<bool>();
      qv.passing_pair_count = require(q, "passing_pair_count").get<int>();
      qv.required_pairs = require(q, "required_pairs").get<int>();
      const Json& counts = require(q, "per_metric_pass_counts");
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        qv.per_metric_pass_counts[m] = require(counts, kMetricNames[m]).get<int>();
      }
      for (const auto& p : require(q, "pairs")) {
        qv.pairs.push_back({require(p, "i").get<int>(), require(p, "j").get<int>(),
                            {require(p, "sequence").get<double>(),
                             require(p, "levenshtein").get<double>(),
                             require(p, "jaccard").get<double>(),
                             require(p, "cosine").get<double>()}});
      }
      v.questions.push_back(std::move(qv));
    }
    return v;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, std::string("report: ") + e.what());
  }
}

Json to_json(const SelfValidationReport& r) {
  Json questions = Json::array();
  for (const auto& q : r.questions) {
    Json verdicts = Json::array();
    for (const auto& v : q.verdicts) verdicts.push_back(to_string(v.value));
    questions.push_back({{"id", q.question_id},
                         {"kind", to_string(q.kind)},
                         {"original_response", q.original_response},
                         {"yes_count", q.yes_count},
                         {"indeterminate_count", q.indeterminate_count},
                         {"verdicts", verdicts},
                         {"passed", q.passed}});
  }
  return {{"provider_id", r.provider_id},
          {"k", r.options.k},
          {"qthreshold", r.options.qthreshold},
          {"yes_quota", r.options.yes_quota},
          {"passed", r.passed},
          {"passed_questions", r.passed_questions},
          {"question_count", r.questions.size()},
          {"passed_fraction", r.passed_fraction},
          {"indeterminate_fraction", r.indeterminate_fraction},
          {"non_validatable", r.non_validatable},
          {"questions", questions}};
}

Json to_json(const CrossValidationReport& r) {
  Json providers = Json::array();
  for (const auto& p : r.providers) {
    Json questions = Json::array();
    for (const auto& q : p.questions) {
      Json votes = Json::array();
      for (const auto& v : q.votes) {
        votes.push_back({{"validator_id", v.validator_id},
                         {"yes_count", v.yes_count},
                         {"indeterminate_count", v.indeterminate_count},
                         {"agrees", v.agrees}});
      }
      questions.push_back({{"id", q.question_id},
                           {"kind", to_string(q.kind)},
                           {"original_response", q.original_response},
                           {"agreeing_validator_count", q.agreeing_validator_count},
                           {"quota_base", q.quota_base},
                           {"votes", votes},
                           {"passed", q.passed}});
    }
    providers.push_back({{"provider_id", p.provider_id},
                         {"cross_validated", p.cross_validated},
                         {"passed_questions", p.passed_questions},
                         {"question_count", p.questions.size()},
                         {"passed_fraction", p.passed_fraction},
                         {"questions", questions}});
  }
  Json excluded = Json::array();
  for (const auto& e : r.excluded) {
    excluded.push_back({{"provider_id", e.provider_id},
                        {"reason", e.reason},
                        {"indeterminate_fraction", e.indeterminate_fraction}});
  }
  Json flags = Json::array();
  for (bool f : r.cv_flags()) flags.push_back(f);
  return {{"k", r.options.validation.k},
          {"qthreshold", r.options.validation.qthreshold},
          {"yes_quota", r.options.validation.yes_quota},
          {"agreement_fraction", r.options.agreement_fraction},
          {"pool", to_string(r.options.pool)},
          {"excluded_validators", excluded},
          {"cv_flags", flags},
          {"providers", providers}};
}

std::vector<AverageScoreRow> average_scores(const std::vector<ModelConsistencyVerdict>& verdicts,
                                            std::optional<QuestionKind> kind,
                                            std::vector<std::string>* warnings) {
  std::vector<std::string> order;
  std::map<std::string, std::array<std::vector<double>, kMetricCount>> pooled;
  for (const auto& v : verdicts) {
    if (!pooled.contains(v.provider_id)) order.push_back(v.provider_id);
    auto& values = pooled[v.provider_id];
    for (const auto& q : v.questions) {
      if (kind && q.kind != *kind) continue;
      for (const auto& p : q.pairs) {
        values[0].push_back(p.scores.sequence);
        values[1].push_back(p.scores.levenshtein);
        values[2].push_back(p.scores.jaccard);
        values[3].push_back(p.scores.cosine);
      }
    }
  }
  std::vector<AverageScoreRow> rows;
  for (const auto& id : order) {
    auto& values = pooled[id];
    if (values[0].empty()) {
      if (warnings) {
        warnings->push_back("provider " + id + " has no pairs for " +
                            selection_name(kind) + " questions; omitted");
      }
      continue;
    }
    AverageScoreRow row{id, {}, values[0].size()};
    row.mean.sequence = stable_mean(values[0]);
    row.mean.levenshtein = stable_mean(values[1]);
    row.mean.jaccard = stable_mean(values[2]);
    row.mean.cosine = stable_mean(values[3]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScoreDifferenceRow> score_difference(const std::vector<AverageScoreRow>& info_rows,
                                                 const std::vector<AverageScoreRow>& situation_rows,
                                                 std::vector<std::string>* warnings) {
  std::vector<ScoreDifferenceRow> out;
  for (const auto& a : info_rows) {
    auto it = std::find_if(situation_rows.begin(), situation_rows.end(),
                           [&](const auto& b) { return b.provider_id == a.provider_id; });
    if (it == situation_rows.end()) {
      if (warnings) warnings->push_back("provider " + a.provider_id + " missing from second table; omitted");
      continue;
    }
    out.push_back({a.provider_id,
                   {a.mean.sequence - it->mean.sequence,
                    a.mean.levenshtein - it->mean.levenshtein,
                    a.mean.jaccard - it->mean.jaccard, a.mean.cosine - it->mean.cosine}});
  }
  for (const auto& b : situation_rows) {
    const bool found = std::any_of(info_rows.begin(), info_rows.end(),
                                   [&](const auto& a) { return a.provider_id == b.provider_id; });
    if (!found && warnings) {
      warnings->push_back("provider " + b.provider_id + " missing from first table; omitted");
    }
  }
  return out;
}

PassRateSeries pass_rate_series(const std::array<ModelConsistencyVerdict, 4>& by_m) {
  const auto& base = by_m[0];
  PassRateSeries out{base.provider_id, base.profile.name, {}};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& v = by_m[i];
    if (v.rule.semantics != AggregationSemantics::kPerMetric ||
        v.rule.m != static_cast<int>(i) + 1) {
      fail(ErrorCode::kInvalidArgument, "pass-rate series needs per_metric verdicts for m = 1..4");
    }
    bool same = v.provider_id == base.provider_id && v.profile == base.profile &&
                v.k == base.k && v.questions.size() == base.questions.size();
    for (std::size_t q = 0; same && q < v.questions.size(); ++q) {
      same = v.questions[q].question_id == base.questions[q].question_id &&
             v.questions[q].pairs == base.questions[q].pairs;
    }
    if (!same) {
      fail(ErrorCode::kInvalidArgument,
           "pass-rate series: verdicts for provider " + base.provider_id +
               " do not share responses and profile");
    }
    out.fractions[i] = v.consistent_question_fraction;
    if (i > 0 && out.fractions[i] > out.fractions[i - 1]) {
      fail(ErrorCode::kInternal, "pass-rate series increases in m for provider " + base.provider_id);
    }
  }
  return out;
}

std::optional<PassRateSeries> pass_rate_series_for(const ModelConsistencyVerdict& verdict,
                                                   const ThresholdProfile& profile,
                                                   std::optional<QuestionKind> kind) {
  std::array<ModelConsistencyVerdict, 4> by_m;
  for (int m = 1; m <= 4; ++m) {
    const AggregationRule rule{AggregationSemantics::kPerMetric, m};
    std::vector<QuestionConsistencyVerdict> questions;
    for (const auto& q : verdict.questions) {
      if (kind && q.kind != *kind) continue;
      questions.push_back(evaluate_question(q.question_id, q.kind, q.pairs, profile, rule, verdict.k));
    }
    if (questions.empty()) return std::nullopt;
    by_m[static_cast<std::size_t>(m - 1)] =
        evaluate_model(verdict.provider_id, std::move(questions), profile, rule, verdict.k);
  }
  return pass_rate_series(by_m);
}

Json to_json(const AverageScoreRow& row) {
  Json out = scores_json(row.mean, true);
  out["provider"] = row.provider_id;
  out["pairs"] = row.pair_count;
  return out;
}

Json to_json(const ScoreDifferenceRow& row) {
  Json out = scores_json(row.difference, true);
  out["provider"] = row.provider_id;
  return out;
}

Json to_json(const PassRateSeries& s) {
  return {{"provider", s.provider_id},
          {"profile", s.profile},
          {"fractions", s.fractions}};
}

Json build_tables_report(const std::vector<Json>& inputs, std::vector<std::string>* warnings) {
  std::vector<std::string> notes;
  std::vector<ModelConsistencyVerdict> verdicts;
  Json self_rows = Json::array();
  Json cross_rows = Json::array();
  Json agreement_rows = Json::array();

  for (const auto& doc : inputs) {
    const std::string kind = doc.value("report", "");
    if (kind == "consistency") {
      for (const auto& p : require(doc, "providers")) {
        verdicts.push_back(consistency_verdict_from_json(p));
      }
    } else if (kind == "self_validation") {
      for (const auto& p : require(doc, "providers")) {
        for (auto selection : kKindSelections) {
          int passed = 0, total = 0;
          for (const auto& q : require(p, "questions")) {
            if (!selected(selection, q)) continue;
            ++total;
            if (require(q, "passed").get<bool>()) ++passed;
          }
          if (total == 0) continue;
          self_rows.push_back({{"provider", require(p, "provider_id")},
                               {"kind", selection_name(selection)},
                               {"passed_questions", passed},
                               {"question_count", total},
                               {"fraction", static_cast<double>(passed) / total},
                               {"non_validatable", require(p, "non_validatable")},
                               {"passed", require(p, "passed")}});
        }
      }
    } else if (kind == "cross_validation") {
      const Json& body = require(doc, "cross_validation");
      if (body.is_null()) continue;  // failed run
      for (const auto& p : require(body, "providers")) {
        for (auto selection : kKindSelections) {
          int passed = 0, total = 0;
          std::map<int, int> histogram;
          for (const auto& q : require(p, "questions")) {
            if (!selected(selection, q)) continue;
            ++total;
            if (require(q, "passed").get<bool>()) ++passed;
            ++histogram[require(q, "agreeing_validator_count").get<int>()];
          }
          if (total == 0) continue;
          cross_rows.push_back({{"provider", require(p, "provider_id")},
                                {"kind", selection_name(selection)},
                                {"passed_questions", passed},
                                {"question_count", total},
                                {"fraction", static_cast<double>(passed) / total},
                                {"cross_validated", require(p, "cross_validated")}});
          for (const auto& [agreeing, count] : histogram) {
            agreement_rows.push_back({{"provider", require(p, "provider_id")},
                                      {"kind", selection_name(selection)},
                                      {"agreeing_validators", agreeing},
                                      {"questions", count}});
          }
        }
      }
    } else {
      fail(ErrorCode::kInvalidArgument, "report: unsupported input report kind \"" + kind + "\"");
    }
  }

  Json averages = Json::object();
  std::map<std::string, std::vector<AverageScoreRow>> rows_by_kind;
  for (auto selection : kKindSelections) {
    auto rows = average_scores(verdicts, selection, &notes);
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    averages[selection_name(selection)] = arr;
    rows_by_kind[selection_name(selection)] = std::move(rows);
  }
  Json difference = Json::array();
  for (const auto& r : score_difference(rows_by_kind["informational"],
                                        rows_by_kind["situational"], &notes)) {
    difference.push_back(to_json(r));
  }

  Json pass_rates = Json::array();
  for (const auto& v : verdicts) {
    for (auto selection : kKindSelections) {
      for (const char* name : {"low", "medium", "high"}) {
        ThresholdProfile profile = *named_profile(name);
        profile.pair_quota = v.profile.pair_quota;
        profile.question_quota = v.profile.question_quota;
        auto series = pass_rate_series_for(v, profile, selection);
        if (!series) continue;
        Json entry = to_json(*series);
        entry["kind"] = selection_name(selection);
        pass_rates.push_back(std::move(entry));
      }
    }
  }

  Json doc = {{"format_version", kReportFormatVersion},
              {"report", "tables"},
              {"conventions",
               {{"averages", "arithmetic mean over all pair vectors of the selected questions, "
                             "pooled across questions"},
                {"score_decimals", 2}}},
              {"average_scores", averages},
              {"score_difference", difference},
              {"pass_rates", pass_rates},
              {"self_validation", self_rows},
              {"cross_validation", cross_rows},
              {"cross_validation_agreement", agreement_rows},
              {"warnings", notes}};
  if (warnings) warnings->insert(warnings->end(), notes.begin(), notes.end());
  return doc;
}

std::string render_json(const Json& doc) {
  return doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

std::string render_csv(const Table& table) {
  std::string out = "# llmaudit table=" + table.name +
                    " format_version=" + std::to_string(kReportFormatVersion) + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += csv_escape(cells[i]);
    }
    out.push_back('\n');
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << contents;
  out.flush();
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

void emit_report(const Json& doc, const std::filesystem::path& path) {
  write_file(path, render_json(doc));
}

void emit_table(const Table& table, const std::filesystem::path& path) {
  write_file(path, render_csv(table));
}

namespace {

std::string cell(const Json& v, int decimals = 2) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_fixed(v.get<double>(), decimals);
  if (v.is_null()) return "";
  return v.dump();
}

Table score_table(const std::string& name, const Json& rows) {
  Table t{name, {"provider", "sequence", "levenshtein", "jaccard", "cosine"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({cell(r["provider"]), cell(r["sequence"]), cell(r["levenshtein"]),
                      cell(r["jaccard"]), cell(r["cosine"])});
  }
  return t;
}

}  // namespace

std::vector<Table> tables_for(const Json& doc) {
  const std::string kind = doc.value("report", "");
  std::vector<Table> out;
  if (kind == "tables") {
    const Json& averages = require(doc, "average_scores");
    for (const char* k : {"informational", "situational", "all"}) {
      out.push_back(score_table(std::string("average_scores_") + k, require(averages, k)));
    }
    out.push_back(score_table("score_difference", require(doc, "score_difference")));

    Table rates{"pass_rates", {"provider", "kind", "profile", "m1", "m2", "m3", "m4"}, {}};
    for (const auto& s : require(doc, "pass_rates")) {
      std::vector<std::string> row = {cell(s["provider"]), cell(s["kind"]), cell(s["profile"])};
      for (const auto& f : s["fractions"]) row.push_back(cell(f, 4));
      rates.rows.push_back(std::move(row));
    }
    out.push_back(std::move(rates));

    Table self{"self_validation",
               {"provider", "kind", "passed_questions", "question_count", "fraction",
                "non_validatable", "passed"},
               {}};
    for (const auto& r : require(doc, "self_validation")) {
      self.rows.push_back({cell(r["provider"]), cell(r["kind"]), cell(r["passed_questions"]),
                           cell(r["question_count"]), cell(r["fraction"], 4),
                           cell(r["non_validatable"]), cell(r["passed"])});
    }
    out.push_back(std::move(self));

    Table cross{"cross_validation",
                {"provider", "kind", "passed_questions", "question_count", "fraction",
                 "cross_validated"},
                {}};
    for (const auto& r : require(doc, "cross_validation")) {
      cross.rows.push_back({cell(r["provider"]), cell(r["kind"]), cell(r["passed_questions"]),
                            cell(r["question_count"]), cell(r["fraction"], 4),
                            cell(r["cross_validated"])});
    }
    out.push_back(std::move(cross));

    Table agreement{"cross_validation_agreement",
                    {"provider", "kind", "agreeing_validators", "questions"}, {}};
    for (const auto& r : require(doc, "cross_validation_agreement")) {
      agreement.rows.push_back({cell(r["provider"]), cell(r["kind"]),
                                cell(r["agreeing_validators"]), cell(r["questions"])});
    }
    out.push_back(std::move(agreement));
  } else if (kind == "consistency") {
    Table t{"consistency",
            {"provider", "profile", "semantics", "m", "k", "passed_questions", "question_count",
             "fraction", "passed", "m1", "m2", "m3", "m4"},
            {}};
    for (const auto& p : require(doc, "providers")) {
      std::vector<std::string> row = {
          cell(p["provider_id"]),      cell(p["profile"]["name"]), cell(p["rule"]["semantics"]),
          cell(p["rule"]["m"]),        cell(p["k"]),               cell(p["passed_questions"]),
          cell(p["question_count"]),   cell(p["consistent_question_fraction"], 4),
          cell(p["passed"])};
      for (const auto& f : p["pass_rate_series"]["fractions"]) row.push_back(cell(f, 4));
      t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(t));
  } else if (kind == "self_validation") {
    Table t{"self_validation",
            {"provider", "passed_questions", "question_count", "fraction",
             "indeterminate_fraction", "non_validatable", "passed"},
            {}};
    for (const auto& p : require(doc, "providers")) {
      t.rows.push_back({cell(p["provider_id"]), cell(p["passed_questions"]),
                        cell(p["question_count"]), cell(p["passed_fraction"], 4),
                        cell(p["indeterminate_fraction"], 4), cell(p["non_validatable"]),
                        cell(p["passed"])});
    }
    out.push_back(std::move(t));
  } else if (kind == "cross_validation") {
    Table t{"cross_validation",
            {"provider", "passed_questions", "question_count", "fraction", "cross_validated"},
            {}};
    const Json& body = require(doc, "cross_validation");
    for (const auto& p : body.is_null() ? Json::array() : require(body, "providers")) {
      t.rows.push_back({cell(p["provider_id"]), cell(p["passed_questions"]),
                        cell(p["question_count"]), cell(p["passed_fraction"], 4),
                        cell(p["cross_validated"])});
    }
    out.push_back(std::move(t));
  } else {
    fail(ErrorCode::kInvalidArgument, "no tabular view for report kind \"" + kind + "\"");
  }
  return out;
}

}  // namespace llmaudit
