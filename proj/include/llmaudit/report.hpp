#pragma once

// Report documents and the table/chart aggregations built from them.
//
// Structured reports are JSON objects with sorted keys, a "format_version"
// and a "report" kind. Pair-level similarity scores are kept at full
// precision so a report can be re-evaluated under any threshold profile;
// aggregated table scores are presented with 2 decimals.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmaudit/benchmark.hpp"
#include "llmaudit/consistency.hpp"
#include "llmaudit/gateway.hpp"
#include "llmaudit/similarity.hpp"
#include "llmaudit/validation.hpp"

namespace llmaudit {

using Json = nlohmann::json;

inline constexpr int kReportFormatVersion = 1;

double round2(double value);

struct RunManifest {
  std::string started_at;
  std::string finished_at;
  std::vector<ProviderSpec> providers;
  std::string benchmark;
  int k = 0;
  Mode mode = Mode::kReplay;
};

Json to_json(const RunManifest& manifest);

Json to_json(const ThresholdProfile& profile);
ThresholdProfile profile_from_json(const Json& doc);
Json to_json(const ModelConsistencyVerdict& verdict);
ModelConsistencyVerdict consistency_verdict_from_json(const Json& doc);

Json to_json(const SelfValidationReport& report);
Json to_json(const CrossValidationReport& report);

// Average similarity tables.

struct AverageScoreRow {
  std::string provider_id;
  SimilarityVector mean;  // full precision
  std::size_t pair_count = 0;
};

/// Per-provider means over every pair vector of the selected questions,
/// pooled across questions. Providers with no pairs are omitted and named in
/// `warnings`.
std::vector<AverageScoreRow> average_scores(
    const std::vector<ModelConsistencyVerdict>& verdicts,
    std::optional<QuestionKind> kind, std::vector<std::string>* warnings = nullptr);

struct ScoreDifferenceRow {
  std::string provider_id;
  SimilarityVector difference;  // first minus second, signed
};

/// Row-wise difference for providers present in both tables, in the order of
/// `info_rows`. Providers missing from either side are named in `warnings`.
std::vector<ScoreDifferenceRow> score_difference(
    const std::vector<AverageScoreRow>& info_rows,
    const std::vector<AverageScoreRow>& situation_rows,
    std::vector<std::string>* warnings = nullptr);

// Pass-rate chart data.

struct PassRateSeries {
  std::string provider_id;
  std::string profile;
  /// Fraction of questions passing under per_metric with m = 1, 2, 3, 4.
  std::array<double, 4> fractions{};

  bool operator==(const PassRateSeries&) const = default;
};

/// Takes verdicts computed at m = 1..4 (in that order) over the same
/// responses and profile. Throws kInvalidArgument if they do not match and
/// kInternal if the series increases.
PassRateSeries pass_rate_series(const std::array<ModelConsistencyVerdict, 4>& by_m);

/// Re-evaluates a verdict's pairs at m = 1..4 under `profile`, restricted to
/// questions of `kind` when given. Nullopt when no question is selected.
std::optional<PassRateSeries> pass_rate_series_for(const ModelConsistencyVerdict& verdict,
                                                   const ThresholdProfile& profile,
                                                   std::optional<QuestionKind> kind);

Json to_json(const AverageScoreRow& row);
Json to_json(const ScoreDifferenceRow& row);
Json to_json(const PassRateSeries& series);

/// Builds the tables document from consistency, self-validation and
/// cross-validation report documents, in any combination.
Json build_tables_report(const std::vector<Json>& inputs,
                         std::vector<std::string>* warnings = nullptr);

// Emission.

enum class ReportFormat { kJson, kCsv };

/// A flat table with preformatted cells.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_fixed(double value, int decimals);

/// Sorted keys, two-space indent, trailing newline.
std::string render_json(const Json& doc);
/// "# llmaudit table=<name> format_version=1", a header row, then rows.
std::string render_csv(const Table& table);

void write_file(const std::filesystem::path& path, const std::string& contents);
void emit_report(const Json& doc, const std::filesystem::path& path);
void emit_table(const Table& table, const std::filesystem::path& path);

/// Tabular views of the structured documents.
std::vector<Table> tables_for(const Json& doc);

}  // namespace llmaudit
