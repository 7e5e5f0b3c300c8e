#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmaudit {

enum class QuestionKind { kInformational, kSituational };

std::string_view to_string(QuestionKind kind);
std::optional<QuestionKind> parse_question_kind(std::string_view text);

struct Question {
  std::string id;
  std::string text;
  QuestionKind kind = QuestionKind::kInformational;

  bool operator==(const Question&) const = default;
};

struct Benchmark {
  std::string name;
  std::vector<Question> questions;

  bool operator==(const Benchmark&) const = default;
};

inline constexpr int kBenchmarkFormatVersion = 1;

// Document layout:
//   {"format_version": 1, "name": "...",
//    "questions": [{"id": "I01", "kind": "informational", "text": "..."}]}
Benchmark parse_benchmark(std::string_view document);
Benchmark load_benchmark(const std::filesystem::path& path);
std::string serialize_benchmark(const Benchmark& benchmark);

Benchmark filter_by_kind(const Benchmark& benchmark, QuestionKind kind);

}  // namespace llmaudit
