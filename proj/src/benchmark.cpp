#include "llmaudit/benchmark.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "llmaudit/error.hpp"

namespace llmaudit {

using nlohmann::json;

std::string_view to_string(QuestionKind kind) {
  return kind == QuestionKind::kInformational ? "informational" : "situational";
}

std::optional<QuestionKind> parse_question_kind(std::string_view text) {
  if (text == "informational") return QuestionKind::kInformational;
  if (text == "situational") return QuestionKind::kSituational;
  return std::nullopt;
}

namespace {

[[noreturn]] void question_error(std::size_t index, const std::string& what) {
  fail(ErrorCode::kParse,
       "benchmark question " + std::to_string(index) + ": " + what);
}

std::string require_string(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    question_error(index, std::string("missing or non-string \"") + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

Benchmark parse_benchmark(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("benchmark parse error: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kParse, "benchmark must be an object");

  auto version = doc.find("format_version");
  if (version == doc.end() || !version->is_number_integer()) {
    fail(ErrorCode::kParse, "benchmark: missing integer \"format_version\"");
  }
  if (version->get<int>() != kBenchmarkFormatVersion) {
    fail(ErrorCode::kParse, "benchmark: unsupported format_version " +
                                std::to_string(version->get<int>()));
  }

  Benchmark out;
  auto name = doc.find("name");
  if (name == doc.end() || !name->is_string()) {
    fail(ErrorCode::kParse, "benchmark: missing string \"name\"");
  }
  out.name = name->get<std::string>();

  auto questions = doc.find("questions");
  if (questions == doc.end() || !questions->is_array()) {
    fail(ErrorCode::kParse, "benchmark: missing array \"questions\"");
  }

  std::unordered_set<std::string> seen;
  std::size_t index = 0;
  for (const auto& q : *questions) {
    if (!q.is_object()) question_error(index, "not an object");
    Question question;
    question.id = require_string(q, "id", index);
    const std::string kind = require_string(q, "kind", index);
    question.text = require_string(q, "text", index);
    if (question.id.empty()) question_error(index, "empty id");
    auto parsed = parse_question_kind(kind);
    if (!parsed) question_error(index, "unknown kind \"" + kind + "\"");
    question.kind = *parsed;
    if (question.text.empty()) {
      question_error(index, "empty text for id \"" + question.id + "\"");
    }
    if (!seen.insert(question.id).second) {
      question_error(index, "duplicate id \"" + question.id + "\"");
    }
    out.questions.push_back(std::move(question));
    ++index;
  }
  return out;
}

Benchmark load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open benchmark file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_benchmark(buf.str());
}

std::string serialize_benchmark(const Benchmark& benchmark) {
  json questions = json::array();
  for (const auto& q : benchmark.questions) {
    questions.push_back(
        {{"id", q.id}, {"kind", to_string(q.kind)}, {"text", q.text}});
  }
  json doc = {{"format_version", kBenchmarkFormatVersion},
              {"name", benchmark.name},
              {"questions", std::move(questions)}};
  return doc.dump(2) + "\n";
}

Benchmark filter_by_kind(const Benchmark& benchmark, QuestionKind kind) {
  Benchmark out{benchmark.name, {}};
  for (const auto& q : benchmark.questions) {
    if (q.kind == kind) out.questions.push_back(q);
  }
  return out;
}

}  // namespace llmaudit
