#include <doctest.h>

#include <set>

#include "llmaudit/benchmark.hpp"
#include "llmaudit/error.hpp"
#include "support.hpp"

using namespace llmaudit;

namespace {

ErrorCode code_of(const std::string& doc) {
  try {
    parse_benchmark(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::string message_of(const std::string& doc) {
  try {
    parse_benchmark(doc);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("default corpus has 33 informational and 7 situational questions") {
  const Benchmark b = load_benchmark(testing::default_benchmark());
  CHECK(b.questions.size() == 40);
  CHECK(filter_by_kind(b, QuestionKind::kInformational).questions.size() == 33);
  CHECK(filter_by_kind(b, QuestionKind::kSituational).questions.size() == 7);
  std::set<std::string> ids;
  for (const auto& q : b.questions) {
    CHECK_FALSE(q.text.empty());
    ids.insert(q.id);
  }
  CHECK(ids.size() == 40);
}

TEST_CASE("serialize and parse round trip") {
  const Benchmark b = load_benchmark(testing::default_benchmark());
  CHECK(parse_benchmark(serialize_benchmark(b)) == b);
}

TEST_CASE("filter keeps order") {
  const Benchmark b = load_benchmark(testing::fixture("bench_small.json"));
  const auto s = filter_by_kind(b, QuestionKind::kSituational);
  REQUIRE(s.questions.size() == 2);
  CHECK(s.questions[0].id == "Q4");
  CHECK(s.questions[1].id == "Q5");
  CHECK(s.name == b.name);
}

TEST_CASE("malformed benchmarks are rejected with the offending question") {
  const std::string head = R"({"format_version":1,"name":"t","questions":[)";
  CHECK(code_of("not json") == ErrorCode::kParse);
  CHECK(code_of(R"({"format_version":2,"name":"t","questions":[]})") == ErrorCode::kParse);
  CHECK(code_of(R"({"format_version":1,"name":"t"})") == ErrorCode::kParse);

  const auto dup = head + R"({"id":"A","kind":"informational","text":"x"},
                             {"id":"A","kind":"informational","text":"y"}]})";
  CHECK(message_of(dup).find("duplicate") != std::string::npos);
  CHECK(message_of(dup).find("1") != std::string::npos);

  const auto kind = head + R"({"id":"A","kind":"trivia","text":"x"}]})";
  CHECK(message_of(kind).find("trivia") != std::string::npos);

  const auto empty = head + R"({"id":"A","kind":"situational","text":""}]})";
  CHECK_FALSE(message_of(empty).empty());
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load_benchmark("/nonexistent/bench.json"), Error);
}
