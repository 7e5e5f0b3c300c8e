#include <doctest.h>

#include <thread>

#include "llmaudit/cache.hpp"
#include "llmaudit/error.hpp"
#include "support.hpp"

using namespace llmaudit;

namespace {

ResponseRecord make_record(const std::string& provider, const std::string& prompt, int rep,
                           const std::string& response = "answer") {
  return {provider, "Q1", prompt, sha256_hex(prompt), rep, response,
          "2026-01-01T00:00:00.000Z", "session-test"};
}

}  // namespace

TEST_CASE("sha256 of known inputs") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("records survive a flush and reload") {
  testing::TempDir dir;
  const auto path = dir / "cache.jsonl";
  {
    ResponseCache cache(path);
    cache.append(make_record("a", "prompt one", 1, "first\nline two"));
    cache.append(make_record("a", "prompt one", 2, "second"));
    cache.append(make_record("b", "prompt \xE2\x9C\x93", 1, "third"));
    CHECK(cache.pending() == 3);
    cache.flush();
    CHECK(cache.pending() == 0);
  }
  ResponseCache reloaded(path);
  CHECK(reloaded.load_errors().empty());
  REQUIRE(reloaded.size() == 3);
  const auto hit = reloaded.find({"a", sha256_hex("prompt one"), 1});
  REQUIRE(hit);
  CHECK(hit->response_text == "first\nline two");
  CHECK_FALSE(reloaded.find({"a", sha256_hex("prompt one"), 3}));
  CHECK(reloaded.records()[2] == make_record("b", "prompt \xE2\x9C\x93", 1, "third"));

  const auto text = testing::read_file(path);
  CHECK(text.rfind(R"({"format":"llmaudit-response-cache","format_version":1})", 0) == 0);
  CHECK(text.back() == '\n');
}

TEST_CASE("json line round trip") {
  const auto r = make_record("p", "quote \" and \\ backslash", 4, "tab\tend");
  CHECK(record_from_json_line(record_to_json_line(r)) == r);
  CHECK_THROWS_AS(record_from_json_line("{"), Error);
}

TEST_CASE("corrupt lines are reported and the rest stays readable") {
  testing::TempDir dir;
  const auto path = dir / "cache.jsonl";
  {
    ResponseCache cache(path);
    cache.append(make_record("a", "p1", 1));
    cache.append(make_record("a", "p2", 1));
    cache.flush();
  }
  auto text = testing::read_file(path);
  // Corrupt the middle of the journal and leave a truncated tail.
  const auto first_nl = text.find('\n');
  text.insert(first_nl + 1, "{this is not json}\n");
  text += R"({"provider_id":"a","question_id":"Q1","prom)";
  testing::write_text(path, text);

  ResponseCache cache(path);
  CHECK(cache.size() == 2);
  REQUIRE(cache.load_errors().size() == 2);
  CHECK(cache.load_errors()[0].line == 2);
  CHECK(cache.load_errors()[1].line == 5);

  // Appends after a truncated tail land on their own line.
  cache.append(make_record("a", "p3", 1));
  cache.flush();
  ResponseCache again(path);
  CHECK(again.size() == 3);
  CHECK(again.find({"a", sha256_hex("p3"), 1}));
}

TEST_CASE("hash mismatch is a line error") {
  testing::TempDir dir;
  const auto path = dir / "cache.jsonl";
  auto bad = make_record("a", "p1", 1);
  bad.prompt_hash = sha256_hex("something else");
  testing::write_text(path, std::string(R"({"format":"llmaudit-response-cache","format_version":1})") +
                                "\n" + record_to_json_line(bad) + "\n");
  ResponseCache cache(path);
  CHECK(cache.size() == 0);
  CHECK(cache.load_errors().size() == 1);
}

TEST_CASE("duplicate keys") {
  testing::TempDir dir;
  ResponseCache cache(dir / "c.jsonl");
  cache.append(make_record("a", "p", 1));
  CHECK_THROWS_AS(cache.append(make_record("a", "p", 1, "other")), Error);
}

TEST_CASE("files without the header are refused") {
  testing::TempDir dir;
  const auto path = dir / "c.jsonl";
  testing::write_text(path, record_to_json_line(make_record("a", "p", 1)) + "\n");
  try {
    ResponseCache cache(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
  }
}

TEST_CASE("an empty cache writes nothing") {
  testing::TempDir dir;
  const auto path = dir / "c.jsonl";
  { ResponseCache cache(path); }
  CHECK_FALSE(std::filesystem::exists(path));
}

TEST_CASE("concurrent appends") {
  testing::TempDir dir;
  const auto path = dir / "c.jsonl";
  {
    ResponseCache cache(path);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 1; i <= 50; ++i) {
          cache.append(make_record("p" + std::to_string(t), "prompt", i));
          if (i % 10 == 0) cache.flush();
        }
      });
    }
    for (auto& th : threads) th.join();
  }
  ResponseCache reloaded(path);
  CHECK(reloaded.size() == 400);
  CHECK(reloaded.load_errors().empty());
}
