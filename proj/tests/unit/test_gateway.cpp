#include <doctest.h>

#include <atomic>
#include <thread>

#include "llmaudit/error.hpp"
#include "llmaudit/gateway.hpp"
#include "support.hpp"

using namespace llmaudit;
using namespace std::chrono_literals;

namespace {

ProviderSpec mock_spec(const std::string& id, MockSpec mock) {
  ProviderSpec s;
  s.provider_id = id;
  s.dialect = Dialect::kMock;
  s.mock = std::move(mock);
  s.retry.base_delay = 1ms;
  s.retry.max_delay = 4ms;
  return s;
}

ErrorCode error_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::kInternal;
}

// Fails with a chosen error the first `failures` times, then answers.
class Flaky final : public Provider {
 public:
  Flaky(int failures, ErrorCode code) : failures_(failures), code_(code) {}
  std::string complete(const std::string&, int) override {
    if (calls_++ < failures_) fail(code_, "injected");
    return "recovered";
  }
  int calls() const { return calls_; }

 private:
  int failures_;
  ErrorCode code_;
  std::atomic<int> calls_{0};
};

class Slow final : public Provider {
 public:
  std::string complete(const std::string& prompt, int) override {
    std::this_thread::sleep_for(60ms);
    return prompt;
  }
};

}  // namespace

TEST_CASE("record then replay serves identical records without backends") {
  testing::TempDir dir;
  const auto cache = dir / "cache.jsonl";
  const std::vector<ProviderSpec> specs = {
      mock_spec("cyc", {MockKind::kCycling, {"one", "two"}, {}, {}})};

  std::vector<ResponseRecord> recorded;
  {
    Gateway gw(specs, {Mode::kLiveRecord, cache, "s1"});
    recorded = gw.query_repeated("cyc", "Q1", "prompt", 3);
    CHECK(recorded[1].response_text == "two");
    CHECK(recorded[2].response_text == "one");
    CHECK(recorded[0].session_id == "s1");
    CHECK(gw.backend_calls() == 3);
    gw.flush();
  }
  int constructed = 0;
  Gateway replay(specs, {Mode::kReplay, cache, "s2"}, [&](const ProviderSpec& s) {
    ++constructed;
    return make_provider(s);
  });
  CHECK(replay.query_repeated("cyc", "Q1", "prompt", 3) == recorded);
  CHECK(constructed == 0);
  CHECK(replay.backend("cyc") == nullptr);
  CHECK(replay.backend_calls() == 0);
  CHECK(replay.window().first == recorded.front().timestamp);
}

TEST_CASE("replay misses are explicit errors") {
  testing::TempDir dir;
  const auto cache = dir / "cache.jsonl";
  const std::vector<ProviderSpec> specs = {mock_spec("m", {MockKind::kEcho, {}, {}, {}})};
  {
    Gateway gw(specs, {Mode::kLiveRecord, cache, ""});
    gw.query("m", "Q1", "known", 1);
  }
  Gateway replay(specs, {Mode::kReplay, cache, ""});
  std::string message;
  CHECK(error_of([&] { replay.query("m", "Q1", "unknown", 1); }, &message) == ErrorCode::kCacheMiss);
  CHECK(message.find("provider=m") != std::string::npos);
  CHECK(message.find(sha256_hex("unknown")) != std::string::npos);
  CHECK(message.find("repetition=1") != std::string::npos);
  CHECK(error_of([&] { replay.query("m", "Q1", "known", 2); }) == ErrorCode::kCacheMiss);

  CHECK(error_of([&] { Gateway(specs, {Mode::kReplay, dir / "absent.jsonl", ""}); }) ==
        ErrorCode::kCacheMiss);
  CHECK_FALSE(std::filesystem::exists(dir / "absent.jsonl"));
}

TEST_CASE("replay never writes to the cache") {
  testing::TempDir dir;
  const auto cache = dir / "cache.jsonl";
  const std::vector<ProviderSpec> specs = {mock_spec("m", {MockKind::kEcho, {}, {}, {}})};
  {
    Gateway gw(specs, {Mode::kLiveRecord, cache, ""});
    gw.query("m", "Q1", "known", 1);
  }
  const auto before = testing::read_file(cache);
  {
    Gateway replay(specs, {Mode::kReplay, cache, ""});
    replay.query("m", "Q1", "known", 1);
    replay.flush();
  }
  CHECK(testing::read_file(cache) == before);
}

TEST_CASE("recording resumes from an existing cache") {
  testing::TempDir dir;
  const auto cache = dir / "cache.jsonl";
  const std::vector<ProviderSpec> specs = {mock_spec("m", {MockKind::kEcho, {}, {}, {}})};
  {
    Gateway gw(specs, {Mode::kLiveRecord, cache, ""});
    gw.query_repeated("m", "Q1", "p", 2);
  }
  Gateway gw(specs, {Mode::kLiveRecord, cache, ""});
  gw.query_repeated("m", "Q1", "p", 4);
  CHECK(gw.backend_calls() == 2);
  gw.flush();
  CHECK(ResponseCache(cache).size() == 4);
}

TEST_CASE("network failures are retried, others are not") {
  testing::TempDir dir;
  const std::vector<ProviderSpec> specs = {mock_spec("f", {MockKind::kEcho, {}, {}, {}})};

  SUBCASE("transient failure recovers") {
    Flaky* flaky = nullptr;
    Gateway gw(specs, {Mode::kLiveRecord, dir / "c.jsonl", ""}, [&](const ProviderSpec&) {
      auto p = std::make_unique<Flaky>(2, ErrorCode::kNetwork);
      flaky = p.get();
      return p;
    });
    CHECK(gw.query("f", "Q", "p", 1).response_text == "recovered");
    CHECK(flaky->calls() == 3);
  }
  SUBCASE("persistent failure gives up after max attempts") {
    Gateway gw(specs, {Mode::kLiveRecord, dir / "c.jsonl", ""}, [](const ProviderSpec&) {
      return std::make_unique<Flaky>(100, ErrorCode::kNetwork);
    });
    std::string message;
    CHECK(error_of([&] { gw.query_repeated("f", "Q7", "p", 2); }, &message) == ErrorCode::kNetwork);
    CHECK(gw.backend_calls() == 3);
    CHECK(message.find("repetition 1") != std::string::npos);
    CHECK(message.find("Q7") != std::string::npos);
    CHECK(gw.cache().size() == 0);
  }
  SUBCASE("auth errors fail fast") {
    Gateway gw(specs, {Mode::kLiveRecord, dir / "c.jsonl", ""}, [](const ProviderSpec&) {
      return std::make_unique<Flaky>(100, ErrorCode::kAuth);
    });
    CHECK(error_of([&] { gw.query("f", "Q", "p", 1); }) == ErrorCode::kAuth);
    CHECK(gw.backend_calls() == 1);
  }
  SUBCASE("mock failure at one repetition") {
    const std::vector<ProviderSpec> failing = {
        mock_spec("f", {MockKind::kConstant, {"x"}, {}, {3}})};
    Gateway gw(failing, {Mode::kLiveRecord, dir / "c.jsonl", ""});
    std::string message;
    CHECK(error_of([&] { gw.query_repeated("f", "Q", "p", 5); }, &message) == ErrorCode::kNetwork);
    CHECK(message.find("repetition 3") != std::string::npos);
    CHECK(gw.backend_calls() == 2 + 3);
  }
}

TEST_CASE("rate limiter keeps every window under capacity") {
  auto spec = mock_spec("r", {MockKind::kEcho, {}, {}, {}});
  spec.rate_limit_rps = 100;
  testing::TempDir dir;
  Gateway gw({spec}, {Mode::kLiveRecord, dir / "c.jsonl", ""});
  const auto start = std::chrono::steady_clock::now();
  gw.query_repeated("r", "Q", "p", 150);
  CHECK(std::chrono::steady_clock::now() - start >= 1s);

  const auto log = dynamic_cast<MockProvider*>(gw.backend("r"))->call_log();
  REQUIRE(log.size() == 150);
  for (std::size_t i = 100; i < log.size(); ++i) {
    CHECK(log[i].at - log[i - 100].at >= 1s);
  }
}

TEST_CASE("fractional rates space single requests") {
  RateLimiter limiter(20.0 / 3.0);  // six per 0.9 s
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 7; ++i) limiter.acquire();
  CHECK(std::chrono::steady_clock::now() - start >= 890ms);
}

TEST_CASE("different providers run concurrently") {
  testing::TempDir dir;
  Gateway gw({mock_spec("a", {MockKind::kEcho, {}, {}, {}}),
              mock_spec("b", {MockKind::kEcho, {}, {}, {}})},
             {Mode::kLiveRecord, dir / "c.jsonl", ""},
             [](const ProviderSpec&) { return std::make_unique<Slow>(); });
  const auto start = std::chrono::steady_clock::now();
  std::thread ta([&] { gw.query_repeated("a", "Q", "p", 5); });
  std::thread tb([&] { gw.query_repeated("b", "Q", "p", 5); });
  ta.join();
  tb.join();
  CHECK(std::chrono::steady_clock::now() - start < 550ms);
  CHECK(gw.cache().size() == 10);
}

TEST_CASE("argument checks") {
  testing::TempDir dir;
  Gateway gw({mock_spec("a", {MockKind::kEcho, {}, {}, {}})}, {Mode::kLiveRecord, dir / "c.jsonl", ""});
  CHECK(error_of([&] { gw.query("zzz", "Q", "p", 1); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { gw.query("a", "Q", "p", 0); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { gw.query_repeated("a", "Q", "p", 0); }) == ErrorCode::kInvalidArgument);
  CHECK(parse_mode("record") == Mode::kLiveRecord);
  CHECK(parse_mode("replay") == Mode::kReplay);
  CHECK_FALSE(parse_mode("live"));
}
