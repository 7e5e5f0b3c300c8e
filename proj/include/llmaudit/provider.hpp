#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmaudit {

/// Wire format spoken by a provider endpoint.
enum class Dialect {
  kOpenAiChat,         // POST {model, messages}; choices[0].message.content
  kAnthropicMessages,  // POST {model, max_tokens, messages}; content[0].text
  kGeminiGenerate,     // POST {contents:[{parts:[{text}]}]}; candidates[0]...
  kCohereChat,         // POST {model, messages}; message.content[0].text
  kMock,               // in-process scripted responses, no network
};

std::string_view to_string(Dialect dialect);
std::optional<Dialect> parse_dialect(std::string_view text);

struct Sampling {
  std::optional<double> temperature;
  std::optional<int> max_tokens;

  bool operator==(const Sampling&) const = default;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{8000};
};

enum class MockKind {
  kConstant,  // always responses[0]
  kCycling,   // responses[(repetition - 1) % n]
  kEcho,      // the prompt itself
  kDisjoint,  // gibberish with no characters shared across repetitions
  kYesSayer,
  kNoSayer,
  kRefuser,
  kScripted,  // first rule whose substring occurs in the prompt, else responses
};

std::string_view to_string(MockKind kind);
std::optional<MockKind> parse_mock_kind(std::string_view text);

struct MockRule {
  std::string contains;
  std::vector<std::string> responses;  // cycled by repetition index
};

struct MockSpec {
  MockKind kind = MockKind::kConstant;
  std::vector<std::string> responses;
  std::vector<MockRule> rules;
  /// Repetition indices at which every attempt fails with a network error.
  std::vector<int> fail_repetitions;
};

struct ProviderSpec {
  std::string provider_id;
  Dialect dialect = Dialect::kMock;
  std::string endpoint;
  std::string model_name;
  /// Name of the environment variable holding the credential. Never the
  /// credential itself.
  std::string auth_env_var;
  Sampling sampling;
  /// Maximum request initiations per second; 0 disables limiting.
  double rate_limit_rps = 0.0;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{60000};
  std::optional<MockSpec> mock;
};

inline constexpr int kProviderConfigFormatVersion = 1;

std::vector<ProviderSpec> parse_provider_config(std::string_view document);
std::vector<ProviderSpec> load_provider_config(const std::filesystem::path& path);

/// A backend that turns one prompt into one completion. Implementations throw
/// llmaudit::Error; kNetwork failures are retried by the gateway.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const std::string& prompt,
                               int repetition_index) = 0;
};

struct MockCall {
  std::string prompt;
  int repetition_index = 0;
  std::chrono::steady_clock::time_point at;
};

class MockProvider final : public Provider {
 public:
  explicit MockProvider(MockSpec spec);

  std::string complete(const std::string& prompt, int repetition_index) override;

  /// Every call in initiation order, including failed attempts.
  std::vector<MockCall> call_log() const;

 private:
  MockSpec spec_;
  mutable std::mutex mu_;
  std::vector<MockCall> calls_;
};

/// Token- and character-disjoint filler text for one repetition.
std::string disjoint_gibberish(std::string_view prompt, int repetition_index);

// HTTP dialect plumbing, exposed for testing.
struct HttpRequestPlan {
  std::string base_url;  // scheme://host[:port]
  std::string path;
  std::multimap<std::string, std::string> headers;
  std::string body;
};

HttpRequestPlan build_http_request(const ProviderSpec& spec,
                                   const std::string& prompt,
                                   const std::string& credential);
std::string parse_http_completion(Dialect dialect, std::string_view body);

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec);

}  // namespace llmaudit
