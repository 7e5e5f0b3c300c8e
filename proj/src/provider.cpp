#include "llmaudit/provider.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "llmaudit/error.hpp"
#include "utf8.hpp"

namespace llmaudit {

using nlohmann::json;

namespace {

constexpr std::pair<Dialect, std::string_view> kDialectNames[] = {
    {Dialect::kOpenAiChat, "openai_chat"},
    {Dialect::kAnthropicMessages, "anthropic_messages"},
    {Dialect::kGeminiGenerate, "gemini_generate"},
    {Dialect::kCohereChat, "cohere_chat"},
    {Dialect::kMock, "mock"},
};

constexpr std::pair<MockKind, std::string_view> kMockNames[] = {
    {MockKind::kConstant, "constant"}, {MockKind::kCycling, "cycling"},
    {MockKind::kEcho, "echo"},         {MockKind::kDisjoint, "disjoint"},
    {MockKind::kYesSayer, "yes_sayer"}, {MockKind::kNoSayer, "no_sayer"},
    {MockKind::kRefuser, "refuser"},   {MockKind::kScripted, "scripted"},
};

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::string& cycle(const std::vector<std::string>& texts, int repetition) {
  const auto n = static_cast<long>(texts.size());
  return texts[static_cast<std::size_t>((std::max(repetition, 1) - 1) % n)];
}

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::kInvalidArgument, "provider config: " + where + ": " + what);
}

std::vector<std::string> string_list(const json& value, const std::string& where) {
  if (!value.is_array()) config_error(where, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : value) {
    if (!v.is_string()) config_error(where, "expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

MockSpec parse_mock(const json& obj, const std::string& where) {
  if (!obj.is_object()) config_error(where, "\"mock\" must be an object");
  MockSpec spec;
  const std::string kind = obj.value("kind", "");
  auto parsed = parse_mock_kind(kind);
  if (!parsed) config_error(where, "unknown mock kind \"" + kind + "\"");
  spec.kind = *parsed;
  if (obj.contains("responses")) {
    spec.responses = string_list(obj["responses"], where + ".responses");
  }
  if (obj.contains("rules")) {
    if (!obj["rules"].is_array()) config_error(where, "\"rules\" must be an array");
    for (const auto& r : obj["rules"]) {
      if (!r.is_object() || !r.contains("contains") || !r["contains"].is_string()) {
        config_error(where, "each rule needs a string \"contains\"");
      }
      MockRule rule{r["contains"].get<std::string>(),
                    string_list(r.value("responses", json::array()),
                                where + ".rules.responses")};
      if (rule.responses.empty()) config_error(where, "rule without responses");
      spec.rules.push_back(std::move(rule));
    }
  }
  if (obj.contains("fail_repetitions")) {
    for (const auto& v : obj["fail_repetitions"]) {
      if (!v.is_number_integer()) config_error(where, "fail_repetitions must be integers");
      spec.fail_repetitions.push_back(v.get<int>());
    }
  }
  const bool needs_responses = spec.kind == MockKind::kConstant ||
                               spec.kind == MockKind::kCycling ||
                               (spec.kind == MockKind::kScripted && spec.rules.empty());
  if (needs_responses && spec.responses.empty()) {
    config_error(where, "mock kind \"" + kind + "\" needs non-empty \"responses\"");
  }
  return spec;
}

ProviderSpec parse_provider(const json& obj, std::size_t index) {
  const std::string where = "providers[" + std::to_string(index) + "]";
  if (!obj.is_object()) config_error(where, "not an object");
  for (const char* forbidden : {"api_key", "key", "token", "credential"}) {
    if (obj.contains(forbidden)) {
      config_error(where, std::string("field \"") + forbidden +
                              "\" is not allowed; name an environment variable "
                              "with \"auth_env\" instead");
    }
  }
  ProviderSpec spec;
  if (!obj.contains("id") || !obj["id"].is_string() ||
      obj["id"].get<std::string>().empty()) {
    config_error(where, "missing string \"id\"");
  }
  spec.provider_id = obj["id"].get<std::string>();
  const std::string dialect = obj.value("dialect", "");
  auto parsed = parse_dialect(dialect);
  if (!parsed) config_error(where, "unknown dialect \"" + dialect + "\"");
  spec.dialect = *parsed;
  spec.endpoint = obj.value("endpoint", "");
  spec.model_name = obj.value("model", "");
  spec.auth_env_var = obj.value("auth_env", "");

  if (obj.contains("sampling")) {
    const auto& s = obj["sampling"];
    // null leaves the provider's own default in place.
    if (s.contains("temperature") && !s["temperature"].is_null()) {
      if (!s["temperature"].is_number()) config_error(where, "sampling.temperature must be a number");
      spec.sampling.temperature = s["temperature"].get<double>();
    }
    if (s.contains("max_tokens") && !s["max_tokens"].is_null()) {
      if (!s["max_tokens"].is_number_integer()) config_error(where, "sampling.max_tokens must be an integer");
      spec.sampling.max_tokens = s["max_tokens"].get<int>();
    }
  }
  spec.rate_limit_rps = obj.value("rate_limit_rps", 0.0);
  if (spec.rate_limit_rps < 0) config_error(where, "rate_limit_rps must be >= 0");
  if (obj.contains("retry")) {
    const auto& r = obj["retry"];
    spec.retry.max_attempts = r.value("max_attempts", spec.retry.max_attempts);
    spec.retry.base_delay = std::chrono::milliseconds(
        r.value("base_delay_ms", static_cast<long>(spec.retry.base_delay.count())));
    spec.retry.max_delay = std::chrono::milliseconds(
        r.value("max_delay_ms", static_cast<long>(spec.retry.max_delay.count())));
    if (spec.retry.max_attempts < 1) config_error(where, "retry.max_attempts must be >= 1");
  }
  spec.timeout = std::chrono::milliseconds(
      obj.value("timeout_ms", static_cast<long>(spec.timeout.count())));

  if (spec.dialect == Dialect::kMock) {
    if (!obj.contains("mock")) config_error(where, "mock dialect needs a \"mock\" object");
    spec.mock = parse_mock(obj["mock"], where);
  } else {
    if (spec.endpoint.empty()) config_error(where, "missing \"endpoint\"");
    if (spec.auth_env_var.empty()) config_error(where, "missing \"auth_env\"");
    if (spec.dialect != Dialect::kGeminiGenerate && spec.model_name.empty()) {
      config_error(where, "missing \"model\"");
    }
  }
  return spec;
}

}  // namespace

std::string_view to_string(Dialect dialect) {
  for (const auto& [d, name] : kDialectNames) {
    if (d == dialect) return name;
  }
  return "unknown";
}

std::optional<Dialect> parse_dialect(std::string_view text) {
  for (const auto& [d, name] : kDialectNames) {
    if (name == text) return d;
  }
  return std::nullopt;
}

std::string_view to_string(MockKind kind) {
  for (const auto& [k, name] : kMockNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<MockKind> parse_mock_kind(std::string_view text) {
  for (const auto& [k, name] : kMockNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::vector<ProviderSpec> parse_provider_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("provider config parse error: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format_version", 0) != kProviderConfigFormatVersion) {
    fail(ErrorCode::kParse, "provider config: missing or unsupported format_version");
  }
  if (!doc.contains("providers") || !doc["providers"].is_array()) {
    fail(ErrorCode::kParse, "provider config: missing array \"providers\"");
  }
  std::vector<ProviderSpec> out;
  std::set<std::string> ids;
  std::size_t index = 0;
  try {
    for (const auto& p : doc["providers"]) {
      auto spec = parse_provider(p, index++);
      if (!ids.insert(spec.provider_id).second) {
        config_error("providers", "duplicate id \"" + spec.provider_id + "\"");
      }
      out.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("provider config: ") + e.what());
  }
  return out;
}

std::vector<ProviderSpec> load_provider_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open provider config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_provider_config(buf.str());
}

std::string disjoint_gibberish(std::string_view prompt, int repetition_index) {
  // Each repetition draws from its own 48-code-point slice of the CJK block,
  // so two repetitions share no token and no character except spaces.
  constexpr char32_t kBlock = 0x4E00;
  constexpr int kSlice = 48;
  constexpr int kSlices = 400;
  const char32_t base =
      kBlock + static_cast<char32_t>(((std::max(repetition_index, 1) - 1) % kSlices) * kSlice);
  std::uint64_t h = fnv1a(prompt);
  h = fnv1a(std::to_string(repetition_index), h);
  std::string out;
  for (int word = 0; word < 12; ++word) {
    if (word > 0) out.push_back(' ');
    h = h * 6364136223846793005ull + 1442695040888963407ull;
    const int len = 6 + static_cast<int>((h >> 33) % 5);
    for (int c = 0; c < len; ++c) {
      h = h * 6364136223846793005ull + 1442695040888963407ull;
      utf8::append(out, base + static_cast<char32_t>((h >> 33) % kSlice));
    }
  }
  return out;
}

MockProvider::MockProvider(MockSpec spec) : spec_(std::move(spec)) {}

std::string MockProvider::complete(const std::string& prompt, int repetition_index) {
  {
    std::lock_guard lock(mu_);
    calls_.push_back({prompt, repetition_index, std::chrono::steady_clock::now()});
  }
  if (std::find(spec_.fail_repetitions.begin(), spec_.fail_repetitions.end(),
                repetition_index) != spec_.fail_repetitions.end()) {
    fail(ErrorCode::kNetwork, "mock: simulated network failure");
  }
  switch (spec_.kind) {
    case MockKind::kConstant:
      return spec_.responses.front();
    case MockKind::kCycling:
      return cycle(spec_.responses, repetition_index);
    case MockKind::kEcho:
      return prompt;
    case MockKind::kDisjoint:
      return disjoint_gibberish(prompt, repetition_index);
    case MockKind::kYesSayer:
      return "Yes, that is correct.";
    case MockKind::kNoSayer:
      return "No, that is not correct.";
    case MockKind::kRefuser:
      return "I think it's a good question.";
    case MockKind::kScripted:
      for (const auto& rule : spec_.rules) {
        if (prompt.find(rule.contains) != std::string::npos) {
          return cycle(rule.responses, repetition_index);
        }
      }
      if (spec_.responses.empty()) {
        fail(ErrorCode::kProvider, "mock: no scripted response for prompt");
      }
      return cycle(spec_.responses, repetition_index);
  }
  fail(ErrorCode::kInternal, "mock: unhandled kind");
}

std::vector<MockCall> MockProvider::call_log() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace llmaudit
