#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include <json.hpp>

#include "llmaudit/error.hpp"
#include "llmaudit/provider.hpp"

namespace llmaudit {

using nlohmann::json;

namespace {

constexpr int kAnthropicDefaultMaxTokens = 1024;

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "endpoint is not an absolute URL: " + endpoint);
  }
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (auto pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

json user_messages(const std::string& prompt) {
  return json::array({{{"role", "user"}, {"content", prompt}}});
}

[[noreturn]] void malformed(std::string_view what) {
  fail(ErrorCode::kProvider, "malformed provider response: " + std::string(what));
}

// Concatenates the "text" members of an array of content blocks.
std::string join_text_blocks(const json& blocks, std::string_view what) {
  if (!blocks.is_array() || blocks.empty()) malformed(what);
  std::string out;
  bool any = false;
  for (const auto& b : blocks) {
    auto t = b.find("text");
    if (t != b.end() && t->is_string()) {
      out += t->get<std::string>();
      any = true;
    }
  }
  if (!any) malformed(what);
  return out;
}

class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(ProviderSpec spec) : spec_(std::move(spec)) {}

  std::string complete(const std::string& prompt, int /*repetition_index*/) override {
    const char* credential = std::getenv(spec_.auth_env_var.c_str());
    if (credential == nullptr || *credential == '\0') {
      fail(ErrorCode::kAuth, "provider " + spec_.provider_id +
                                 ": environment variable " + spec_.auth_env_var +
                                 " is not set");
    }
    const HttpRequestPlan plan = build_http_request(spec_, prompt, credential);

    httplib::Client client(plan.base_url);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
        spec_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers(plan.headers.begin(), plan.headers.end());
    auto res = client.Post(plan.path, headers, plan.body, "application/json");
    if (!res) {
      fail(ErrorCode::kNetwork, "provider " + spec_.provider_id + ": " +
                                    httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      fail(ErrorCode::kAuth, "provider " + spec_.provider_id +
                                 ": authentication failed (HTTP " +
                                 std::to_string(status) + ")");
    }
    if (status == 408 || status == 429 || status >= 500) {
      fail(ErrorCode::kNetwork, "provider " + spec_.provider_id + ": HTTP " +
                                    std::to_string(status));
    }
    if (status < 200 || status >= 300) {
      fail(ErrorCode::kProvider, "provider " + spec_.provider_id + ": HTTP " +
                                     std::to_string(status) + ": " +
                                     res->body.substr(0, 200));
    }
    return parse_http_completion(spec_.dialect, res->body);
  }

 private:
  ProviderSpec spec_;
};

}  // namespace

HttpRequestPlan build_http_request(const ProviderSpec& spec,
                                   const std::string& prompt,
                                   const std::string& credential) {
  HttpRequestPlan plan;
  std::tie(plan.base_url, plan.path) =
      split_endpoint(replace_all(spec.endpoint, "{model}", spec.model_name));
  json body;
  switch (spec.dialect) {
    case Dialect::kOpenAiChat:
    case Dialect::kCohereChat:
      body = {{"model", spec.model_name}, {"messages", user_messages(prompt)}};
      if (spec.sampling.temperature) body["temperature"] = *spec.sampling.temperature;
      if (spec.sampling.max_tokens) body["max_tokens"] = *spec.sampling.max_tokens;
      plan.headers.emplace("Authorization", "Bearer " + credential);
      break;
    case Dialect::kAnthropicMessages:
      body = {{"model", spec.model_name},
              {"max_tokens", spec.sampling.max_tokens.value_or(kAnthropicDefaultMaxTokens)},
              {"messages", user_messages(prompt)}};
      if (spec.sampling.temperature) body["temperature"] = *spec.sampling.temperature;
      plan.headers.emplace("x-api-key", credential);
      plan.headers.emplace("anthropic-version", "2023-06-01");
      break;
    case Dialect::kGeminiGenerate: {
      body = {{"contents",
               json::array({{{"role", "user"},
                             {"parts", json::array({{{"text", prompt}}})}}})}};
      json generation = json::object();
      if (spec.sampling.temperature) generation["temperature"] = *spec.sampling.temperature;
      if (spec.sampling.max_tokens) generation["maxOutputTokens"] = *spec.sampling.max_tokens;
      if (!generation.empty()) body["generationConfig"] = generation;
      plan.headers.emplace("x-goog-api-key", credential);
      break;
    }
    case Dialect::kMock:
      fail(ErrorCode::kInvalidArgument, "mock providers have no HTTP request");
  }
  plan.body = body.dump(-1, ' ', false, json::error_handler_t::replace);
  return plan;
}

std::string parse_http_completion(Dialect dialect, std::string_view body) {
  const json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) malformed("body is not a JSON object");
  try {
    switch (dialect) {
      case Dialect::kOpenAiChat: {
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) malformed("choices[0].message.content");
        return content.get<std::string>();
      }
      case Dialect::kAnthropicMessages:
        return join_text_blocks(doc.at("content"), "content[].text");
      case Dialect::kGeminiGenerate:
        return join_text_blocks(doc.at("candidates").at(0).at("content").at("parts"),
                                "candidates[0].content.parts[].text");
      case Dialect::kCohereChat:
        return join_text_blocks(doc.at("message").at("content"),
                                "message.content[].text");
      case Dialect::kMock:
        break;
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  fail(ErrorCode::kInvalidArgument, "mock providers have no HTTP response");
}

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec) {
  if (spec.dialect == Dialect::kMock) {
    if (!spec.mock) fail(ErrorCode::kInvalidArgument, "mock provider without mock spec");
    return std::make_unique<MockProvider>(*spec.mock);
  }
  return std::make_unique<HttpProvider>(spec);
}

}  // namespace llmaudit
