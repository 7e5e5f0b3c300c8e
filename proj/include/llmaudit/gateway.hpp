#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmaudit/cache.hpp"
#include "llmaudit/provider.hpp"

namespace llmaudit {

enum class Mode { kLiveRecord, kReplay };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Sliding-window limiter: no interval of `window` contains more than
/// `capacity` acquisitions. For a rate r >= 1 the window is one second and the
/// capacity floor(r); slower rates space single requests 1/r seconds apart.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);

  void acquire();

 private:
  std::size_t capacity_ = 0;
  std::chrono::steady_clock::duration window_{};
  std::deque<std::chrono::steady_clock::time_point> recent_;
};

struct GatewayOptions {
  Mode mode = Mode::kReplay;
  std::filesystem::path cache_path;
  /// Recorded on every new record; generated when empty.
  std::string session_id;
};

using ProviderFactory = std::function<std::unique_ptr<Provider>(const ProviderSpec&)>;

/// The earliest and latest timestamps among records the gateway has served.
struct CollectionWindow {
  std::string first;
  std::string last;
};

/// Uniform access to all configured providers, backed by the record/replay
/// cache. Thread-safe: queries to different providers run concurrently,
/// queries to one provider are serialized through its rate limiter.
///
/// In live_record mode a key already present in the cache is served from the
/// cache, so an interrupted recording can be resumed. In replay mode no
/// provider backend is ever constructed.
class Gateway {
 public:
  Gateway(std::vector<ProviderSpec> providers, GatewayOptions options,
          ProviderFactory factory = make_provider);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  ResponseRecord query(const std::string& provider_id,
                       const std::string& question_id, const std::string& prompt,
                       int repetition_index);

  /// Repetitions 1..k, each an independent call in live mode. On failure
  /// nothing is returned and the error names the failing repetition.
  std::vector<ResponseRecord> query_repeated(const std::string& provider_id,
                                             const std::string& question_id,
                                             const std::string& prompt, int k);

  void flush();

  Mode mode() const { return options_.mode; }
  const std::string& session_id() const { return options_.session_id; }
  const std::vector<ProviderSpec>& providers() const { return specs_; }
  const ProviderSpec& provider(const std::string& provider_id) const;
  bool has_provider(const std::string& provider_id) const;

  /// The live backend for a provider; null in replay mode.
  Provider* backend(const std::string& provider_id);

  ResponseCache& cache() { return *cache_; }
  CollectionWindow window() const;
  /// Backend invocations, retries included.
  std::size_t backend_calls() const;

 private:
  struct Lane;

  Lane& lane(const std::string& provider_id);
  std::string call_with_retry(Lane& lane, const std::string& prompt,
                              int repetition_index);
  void note_served(const ResponseRecord& record);

  std::vector<ProviderSpec> specs_;
  GatewayOptions options_;
  std::unique_ptr<ResponseCache> cache_;
  std::map<std::string, std::unique_ptr<Lane>> lanes_;

  mutable std::mutex window_mu_;
  CollectionWindow window_;
  std::size_t backend_calls_ = 0;
};

}  // namespace llmaudit
