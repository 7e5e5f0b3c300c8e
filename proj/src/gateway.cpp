#include "llmaudit/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "llmaudit/error.hpp"

namespace llmaudit {

std::string_view to_string(Mode mode) {
  return mode == Mode::kLiveRecord ? "live_record" : "replay";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "live_record" || text == "record") return Mode::kLiveRecord;
  if (text == "replay") return Mode::kReplay;
  return std::nullopt;
}

RateLimiter::RateLimiter(double requests_per_second) {
  if (requests_per_second <= 0) return;
  using namespace std::chrono;
  capacity_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(requests_per_second)));
  window_ = duration_cast<steady_clock::duration>(
      duration<double>(static_cast<double>(capacity_) / requests_per_second));
}

void RateLimiter::acquire() {
  if (capacity_ == 0) return;
  using clock = std::chrono::steady_clock;
  auto now = clock::now();
  if (recent_.size() == capacity_) {
    const auto ready = recent_.front() + window_;
    if (now < ready) {
      std::this_thread::sleep_until(ready);
      now = clock::now();
    }
    recent_.pop_front();
  }
  recent_.push_back(now);
}

struct Gateway::Lane {
  explicit Lane(const ProviderSpec& s) : spec(s), limiter(s.rate_limit_rps) {}

  const ProviderSpec& spec;
  std::unique_ptr<Provider> backend;
  RateLimiter limiter;
  std::mutex mu;
  std::mt19937_64 jitter{std::random_device{}()};
};

namespace {

std::string generate_session_id() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> dist(0, 15);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id = "session-";
  for (int i = 0; i < 16; ++i) id.push_back(kHex[dist(rd)]);
  return id;
}

}  // namespace

Gateway::Gateway(std::vector<ProviderSpec> providers, GatewayOptions options,
                 ProviderFactory factory)
    : specs_(std::move(providers)), options_(std::move(options)) {
  if (options_.session_id.empty()) options_.session_id = generate_session_id();
  if (options_.mode == Mode::kReplay) {
    std::error_code ec;
    if (!std::filesystem::exists(options_.cache_path, ec)) {
      fail(ErrorCode::kCacheMiss,
           "replay cache not found: " + options_.cache_path.string());
    }
  }
  cache_ = std::make_unique<ResponseCache>(options_.cache_path);
  for (const auto& spec : specs_) {
    if (lanes_.contains(spec.provider_id)) {
      fail(ErrorCode::kInvalidArgument, "duplicate provider id " + spec.provider_id);
    }
    auto lane = std::make_unique<Lane>(spec);
    if (options_.mode == Mode::kLiveRecord) lane->backend = factory(spec);
    lanes_.emplace(spec.provider_id, std::move(lane));
  }
}

Gateway::~Gateway() = default;

const ProviderSpec& Gateway::provider(const std::string& provider_id) const {
  auto it = lanes_.find(provider_id);
  if (it == lanes_.end()) {
    fail(ErrorCode::kInvalidArgument, "unknown provider " + provider_id);
  }
  return it->second->spec;
}

bool Gateway::has_provider(const std::string& provider_id) const {
  return lanes_.contains(provider_id);
}

Provider* Gateway::backend(const std::string& provider_id) {
  return lane(provider_id).backend.get();
}

Gateway::Lane& Gateway::lane(const std::string& provider_id) {
  auto it = lanes_.find(provider_id);
  if (it == lanes_.end()) {
    fail(ErrorCode::kInvalidArgument, "unknown provider " + provider_id);
  }
  return *it->second;
}

void Gateway::note_served(const ResponseRecord& record) {
  std::lock_guard lock(window_mu_);
  if (window_.first.empty() || record.timestamp < window_.first) {
    window_.first = record.timestamp;
  }
  if (window_.last.empty() || record.timestamp > window_.last) {
    window_.last = record.timestamp;
  }
}

CollectionWindow Gateway::window() const {
  std::lock_guard lock(window_mu_);
  return window_;
}

std::size_t Gateway::backend_calls() const {
  std::lock_guard lock(window_mu_);
  return backend_calls_;
}

std::string Gateway::call_with_retry(Lane& lane, const std::string& prompt,
                                     int repetition_index) {
  const RetryPolicy& policy = lane.spec.retry;
  for (int attempt = 1;; ++attempt) {
    lane.limiter.acquire();
    {
      std::lock_guard lock(window_mu_);
      ++backend_calls_;
    }
    try {
      return lane.backend->complete(prompt, repetition_index);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNetwork) throw;
      if (attempt >= policy.max_attempts) {
        fail(ErrorCode::kNetwork, "provider " + lane.spec.provider_id +
                                      ": network failure after " +
                                      std::to_string(attempt) + " attempts: " + e.what());
      }
    }
    // Exponential backoff with jitter in [50%, 100%] of the nominal delay.
    const double nominal = std::min<double>(
        static_cast<double>(policy.max_delay.count()),
        static_cast<double>(policy.base_delay.count()) * std::pow(2.0, attempt - 1));
    std::uniform_real_distribution<double> jitter(0.5, 1.0);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(
        nominal * jitter(lane.jitter)));
  }
}

ResponseRecord Gateway::query(const std::string& provider_id,
                              const std::string& question_id,
                              const std::string& prompt, int repetition_index) {
  if (repetition_index < 1) {
    fail(ErrorCode::kInvalidArgument, "repetition_index must be >= 1");
  }
  Lane& l = lane(provider_id);
  const std::string hash = sha256_hex(prompt);
  const CacheKey key{provider_id, hash, repetition_index};

  if (auto cached = cache_->find(key)) {
    note_served(*cached);
    return *cached;
  }
  if (options_.mode == Mode::kReplay) {
    fail(ErrorCode::kCacheMiss, "cache miss: provider=" + provider_id +
                                    " prompt_sha256=" + hash +
                                    " repetition=" + std::to_string(repetition_index));
  }

  std::lock_guard lock(l.mu);
  // Another thread may have recorded the key while this one waited.
  if (auto cached = cache_->find(key)) {
    note_served(*cached);
    return *cached;
  }
  std::string text = call_with_retry(l, prompt, repetition_index);
  ResponseRecord record{
      .provider_id = provider_id,
      .question_id = question_id,
      .prompt_text = prompt,
      .prompt_hash = hash,
      .repetition_index = repetition_index,
      .response_text = std::move(text),
      .timestamp = utc_timestamp_now(),
      .session_id = options_.session_id,
  };
  cache_->append(record);
  note_served(record);
  return record;
}

std::vector<ResponseRecord> Gateway::query_repeated(const std::string& provider_id,
                                                    const std::string& question_id,
                                                    const std::string& prompt, int k) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1, got " + std::to_string(k));
  std::vector<ResponseRecord> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    try {
      out.push_back(query(provider_id, question_id, prompt, i));
    } catch (const Error& e) {
      throw Error(e.code(), "provider " + provider_id + " question " + question_id +
                                " repetition " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

void Gateway::flush() { cache_->flush(); }

}  // namespace llmaudit
