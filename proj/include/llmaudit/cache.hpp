#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace llmaudit {

/// One answer with the full provenance of the query that produced it.
struct ResponseRecord {
  std::string provider_id;
  std::string question_id;
  std::string prompt_text;
  std::string prompt_hash;  // lowercase hex SHA-256 of the UTF-8 prompt
  int repetition_index = 1;
  std::string response_text;
  std::string timestamp;  // ISO-8601 UTC, millisecond precision
  std::string session_id;

  bool operator==(const ResponseRecord&) const = default;
};

std::string sha256_hex(std::string_view bytes);
std::string utc_timestamp_now();

struct CacheKey {
  std::string provider_id;
  std::string prompt_hash;
  int repetition_index = 1;

  auto operator<=>(const CacheKey&) const = default;
};

struct CacheLoadError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

inline constexpr std::string_view kCacheFormatName = "llmaudit-response-cache";
inline constexpr int kCacheFormatVersion = 1;

/// Append-only journal of ResponseRecords, one JSON object per line after a
/// header line. A missing or empty file is an empty cache. Corrupt record
/// lines are skipped and reported through load_errors(); the rest of the
/// journal stays readable.
///
/// Appends go to an in-memory queue under a single lock; flush() writes the
/// queue to disk and syncs it.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path path);
  ~ResponseCache();

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  const std::filesystem::path& path() const { return path_; }
  const std::vector<CacheLoadError>& load_errors() const { return load_errors_; }

  std::optional<ResponseRecord> find(const CacheKey& key) const;
  /// Throws kInvalidArgument if the key is already present.
  void append(ResponseRecord record);
  void flush();

  std::size_t size() const;
  std::size_t pending() const;
  /// All records in journal order.
  std::vector<ResponseRecord> records() const;

 private:
  std::filesystem::path path_;
  std::vector<CacheLoadError> load_errors_;
  mutable std::mutex mu_;
  std::vector<ResponseRecord> records_;
  std::map<CacheKey, std::size_t> index_;
  std::size_t flushed_ = 0;
  bool header_on_disk_ = false;
};

std::string record_to_json_line(const ResponseRecord& record);
/// Throws kParse on malformed input.
ResponseRecord record_from_json_line(std::string_view line);

}  // namespace llmaudit
