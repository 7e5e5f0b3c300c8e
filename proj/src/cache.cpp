#include "llmaudit/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "llmaudit/error.hpp"

namespace llmaudit {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    fail(ErrorCode::kInternal, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms.count()));
  return buf;
}

std::string record_to_json_line(const ResponseRecord& r) {
  json obj = {{"provider_id", r.provider_id},
              {"question_id", r.question_id},
              {"prompt", r.prompt_text},
              {"prompt_sha256", r.prompt_hash},
              {"repetition_index", r.repetition_index},
              {"response", r.response_text},
              {"timestamp", r.timestamp},
              {"session_id", r.session_id}};
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

ResponseRecord record_from_json_line(std::string_view line) {
  const json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    fail(ErrorCode::kParse, "not a JSON object");
  }
  auto str = [&](const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      fail(ErrorCode::kParse, std::string("missing string field \"") + key + "\"");
    }
    return it->get<std::string>();
  };
  ResponseRecord r;
  r.provider_id = str("provider_id");
  r.question_id = str("question_id");
  r.prompt_text = str("prompt");
  r.prompt_hash = str("prompt_sha256");
  auto rep = obj.find("repetition_index");
  if (rep == obj.end() || !rep->is_number_integer() || rep->get<int>() < 1) {
    fail(ErrorCode::kParse, "repetition_index must be an integer >= 1");
  }
  r.repetition_index = rep->get<int>();
  r.response_text = str("response");
  r.timestamp = str("timestamp");
  r.session_id = str("session_id");
  if (sha256_hex(r.prompt_text) != r.prompt_hash) {
    fail(ErrorCode::kParse, "prompt_sha256 does not match prompt");
  }
  return r;
}

namespace {

std::string header_line() {
  json h = {{"format", kCacheFormatName}, {"format_version", kCacheFormatVersion}};
  return h.dump();
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec)) return;

  std::ifstream in(path_, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open cache " + path_.string());

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      const json h = json::parse(line, nullptr, false);
      if (h.is_discarded() || !h.is_object() ||
          h.value("format", "") != kCacheFormatName) {
        fail(ErrorCode::kParse, "cache " + path_.string() +
                                    ": line " + std::to_string(line_no) +
                                    ": missing cache header");
      }
      if (h.value("format_version", 0) != kCacheFormatVersion) {
        fail(ErrorCode::kParse, "cache " + path_.string() +
                                    ": unsupported format_version");
      }
      saw_header = true;
      continue;
    }
    try {
      ResponseRecord r = record_from_json_line(line);
      CacheKey key{r.provider_id, r.prompt_hash, r.repetition_index};
      if (index_.contains(key)) {
        load_errors_.push_back({line_no, "duplicate key for provider " +
                                             r.provider_id + " repetition " +
                                             std::to_string(r.repetition_index)});
        continue;
      }
      index_.emplace(std::move(key), records_.size());
      records_.push_back(std::move(r));
    } catch (const Error& e) {
      load_errors_.push_back({line_no, e.what()});
    }
  }
  header_on_disk_ = saw_header;
  flushed_ = records_.size();
}

ResponseCache::~ResponseCache() {
  try {
    flush();
  } catch (...) {
    // Destructors must not throw; callers that care call flush() themselves.
  }
}

std::optional<ResponseRecord> ResponseCache::find(const CacheKey& key) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

void ResponseCache::append(ResponseRecord record) {
  std::lock_guard lock(mu_);
  CacheKey key{record.provider_id, record.prompt_hash, record.repetition_index};
  if (index_.contains(key)) {
    fail(ErrorCode::kInvalidArgument,
         "cache already holds provider " + record.provider_id + " prompt " +
             record.prompt_hash + " repetition " +
             std::to_string(record.repetition_index));
  }
  index_.emplace(std::move(key), records_.size());
  records_.push_back(std::move(record));
}

void ResponseCache::flush() {
  std::lock_guard lock(mu_);
  if (flushed_ == records_.size()) return;

  std::string payload;
  std::error_code ec;
  const bool exists = std::filesystem::exists(path_, ec);
  const auto size = exists ? std::filesystem::file_size(path_, ec) : 0;
  if (exists && size > 0) {
    // Never glue a record onto an unterminated last line.
    std::ifstream in(path_, std::ios::binary);
    in.seekg(-1, std::ios::end);
    if (in.get() != '\n') payload.push_back('\n');
  }
  if (!header_on_disk_) payload += header_line() + "\n";
  for (std::size_t i = flushed_; i < records_.size(); ++i) {
    payload += record_to_json_line(records_[i]);
    payload.push_back('\n');
  }

  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    fail(ErrorCode::kIo, "cannot open cache " + path_.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < payload.size()) {
    const ssize_t n = ::write(fd, payload.data() + written, payload.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      fail(ErrorCode::kIo, "cannot write cache " + path_.string() + ": " + std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) fail(ErrorCode::kIo, "cannot sync cache " + path_.string());
  header_on_disk_ = true;
  flushed_ = records_.size();
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::size_t ResponseCache::pending() const {
  std::lock_guard lock(mu_);
  return records_.size() - flushed_;
}

std::vector<ResponseRecord> ResponseCache::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

}  // namespace llmaudit
