#pragma once

#include <stdexcept>
#include <string>

namespace llmaudit {

// Mirrors llmaudit_status in the C API; values must stay in sync.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kCacheMiss = 4,
  kNetwork = 5,
  kAuth = 6,
  kProvider = 7,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace llmaudit
