#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace consent {

enum class ErrorCode {
  InvalidArgument,
  Conflict,
  NotFound,
  InvalidCredentials,
  Denied,
  Serialization,
  Parse,
  Io,
  Internal,
};

std::string_view errorCodeName(ErrorCode code);

// Domain failure carried across module boundaries. The api layer maps the
// code onto an HTTP status; the CLI tools map it onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace consent
