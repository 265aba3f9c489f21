#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hybridpower {

enum class ErrorCode {
  InvalidArgument,
  DegenerateConditional,
  Infeasible,
  ExceedsNMax,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every library failure is reported as an Error; `code()` tells callers
/// (CLI exit status, HTTP status) which class of failure occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hybridpower
