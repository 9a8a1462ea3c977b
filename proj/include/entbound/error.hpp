#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entbound {

enum class ErrorCode {
  invalid_argument,
  resource,        // a configured size cap was exceeded
  numeric,         // non-convergence, residue above tolerance
  format,          // malformed text input
  validation,      // well-formed input that violates a data invariant
  io,
  bad_magic,
  truncated,
  grid_mismatch,
  missing_data,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace entbound
