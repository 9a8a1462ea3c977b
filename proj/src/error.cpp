#include "entbound/error.hpp"

namespace entbound {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::resource: return "resource";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::format: return "format";
    case ErrorCode::validation: return "validation";
    case ErrorCode::io: return "io";
    case ErrorCode::bad_magic: return "bad-magic";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::missing_data: return "missing-data";
  }
  return "unknown";
}

}  // namespace entbound
