#include "gensmooth/error.hpp"

namespace gensmooth {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInput: return "input";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kNormalization: return "normalization";
    case ErrorCode::kOutOfRange: return "out-of-range";
  }
  return "unknown";
}

}  // namespace gensmooth
