#include "phibound/errors.hpp"

namespace phib {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::unbounded_conjugate: return "unbounded-conjugate";
    case ErrorKind::heavy_tail: return "heavy-tail";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::range_too_wide: return "range-too-wide";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::refusal: return "refusal";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::calibration_failed: return "calibration-failed";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

BoundError::BoundError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

}  // namespace phib
