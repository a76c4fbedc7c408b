#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phib {

/// Classifies why a bound computation refused its inputs.
enum class ErrorKind {
  domain,               ///< argument outside the mathematical domain
  precondition,         ///< input violates a stated precondition (e.g. non-centered model)
  unbounded_conjugate,  ///< Young-Fenchel supremum diverges on the search range
  heavy_tail,           ///< log-MGF diverges inside the lambda search range
  normalization,        ///< phi^{-1}(1) != 1 where the moment-ratio norm needs it
  range_too_wide,       ///< plug-in exponential overflows at a range edge
  divergence,           ///< exponential Orlicz norm does not exist
  refusal,              ///< problem too large for an exhaustive method
  hypothesis,           ///< a bound hypothesis (e.g. n >= ln(1/delta) >= 1) fails
  calibration_failed,   ///< no feasible constant in the calibration window
  unsupported,          ///< quantity not available for this model family
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Raised by library operations for mathematically invalid requests. The CLI
/// maps these to exit status 1.
class BoundError : public std::runtime_error {
 public:
  BoundError(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed configuration, files or bound specifications. Exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phib
