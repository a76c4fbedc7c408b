#pragma once

#include <string>

namespace phib {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

/// Outcome of an inequality check: lhs <= rhs (plus tolerance) means pass.
struct CheckReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
  std::string detail;

  bool operator==(const CheckReport&) const = default;
};

}  // namespace phib
