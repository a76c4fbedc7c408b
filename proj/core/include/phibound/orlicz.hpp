#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phib {

/// Numerical constants shared by every Orlicz routine; reports quote them.
namespace orlicz_tolerance {
inline constexpr double inverse_relative = 1e-12;
inline constexpr double conjugate_absolute = 1e-9;
inline constexpr double bracket_cap = 1e12;
inline constexpr double difference_step = 1e-6;
}  // namespace orlicz_tolerance

enum class OrliczKind {
  quadratic,         ///< x^2 / 2
  scaled_quadratic,  ///< x^2
  power,             ///< |x|^p / p, p > 1
  exp_type,          ///< e^|x| - |x| - 1
  entropy_type,      ///< (1+|x|) ln(1+|x|) - |x|, the conjugate of exp_type
  tabulated,         ///< piecewise-linear interpolation of (x, phi(x)) data
  callable,          ///< user-supplied function of |x|
  numeric_conjugate, ///< sup_x (xy - base(x)) evaluated numerically
};

std::string_view to_string(OrliczKind kind) noexcept;

/// An even convex gauge function phi with phi(0) = 0 (an Orlicz N-function
/// when the validator passes). Immutable; copies share the representation.
class OrliczFunction {
 public:
  static OrliczFunction quadratic();
  static OrliczFunction scaled_quadratic();
  static OrliczFunction power(double p);
  static OrliczFunction exp_type();
  static OrliczFunction entropy_type();
  /// Knots must have strictly increasing x >= 0. A knot (0, 0) is prepended
  /// when the first x is positive; beyond the last knot the final slope is
  /// continued linearly.
  static OrliczFunction tabulated(std::vector<double> xs, std::vector<double> ys);
  /// Reads "x,phi" rows (optional header line) and builds a tabulated function.
  static OrliczFunction from_csv(std::istream& in);
  static OrliczFunction from_csv_file(const std::string& path);
  /// `fn` is evaluated at |x|.
  static OrliczFunction callable(std::string name, std::function<double(double)> fn);
  /// Parses "quadratic", "scaled-quadratic", "power:<p>", "exp", "entropy",
  /// or "csv:<path>". Throws ConfigError on anything else.
  static OrliczFunction parse(std::string_view spec);

  OrliczKind kind() const noexcept;
  /// Exponent p for power kinds, NaN otherwise.
  double parameter() const noexcept;
  std::string name() const;

  bool has_analytic_conjugate() const noexcept;
  bool has_analytic_inverse() const noexcept;
  /// True for kinds whose derivative is strictly increasing on (0, inf);
  /// the KKT solver in solve_nv relies on it.
  bool strictly_convex() const noexcept;

  double operator()(double x) const { return evaluate(x); }
  /// phi(|x|). Throws BoundError(domain) for non-finite x.
  double evaluate(double x) const;
  /// Unique x >= 0 with phi(x) = y; closed form or monotone bisection.
  double inverse(double y) const;
  /// phi'(x), odd in x.
  double derivative(double x) const;
  /// (phi')^{-1}(y) for y >= 0, i.e. the maximiser of xy - phi(x).
  double derivative_inverse(double y) const;
  /// Young-Fenchel transform phi*(y) = sup_x (xy - phi(x)).
  double conjugate(double y) const;

  /// phi* as a function: closed form where known, numeric otherwise.
  OrliczFunction conjugate_function() const;
  /// phi* evaluated by numerical maximisation regardless of kind.
  OrliczFunction numeric_conjugate_function() const;

  /// Opaque representation; only the factories above create one.
  struct Impl;
  explicit OrliczFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<const Impl> impl_;
};

struct ConjugateMaximum {
  double value = 0.0;
  double maximizer = 0.0;
};

/// sup_x (xy - phi(x)) by derivative-sign bracketing from [0, 1] (doubling up
/// to orlicz_tolerance::bracket_cap) followed by golden-section search.
/// Throws BoundError(unbounded_conjugate) when no bracket exists.
ConjugateMaximum maximize_conjugate(const OrliczFunction& phi, double y);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::string witness;  ///< first violating point(s), empty on pass
  double statistic = 0.0;  ///< property-specific number (e.g. largest admissible c)
};

struct ValidationReport {
  std::vector<PropertyCheck> checks;

  bool all_passed() const noexcept;
  const PropertyCheck* find(std::string_view name) const noexcept;
};

/// Checks the N-function axioms and the four growth properties
/// (phi(bx) >= b phi(x) for b > 1, phi(x) > cx for x > 1, phi(x)/x
/// nondecreasing, superadditivity) on `grid`. Failures are report entries.
///
/// Property names: "even", "zero-at-origin", "strictly-increasing",
/// "ratio-to-zero", "ratio-to-infinity", "convex", "scaling",
/// "linear-lower-bound", "ratio-monotone", "superadditive".
ValidationReport validate_n_function(const OrliczFunction& phi, std::span<const double> grid);

/// Log-spaced grid on [1e-3, 1e3] with 121 points.
std::vector<double> standard_grid();

}  // namespace phib
