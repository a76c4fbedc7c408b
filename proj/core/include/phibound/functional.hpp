#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "phibound/models.hpp"
#include "phibound/orlicz.hpp"
#include "phibound/types.hpp"

namespace phib {

/// f : Omega^n -> R over independent coordinates with finite supports.
class DiscreteFunctionModel {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  DiscreteFunctionModel(std::vector<FiniteDistribution> coordinates, Fn f, std::string name);

  static DiscreteFunctionModel sum(std::vector<FiniteDistribution> coordinates);
  static DiscreteFunctionModel product(std::vector<FiniteDistribution> coordinates);
  static DiscreteFunctionModel constant(std::vector<FiniteDistribution> coordinates, double c);
  /// f(x) = x_k, k 0-based.
  static DiscreteFunctionModel coordinate(std::vector<FiniteDistribution> coordinates, int k);
  /// Row-major table over support indices, last coordinate fastest.
  static DiscreteFunctionModel tabulated(std::vector<FiniteDistribution> coordinates, std::vector<double> table);
  /// {"coordinates": [{"values": [...], "probs": [...]}, ...],
  ///  "f": "sum" | "product" | "constant" | "coordinate" | "tabulated",
  ///  "constant": c, "coordinate": k, "table": [...]}
  static DiscreteFunctionModel from_json(std::istream& in);

  /// n independent copies of a*(+-1) with probability 1/2 each.
  static std::vector<FiniteDistribution> fair_coins(int n, double a = 1.0);

  int arity() const noexcept { return static_cast<int>(coords_.size()); }
  const FiniteDistribution& coordinate_distribution(int k) const { return coords_.at(static_cast<std::size_t>(k)); }
  const std::string& name() const noexcept { return name_; }
  double operator()(std::span<const double> x) const { return f_(x); }

  /// Number of support points of the product space (saturates at UINT64_MAX).
  std::uint64_t grid_size() const noexcept;
  /// Exact law of f(X), equal values merged, sorted ascending. Refuses grids > 1e6.
  FiniteDistribution distribution() const;

 private:
  std::vector<FiniteDistribution> coords_;
  Fn f_;
  std::string name_;
};

/// Law of f(x_1..X_k..x_n) - E over X_k, with every other slot frozen at x. k is 0-based.
FiniteDistribution centered_conditional(const DiscreteFunctionModel& fm, std::span<const double> x, int k);

/// sum p y e^x / sum p e^x, shifted by the largest tilt.
double tilted_expectation(std::span<const double> values, std::span<const double> tilts, std::span<const double> probs);

/// Variance of X under the tilt e^{sX}.
double tilted_variance(const FiniteDistribution& dist, double s);

/// int_0^1 int_t^1 Var_{sX}(X) ds dt <= e^2 n^2 / (1 - e n)^2 with n the
/// moment-ratio norm of X. Tensor 32-point Gauss-Legendre.
CheckReport fe_integral_check(const FiniteDistribution& dist, const OrliczFunction& phi);

/// -t^2 / (2 (2 C1 + a t)).
double m20_rhs(double C1, double a, double t);
/// min over beta in [0, 1/a) of -beta t + C1 beta^2 / (1 - a beta), grid + golden section.
double m20_lhs_grid(double C1, double a, double t, int grid_points = 2000);

/// exp(-t^2 / (4 e^2 A + 2 e B t)); 0 when A = B = 0.
double med_tail_bound(double t, double A, double B);

struct FunctionalBoundInputs {
  double A = 0.0;
  double B = 0.0;
  std::uint64_t points = 0;
};

/// A = max_x sum_k ||f_k(X)(x)||^2, B = max_{x,k} ||f_k(X)(x)|| with the
/// moment-ratio norm, over the full support grid (<= 1e6 points).
FunctionalBoundInputs functional_norm_inputs(const DiscreteFunctionModel& fm, const OrliczFunction& phi);

/// Checks n >= ln(1/delta) >= 1 and returns ln(1/delta).
double confidence_log_term(std::int64_t n, double delta);

/// 6 e norm sqrt(ln(1/delta) / n).
double vector_mean_bound(std::int64_t n, double delta, double norm);

}  // namespace phib
