#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phibound/orlicz.hpp"

namespace phib {

/// Finite coefficient vector t. Infinite sequences must be truncated by the caller.
struct CoefficientVector {
  std::vector<double> entries;

  std::size_t size() const noexcept { return entries.size(); }
  double l1() const noexcept;
  double l2() const noexcept;
  /// Parses one comma-separated row; ConfigError on bad or non-finite entries.
  static CoefficientVector parse(std::string_view row);

  bool operator==(const CoefficientVector&) const = default;
};

struct NvSolution {
  double value = 0.0;
  std::vector<double> maximizer;
  double multiplier = 0.0;
  bool active = false;
  double budget = 0.0;
  /// Set when some phi_i is not known to be strictly convex and the greedy
  /// discretised allocation was used instead of the KKT solve.
  bool fallback = false;
};

enum class Regime { general, iid_orlicz, iid_quadratic, min_of_both };

std::string_view to_string(Regime regime) noexcept;

struct BoundReport {
  double threshold = 0.0;
  double probability_bound = 1.0;
  std::map<std::string, double> constants;
  Regime regime = Regime::general;

  bool operator==(const BoundReport&) const = default;
};

/// N_v(t) = sup{ sum t_i b_i : sum phi_i(b_i) <= v }.
///
/// Uses |b_i| = (phi_i')^{-1}(|t_i| / mu) and bisects mu (in log space) until
/// the constraint sum is within 1e-10 relative of v, keeping the feasible side.
NvSolution solve_nv(std::span<const OrliczFunction> phis, const CoefficientVector& t, double v);
NvSolution solve_nv(const OrliczFunction& phi, const CoefficientVector& t, double v);

/// Grid search (step grid_step) over all coordinates but one, which spends the
/// remaining budget; that one is a coordinate with a closed-form inverse when
/// there is one. n <= 4.
double nv_brute_force(std::span<const OrliczFunction> phis, const CoefficientVector& t, double v, double grid_step);

/// threshold 2 s K N_v(t), probability exp(-v s).
BoundReport tail_bound_general(const NvSolution& nv, double s, double K);

/// exp(-c min(phi(z / (K1 ||t||_1)), z^2 / (K2^2 ||t||_2^2))).
BoundReport tail_bound_iid(double z, const CoefficientVector& t, const OrliczFunction& phi, double K1, double K2,
                           double c = 1.0);

struct BvMomentReport {
  double scaled_norm = 0.0;  ///< empirical ||Y_t / (2uK)||_v
  double l_hat = 0.0;        ///< scaled_norm / u
  double cap = 10.0;
  bool passed = false;
};

/// Empirical check of ||Y_t||_v <= L u: reports the constant the samples require.
BvMomentReport bv_moment_check(std::span<const double> samples, double v, double K, double u, double cap = 10.0);

}  // namespace phib
