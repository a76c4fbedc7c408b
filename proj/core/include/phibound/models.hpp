#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phibound/random.hpp"

namespace phib {

/// A finite distribution: values with probabilities summing to 1.
struct FiniteDistribution {
  std::vector<double> values;
  std::vector<double> probs;

  double mean() const noexcept;
  /// Throws BoundError(domain) unless sizes match, probabilities are
  /// nonnegative and sum to 1 within 1e-12.
  void validate() const;

  bool operator==(const FiniteDistribution&) const = default;
};

/// A real random variable with analytic log-MGF / absolute moments where
/// known and a seeded sampler. Immutable value type; nested models (shifts,
/// i.i.d. sums) share their children.
class RandomModel {
 public:
  enum class Family {
    gaussian,           ///< N(0, sigma^2)
    uniform_symmetric,  ///< U[-a, a]
    rademacher_scaled,  ///< a * (+-1)
    discrete,           ///< finite support
    exponential,        ///< Exp(rate), nonnegative, mean 1/rate
    chi,                ///< ||sigma g|| for g standard normal in R^k
    chi_squared,        ///< ||sigma g||^2
    mixture,            ///< w N(0, sigma^2) + (1 - w) U[-a, a]
    shifted,            ///< child + mu
    iid_sum,            ///< sum of `count` independent copies of child
  };

  static RandomModel gaussian(double sigma);
  static RandomModel uniform_symmetric(double a);
  static RandomModel rademacher(double a = 1.0);
  static RandomModel discrete(std::vector<double> values, std::vector<double> probs);
  static RandomModel discrete(FiniteDistribution dist);
  static RandomModel constant(double c);
  static RandomModel exponential(double rate);
  static RandomModel chi(int dim, double sigma = 1.0);
  static RandomModel chi_squared(int dim, double sigma = 1.0);
  static RandomModel mixture(double weight, double sigma, double a);
  /// Parses "gaussian:<sigma>", "uniform:<a>", "rademacher:<a>",
  /// "exponential:<rate>", "constant:<c>", "mixture:<w>,<sigma>,<a>",
  /// "chi:<k>,<sigma>", "chi2:<k>,<sigma>",
  /// "discrete:<v1>,<v2>,...;<p1>,<p2>,..."; ConfigError otherwise.
  static RandomModel parse(std::string_view spec);

  RandomModel shifted(double mu) const;
  RandomModel scaled(double c) const;
  RandomModel iid_sum(int count) const;
  /// Shift by -mean().
  RandomModel centered() const;

  Family family() const noexcept;
  std::string name() const;

  double mean() const;
  bool is_centered(double tol = 1e-12) const;
  bool nonnegative() const;
  bool has_analytic_mgf() const noexcept;
  bool has_analytic_moments() const noexcept;

  /// log E exp(lambda X); +inf where the MGF diverges. Throws
  /// BoundError(unsupported) when no analytic form exists.
  double log_mgf(double lambda) const;
  /// E|X|^p, p > 0.
  double abs_moment(double p) const;
  /// E exp(s|X|), s >= 0; +inf where divergent.
  double exp_abs_moment(double s) const;
  /// Exact finite distribution when the support is finite.
  std::optional<FiniteDistribution> finite_support() const;

  double sample(CounterRng& rng) const;

  struct Node;
  explicit RandomModel(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const Node> node_;
};

}  // namespace phib
