#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "phibound/models.hpp"
#include "phibound/orlicz.hpp"

namespace phib {

/// Monte Carlo check of P(X >= U/a) = E min(aX, 1) for U ~ U(0,1)
/// independent of X. Both sides use the same draws of X.
struct MarkovCheck {
  double lhs = 0.0;  ///< P(X >= U/a)
  double rhs = 0.0;  ///< E min(aX, 1)
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  double z = 0.0;  ///< |lhs - rhs| / sqrt(lhs_se^2 + rhs_se^2); 0 when both are exact
  bool passed = false;  ///< z <= 3
};

MarkovCheck randomized_markov_check(const RandomModel& model, double a, std::int64_t n_trials, std::uint64_t seed,
                                    std::uint64_t stream = 0);

/// C tau (2 ln(1/alpha) + ln u) / phi^{-1}(ln(1/alpha)).
double randomized_hoeffding_threshold(double alpha, double tau, const OrliczFunction& phi, double C, double u);

/// randomized_hoeffding_threshold with u = 1.
double classical_threshold(double alpha, double tau, const OrliczFunction& phi, double C = 4.0);

enum class TauMode { sum, summand };

std::string_view to_string(TauMode mode) noexcept;
TauMode parse_tau_mode(std::string_view text);

struct RandomizedCampaign {
  double alpha = 0.1;
  double C = 4.0;
  TauMode mode = TauMode::sum;
  int n_summands = 10;
  double tau = 0.0;
  std::int64_t violations = 0;
  std::int64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_randomized_threshold = 0.0;
  double classical_threshold = 0.0;
  double mean_difference = 0.0;  ///< mean over trials of randomized - classical
  double difference_se = 0.0;
  double expected_difference = 0.0;  ///< -C tau / phi^{-1}(ln(1/alpha))

  double rate() const noexcept { return trials > 0 ? static_cast<double>(violations) / static_cast<double>(trials) : 0.0; }
  bool operator==(const RandomizedCampaign&) const = default;
};

struct RandomizedCampaignSpec {
  int n_summands = 10;
  double alpha = 0.1;
  double C = 4.0;
  TauMode mode = TauMode::sum;
  std::int64_t n_trials = 100000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  double ci_multiplier = 3.0;
};

/// Per trial: draw X_1..X_N and U, count sum(X_i - EX) >= threshold(U).
/// In sum mode tau = tau_phi(sum of N centred copies); in summand mode
/// tau = tau_phi(X - EX).
RandomizedCampaign randomized_validity_campaign(const RandomModel& model, const OrliczFunction& phi,
                                                const RandomizedCampaignSpec& spec);

}  // namespace phib
