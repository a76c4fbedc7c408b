#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phibound/canonical.hpp"
#include "phibound/config.hpp"
#include "phibound/models.hpp"
#include "phibound/randomized.hpp"
#include "phibound/types.hpp"

namespace phib {

/// Two-sided confidence level of +-k standard normal deviations (k = 3 gives 0.9973).
double confidence_for_multiplier(double k);

/// Exact binomial interval for k successes in n trials.
Interval clopper_pearson(std::int64_t k, std::int64_t n, double confidence);

struct TailEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t count = 0;
  std::int64_t n = 0;

  bool operator==(const TailEstimate&) const = default;
};

/// Fraction of samples >= z with a Clopper-Pearson interval at ci_multiplier sigmas.
TailEstimate empirical_tail(std::span<const double> samples, double z, double ci_multiplier = 3.0);
/// Same, for samples sorted ascending (binary search).
TailEstimate empirical_tail_sorted(std::span<const double> sorted, double z, double ci_multiplier = 3.0);

/// n_trials draws of Y_t = sum t_i X_i; trial j uses substream j of (seed, stream).
std::vector<double> sample_canonical(std::span<const RandomModel> models, const CoefficientVector& t,
                                     std::int64_t n_trials, std::uint64_t seed, std::uint64_t stream = 0);
std::vector<double> sample_canonical(const RandomModel& model, const CoefficientVector& t, std::int64_t n_trials,
                                     std::uint64_t seed, std::uint64_t stream = 0);

/// N(0,1) coefficients from the reserved last substream of (seed, stream).
CoefficientVector random_coefficients(int n, std::uint64_t seed, std::uint64_t stream);

enum class BoundKind { general, iid, randomized, functional_sum };

std::string_view to_string(BoundKind kind) noexcept;
BoundKind parse_bound_kind(std::string_view text);

/// Campaign description. Grid used per bound kind:
///   general        (v, s) over v_grid x s_grid, threshold 2 s K N_v(t)
///   iid            z over z_grid
///   randomized     alpha over alpha_grid
///   functional_sum t over z_grid, f = sum of `dimension` coordinates of model
struct CampaignConfig {
  std::string model = "gaussian:1";
  BoundKind bound = BoundKind::general;
  std::string phi = "quadratic";
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  double ci_multiplier = 3.0;
  /// Multiplies the threshold at which the empirical tail is measured (not the bound).
  double threshold_scale = 1.0;
  std::vector<double> t;  ///< explicit coefficients; empty means `dimension` random ones
  int dimension = 20;
  std::vector<double> v_grid{1.0, 2.0, 4.0};
  std::vector<double> s_grid{1.0, 2.0};
  std::vector<double> z_grid{1.0, 2.0, 4.0, 8.0};
  std::vector<double> alpha_grid{0.1, 0.01};
  std::optional<double> K;
  std::optional<double> K1;
  std::optional<double> K2;
  double c = 1.0;
  double C = 4.0;
  int n_summands = 10;
  TauMode mode = TauMode::sum;

  void validate() const;
  /// Canonical `key = value` text; identical configs give identical text.
  std::string canonical() const;
  std::string hash() const;

  static CampaignConfig from_kv(const KeyValueConfig& kv);
  static CampaignConfig load(const std::string& path);
};

struct GridPoint {
  std::map<std::string, double> params;
  double threshold = 0.0;
  TailEstimate tail;
  double bound = 0.0;
  bool dominated = false;
  double p_value = 1.0;  ///< P(Binomial(n, bound) >= count)

  bool operator==(const GridPoint&) const = default;
};

struct CampaignSummary {
  std::int64_t points = 0;
  std::int64_t violations = 0;
  double worst_margin = 0.0;  ///< min over points of bound - ci_high

  bool operator==(const CampaignSummary&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string config_hash;

  bool operator==(const Provenance&) const = default;
};

struct CampaignResult {
  std::string bound;
  std::string model;
  std::int64_t trials = 0;
  std::map<std::string, double> constants;
  std::vector<GridPoint> points;
  CampaignSummary summary;
  Provenance provenance;

  bool all_dominated() const noexcept { return summary.violations == 0; }
  bool operator==(const CampaignResult&) const = default;
};

/// Runs the campaign and marks each point dominated iff bound >= ci_high.
CampaignResult verify_dominance(const CampaignConfig& config);

struct Calibration {
  std::string constant;
  double value = 0.0;
  bool at_cap = false;
  std::vector<std::map<std::string, double>> grid;
};

/// Largest c (iid), smallest C (randomized) or smallest K (general) in
/// [1e-4, 1e4] with every grid point dominated; bisection in log space.
Calibration calibrate_constant(const CampaignConfig& config, std::string_view constant);

}  // namespace phib
