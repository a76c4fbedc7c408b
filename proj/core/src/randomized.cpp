#include "phibound/randomized.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "phibound/errors.hpp"
#include "phibound/montecarlo.hpp"
#include "phibound/norms.hpp"

namespace phib {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

MarkovCheck randomized_markov_check(const RandomModel& model, double a, std::int64_t n_trials, std::uint64_t seed,
                                    std::uint64_t stream) {
  if (!(a > 0.0)) throw BoundError(ErrorKind::domain, "randomized Markov needs a > 0");
  if (n_trials < 2) throw BoundError(ErrorKind::domain, "randomized Markov needs at least 2 trials");
  double hits = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < n_trials; ++i) {
    CounterRng rng(seed, stream, static_cast<std::uint32_t>(i));
    const double x = model.sample(rng);
    if (x < 0.0) {
      throw BoundError(ErrorKind::precondition, "randomized Markov needs X >= 0; drew " + num(x) + " from " + model.name());
    }
    const double u = rng.uniform();
    if (x >= u / a) hits += 1.0;
    const double m = std::min(a * x, 1.0);
    sum += m;
    sum_sq += m * m;
  }
  const double n = static_cast<double>(n_trials);
  MarkovCheck r;
  r.lhs = hits / n;
  r.rhs = sum / n;
  r.lhs_se = std::sqrt(r.lhs * (1.0 - r.lhs) / n);
  const double var = std::max(0.0, (sum_sq - n * r.rhs * r.rhs) / (n - 1.0));
  r.rhs_se = std::sqrt(var / n);
  const double se = std::hypot(r.lhs_se, r.rhs_se);
  const double diff = std::abs(r.lhs - r.rhs);
  r.z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  r.passed = r.z <= 3.0;
  return r;
}

double randomized_hoeffding_threshold(double alpha, double tau, const OrliczFunction& phi, double C, double u) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw BoundError(ErrorKind::domain, "alpha must lie in (0,1), got " + num(alpha));
  if (!(u > 0.0 && u <= 1.0)) throw BoundError(ErrorKind::domain, "u must lie in (0,1], got " + num(u));
  if (!(C > 0.0)) throw BoundError(ErrorKind::domain, "C must be > 0, got " + num(C));
  if (!(tau > 0.0) || !std::isfinite(tau)) throw BoundError(ErrorKind::domain, "tau must be finite and > 0, got " + num(tau));
  const double L = std::log(1.0 / alpha);
  return C * tau * (2.0 * L + std::log(u)) / phi.inverse(L);
}

double classical_threshold(double alpha, double tau, const OrliczFunction& phi, double C) {
  return randomized_hoeffding_threshold(alpha, tau, phi, C, 1.0);
}

std::string_view to_string(TauMode mode) noexcept { return mode == TauMode::sum ? "sum" : "summand"; }

TauMode parse_tau_mode(std::string_view text) {
  if (text == "sum") return TauMode::sum;
  if (text == "summand") return TauMode::summand;
  throw ConfigError("unknown tau mode '" + std::string(text) + "' (expected sum or summand)");
}

RandomizedCampaign randomized_validity_campaign(const RandomModel& model, const OrliczFunction& phi,
                                                const RandomizedCampaignSpec& spec) {
  if (spec.n_trials < 10000) throw BoundError(ErrorKind::precondition, "randomized campaign needs >= 10^4 trials");
  if (spec.n_summands < 1) throw BoundError(ErrorKind::domain, "randomized campaign needs >= 1 summand");
  const RandomModel centred = model.centered();
  const double tau = spec.mode == TauMode::sum ? tau_phi_norm(centred.iid_sum(spec.n_summands), phi).value
                                               : tau_phi_norm(centred, phi).value;
  const double mean = model.mean();
  const double classical = classical_threshold(spec.alpha, tau, phi, spec.C);
  const double L = std::log(1.0 / spec.alpha);
  const double scale = spec.C * tau / phi.inverse(L);

  RandomizedCampaign r;
  r.alpha = spec.alpha;
  r.C = spec.C;
  r.mode = spec.mode;
  r.n_summands = spec.n_summands;
  r.tau = tau;
  r.trials = spec.n_trials;
  r.classical_threshold = classical;
  r.expected_difference = -scale;

  double thr_sum = 0.0;
  double diff_sum = 0.0;
  double diff_sq = 0.0;
  for (std::int64_t i = 0; i < spec.n_trials; ++i) {
    CounterRng rng(spec.seed, spec.stream, static_cast<std::uint32_t>(i));
    double s = 0.0;
    for (int j = 0; j < spec.n_summands; ++j) s += model.sample(rng) - mean;
    const double u = rng.uniform();
    const double thr = randomized_hoeffding_threshold(spec.alpha, tau, phi, spec.C, u);
    if (s >= thr) ++r.violations;
    thr_sum += thr;
    const double d = thr - classical;
    diff_sum += d;
    diff_sq += d * d;
  }
  const double n = static_cast<double>(spec.n_trials);
  r.mean_randomized_threshold = thr_sum / n;
  r.mean_difference = diff_sum / n;
  r.difference_se = std::sqrt(std::max(0.0, (diff_sq - n * r.mean_difference * r.mean_difference) / (n - 1.0)) / n);
  const Interval ci = clopper_pearson(r.violations, r.trials, confidence_for_multiplier(spec.ci_multiplier));
  r.ci_low = ci.lo;
  r.ci_high = ci.hi;
  return r;
}

}  // namespace phib
