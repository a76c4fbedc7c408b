#include "phibound/norms.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "phibound/errors.hpp"

namespace phib {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (points - 1));
  grid.back() = hi;
  return grid;
}

template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iterations = 100) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Maximises ratio(lambda) over +-grid and refines in log|lambda| around the
/// winner. Returns (value, argmax lambda with sign).
template <typename Ratio>
std::pair<double, double> sup_over_lambda(Ratio&& ratio, const std::vector<double>& grid) {
  double best = -1.0;
  double best_lambda = grid.front();
  std::size_t best_idx = 0;
  double best_sign = 1.0;
  for (double sign : {1.0, -1.0}) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = ratio(sign * grid[i]);
      if (r > best) {
        best = r;
        best_lambda = sign * grid[i];
        best_idx = i;
        best_sign = sign;
      }
    }
  }
  if (grid.size() >= 3) {
    const std::size_t lo_idx = best_idx == 0 ? 0 : best_idx - 1;
    const std::size_t hi_idx = std::min(best_idx + 1, grid.size() - 1);
    const auto in_log = [&](double u) { return ratio(best_sign * std::exp(u)); };
    const auto [u, r] = golden_max(in_log, std::log(grid[lo_idx]), std::log(grid[hi_idx]));
    if (r > best) {
      best = r;
      best_lambda = best_sign * std::exp(u);
    }
  }
  return {std::max(best, 0.0), best_lambda};
}

void check_search(const TauSearch& s) {
  if (!(s.lambda_min > 0.0) || !(s.lambda_max > s.lambda_min) || !std::isfinite(s.lambda_max) || s.grid_points < 2) {
    throw BoundError(ErrorKind::domain, "lambda search range must satisfy 0 < min < max < inf with >= 2 points");
  }
}

double mgf_ratio(const RandomModel& model, const OrliczFunction& phi, double lambda) {
  const double l = model.log_mgf(lambda);
  if (std::isinf(l) || std::isnan(l)) {
    throw BoundError(ErrorKind::heavy_tail,
                     "log-MGF of " + model.name() + " diverges at lambda = " + num(lambda) + " inside the search range");
  }
  if (l <= 0.0) return 0.0;
  return phi.inverse(l) / std::abs(lambda);
}

}  // namespace

std::string_view to_string(NormMethod method) noexcept {
  switch (method) {
    case NormMethod::analytic: return "analytic";
    case NormMethod::mgf_grid: return "mgf-grid";
    case NormMethod::sample_plug_in: return "sample-plug-in";
    case NormMethod::moment_grid: return "moment-grid";
    case NormMethod::bisection: return "bisection";
  }
  return "unknown";
}

NormEstimate tau_phi_norm(const RandomModel& model, const OrliczFunction& phi, const TauSearch& search) {
  check_search(search);
  if (search.require_centered && !model.is_centered()) {
    throw BoundError(ErrorKind::precondition, "tau_phi needs a centred model; " + model.name() +
                                                  " has mean " + num(model.mean()));
  }
  if (!model.has_analytic_mgf()) {
    throw BoundError(ErrorKind::unsupported, model.name() + " has no analytic MGF; use tau_phi_norm_empirical");
  }
  if (model.family() == RandomModel::Family::gaussian) {
    // log E e^{lambda X} = lambda^2 sigma^2 / 2, so the ratio is constant in lambda.
    const double sigma = std::sqrt(2.0 * model.log_mgf(1.0));
    if (phi.kind() == OrliczKind::quadratic) return {sigma, NormMethod::analytic, std::nullopt, 0.0, {}};
    if (phi.kind() == OrliczKind::scaled_quadratic) {
      return {sigma / std::sqrt(2.0), NormMethod::analytic, std::nullopt, 0.0, {}};
    }
  }
  if (auto f = model.finite_support(); f && f->values.size() == 1 && f->values[0] == 0.0) {
    return {0.0, NormMethod::analytic, std::nullopt, 0.0, {}};
  }
  const auto grid = log_grid(search.lambda_min, search.lambda_max, search.grid_points);
  const auto [value, argmax] =
      sup_over_lambda([&](double lambda) { return mgf_ratio(model, phi, lambda); }, grid);
  return {value, NormMethod::mgf_grid, Interval{search.lambda_min, search.lambda_max}, argmax, {}};
}

NormEstimate tau_phi_inf_form(const RandomModel& model, const OrliczFunction& phi, const TauSearch& search) {
  check_search(search);
  if (search.require_centered && !model.is_centered()) {
    throw BoundError(ErrorKind::precondition, "tau_phi needs a centred model");
  }
  const auto grid = log_grid(search.lambda_min, search.lambda_max, search.grid_points);
  std::vector<double> lambdas;
  std::vector<double> logs;
  for (double sign : {1.0, -1.0}) {
    for (double g : grid) {
      const double l = model.log_mgf(sign * g);
      if (!std::isfinite(l)) {
        throw BoundError(ErrorKind::heavy_tail, "log-MGF diverges at lambda = " + num(sign * g));
      }
      lambdas.push_back(sign * g);
      logs.push_back(l);
    }
  }
  const auto feasible = [&](double a) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double bound = phi(a * lambdas[i]);
      if (logs[i] > bound + 1e-14 * std::abs(bound)) return false;
    }
    return true;
  };
  if (feasible(0.0)) return {0.0, NormMethod::bisection, Interval{search.lambda_min, search.lambda_max}, 0.0, {}};
  double hi = 1.0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > 1e300) throw BoundError(ErrorKind::heavy_tail, "no finite a dominates the log-MGF on the grid");
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, NormMethod::bisection, Interval{search.lambda_min, search.lambda_max}, 0.0, {}};
}

NormEstimate tau_phi_norm_empirical(std::span<const double> samples, const OrliczFunction& phi,
                                    Interval lambda_range, int grid_points) {
  if (samples.size() < 1000) {
    throw BoundError(ErrorKind::precondition,
                     "plug-in tau_phi needs >= 1000 samples, got " + std::to_string(samples.size()));
  }
  check_search({lambda_range.lo, lambda_range.hi, grid_points, false});
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  std::vector<double> centred(samples.size());
  double max_abs = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    centred[i] = samples[i] - mean;
    max_abs = std::max(max_abs, std::abs(centred[i]));
  }
  const auto grid = log_grid(lambda_range.lo, lambda_range.hi, grid_points);
  if (lambda_range.hi * max_abs > 700.0) {
    // Report the first grid lambda at which a raw exponential would overflow.
    double offending = lambda_range.hi;
    for (double g : grid) {
      if (g * max_abs > 700.0) {
        offending = g;
        break;
      }
    }
    throw BoundError(ErrorKind::range_too_wide,
                     "plug-in exponential overflows at lambda = " + num(offending) + " (max |x| = " + num(max_abs) + ")");
  }
  const double inv_n = 1.0 / static_cast<double>(centred.size());
  const auto ratio = [&](double lambda) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : centred) mx = std::max(mx, lambda * x);
    double s = 0.0;
    for (double x : centred) s += std::exp(lambda * x - mx);
    const double l = mx + std::log(s * inv_n);
    if (l <= 0.0) return 0.0;
    return phi.inverse(l) / std::abs(lambda);
  };
  if (max_abs == 0.0) {
    return {0.0, NormMethod::sample_plug_in, lambda_range, 0.0, "lower estimate — plug-in MGF"};
  }
  const auto [value, argmax] = sup_over_lambda(ratio, grid);
  return {value, NormMethod::sample_plug_in, lambda_range, argmax, "lower estimate — plug-in MGF"};
}

NormEstimate moment_orlicz_norm(const RandomModel& model, const OrliczFunction& phi, double p_max) {
  if (!(p_max >= 1.0) || !std::isfinite(p_max)) throw BoundError(ErrorKind::domain, "p_max must be finite and >= 1");
  const double at_one = phi.inverse(1.0);
  if (std::abs(at_one - 1.0) > 1e-9) {
    throw BoundError(ErrorKind::normalization, "moment-ratio norm needs phi^{-1}(1) = 1 but " + phi.name() +
                                                   " gives " + num(at_one) + "; rescale phi");
  }
  if (!model.has_analytic_moments()) {
    throw BoundError(ErrorKind::unsupported, "no absolute moments available for " + model.name());
  }
  const auto ratio = [&](double p) {
    const double m = model.abs_moment(p);
    if (m <= 0.0) return 0.0;
    return std::pow(m, 1.0 / p) / phi.inverse(p);
  };
  std::vector<double> ps;
  for (double p = 1.0; p < p_max; p += 0.25) ps.push_back(p);
  ps.push_back(p_max);
  double best = -1.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double r = ratio(ps[i]);
    if (r > best) {
      best = r;
      best_idx = i;
    }
  }
  double argmax = ps[best_idx];
  if (ps.size() >= 3) {
    const std::size_t lo = best_idx == 0 ? 0 : best_idx - 1;
    const std::size_t hi = std::min(best_idx + 1, ps.size() - 1);
    const auto [p, r] = golden_max(ratio, ps[lo], ps[hi]);
    if (r > best) {
      best = r;
      argmax = p;
    }
  }
  return {std::max(best, 0.0), NormMethod::moment_grid, Interval{1.0, p_max}, argmax, {}};
}

namespace {

template <typename MeanExp>
NormEstimate psi_one_by_bisection(MeanExp&& mean_exp, double threshold) {
  if (!(threshold > 1.0)) throw BoundError(ErrorKind::domain, "psi_1 threshold must exceed 1");
  const auto ok = [&](double t) { return mean_exp(1.0 / t) <= threshold; };
  double hi = 1.0;
  double lo = 0.0;
  if (ok(hi)) {
    lo = 0.5;
    while (ok(lo)) {
      lo *= 0.5;
      if (lo < 1e-300) return {0.0, NormMethod::bisection, std::nullopt, 0.0, {}};
    }
    hi = 2.0 * lo;
  } else {
    while (!ok(hi)) {
      hi *= 2.0;
      if (hi > 1e6) {
        throw BoundError(ErrorKind::divergence, "E exp(|X|/t) exceeds " + num(threshold) + " for every t <= 1e6");
      }
    }
    lo = 0.5 * hi;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, NormMethod::bisection, std::nullopt, 0.0, {}};
}

}  // namespace

NormEstimate exp_orlicz_norm(const RandomModel& model, double threshold) {
  return psi_one_by_bisection([&model](double s) { return model.exp_abs_moment(s); }, threshold);
}

NormEstimate exp_orlicz_norm(std::span<const double> samples, double threshold) {
  if (samples.empty()) throw BoundError(ErrorKind::domain, "psi_1 norm needs at least one sample");
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  return psi_one_by_bisection(
      [&](double s) {
        double acc = 0.0;
        for (double x : samples) acc += std::exp(s * std::abs(x));
        return acc * inv_n;
      },
      threshold);
}

CheckReport centering_inflation_check(const RandomModel& model, const OrliczFunction& phi, const TauSearch& search) {
  TauSearch centred_search = search;
  centred_search.require_centered = true;
  TauSearch raw_search = search;
  raw_search.require_centered = false;
  const double lhs = tau_phi_norm(model.centered(), phi, centred_search).value;
  const double rhs = tau_phi_norm(model, phi, raw_search).value;
  CheckReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.passed = lhs <= 2.0 * rhs + 1e-6;
  r.detail = "||X - EX|| = " + num(lhs) + ", 2||X|| = " + num(2.0 * rhs);
  return r;
}

std::vector<double> read_samples_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(line, &used);
      if (line.find_first_not_of(" \t", used) != std::string::npos) {
        throw ConfigError("samples csv line " + std::to_string(line_no) + ": expected one column");
      }
      out.push_back(v);
    } catch (const std::invalid_argument&) {
      if (out.empty() && line_no == 1) continue;
      throw ConfigError("samples csv line " + std::to_string(line_no) + ": not numeric");
    } catch (const std::out_of_range&) {
      throw ConfigError("samples csv line " + std::to_string(line_no) + ": out of range");
    }
  }
  return out;
}

void write_samples_csv(std::ostream& out, std::span<const double> samples) {
  out << "x\n" << std::setprecision(17);
  for (double x : samples) out << x << '\n';
}

}  // namespace phib
