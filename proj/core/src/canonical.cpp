#include "phibound/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "phibound/errors.hpp"

namespace phib {

namespace {

constexpr double kConstraintTol = 1e-10;
constexpr int kFallbackUnits = 4000;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

void check_finite(const CoefficientVector& t) {
  for (double x : t.entries) {
    if (!std::isfinite(x)) throw BoundError(ErrorKind::domain, "coefficient vector has a non-finite entry");
  }
}

struct Evaluation {
  std::vector<double> b;
  double constraint = 0.0;
};

Evaluation at_multiplier(std::span<const OrliczFunction> phis, const CoefficientVector& t, double mu) {
  Evaluation e;
  e.b.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.entries[i] == 0.0) continue;
    const double mag = phis[i].derivative_inverse(std::abs(t.entries[i]) / mu);
    e.b[i] = sgn(t.entries[i]) * mag;
    e.constraint += phis[i](mag);
  }
  return e;
}

double objective(const CoefficientVector& t, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += t.entries[i] * b[i];
  return s;
}

/// Greedy allocation of v in kFallbackUnits equal slices: each slice goes to
/// the coordinate whose |t_i| phi_i^{-1} gains most. Exact on the
/// discretisation when every phi_i^{-1} is concave.
NvSolution greedy_fallback(std::span<const OrliczFunction> phis, const CoefficientVector& t, double v) {
  const std::size_t n = t.size();
  const double unit = v / kFallbackUnits;
  std::vector<double> spent(n, 0.0);
  std::vector<double> mag(n, 0.0);
  for (int k = 0; k < kFallbackUnits; ++k) {
    std::size_t best = n;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t.entries[i] == 0.0) continue;
      const double gain = std::abs(t.entries[i]) * (phis[i].inverse(spent[i] + unit) - mag[i]);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == n) break;
    spent[best] += unit;
    mag[best] = phis[best].inverse(spent[best]);
  }
  NvSolution s;
  s.budget = v;
  s.fallback = true;
  s.active = true;
  s.maximizer.resize(n);
  double mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.maximizer[i] = sgn(t.entries[i]) * mag[i];
    if (mag[i] > 0.0) {
      const double d = phis[i].derivative(mag[i]);
      if (d > 0.0) mu = std::max(mu, std::abs(t.entries[i]) / d);
    }
  }
  s.multiplier = mu;
  s.value = objective(t, s.maximizer);
  return s;
}

}  // namespace

double CoefficientVector::l1() const noexcept {
  double s = 0.0;
  for (double x : entries) s += std::abs(x);
  return s;
}

double CoefficientVector::l2() const noexcept {
  double s = 0.0;
  for (double x : entries) s = std::hypot(s, x);
  return s;
}

CoefficientVector CoefficientVector::parse(std::string_view row) {
  CoefficientVector t;
  std::string field;
  std::istringstream in{std::string(row)};
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    if (first == std::string::npos) throw ConfigError("empty entry in coefficient row '" + std::string(row) + "'");
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(field.substr(first), &used);
    } catch (const std::exception&) {
      throw ConfigError("bad coefficient '" + field + "'");
    }
    if (field.find_first_not_of(" \t\r", first + used) != std::string::npos || !std::isfinite(x)) {
      throw ConfigError("bad coefficient '" + field + "'");
    }
    t.entries.push_back(x);
  }
  if (t.entries.empty()) throw ConfigError("empty coefficient row");
  return t;
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::general: return "general";
    case Regime::iid_orlicz: return "iid-orlicz";
    case Regime::iid_quadratic: return "iid-quadratic";
    case Regime::min_of_both: return "min-of-both";
  }
  return "unknown";
}

NvSolution solve_nv(std::span<const OrliczFunction> phis, const CoefficientVector& t, double v) {
  if (phis.size() != t.size()) {
    throw BoundError(ErrorKind::domain, "solve_nv: " + std::to_string(phis.size()) + " functions for " +
                                            std::to_string(t.size()) + " coefficients");
  }
  if (!(v >= 0.0) || !std::isfinite(v)) throw BoundError(ErrorKind::domain, "solve_nv: budget v must be finite and >= 0");
  check_finite(t);

  NvSolution s;
  s.budget = v;
  s.maximizer.assign(t.size(), 0.0);
  const bool all_zero = std::all_of(t.entries.begin(), t.entries.end(), [](double x) { return x == 0.0; });
  if (v == 0.0 || all_zero) {
    s.active = v == 0.0;
    return s;
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.entries[i] != 0.0 && !phis[i].strictly_convex()) return greedy_fallback(phis, t, v);
  }

  // At mu_low the coordinate attaining the max alone spends the whole budget.
  double mu_low = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.entries[i] == 0.0) continue;
    const double cap = phis[i].inverse(v);
    mu_low = std::max(mu_low, std::abs(t.entries[i]) / phis[i].derivative(cap));
  }
  double mu_high = mu_low;
  Evaluation hi = at_multiplier(phis, t, mu_high);
  while (hi.constraint > v) {
    mu_high *= 2.0;
    hi = at_multiplier(phis, t, mu_high);
  }
  Evaluation lo = at_multiplier(phis, t, mu_low);
  // Bisect to the resolution of mu itself; kConstraintTol only decides `active`.
  for (int it = 0; it < 300; ++it) {
    if (hi.constraint == v) break;
    if (mu_high / mu_low - 1.0 <= 4e-16) break;
    const double mid = std::sqrt(mu_low * mu_high);
    Evaluation e = at_multiplier(phis, t, mid);
    if (e.constraint > v) {
      mu_low = mid;
      lo = std::move(e);
    } else {
      mu_high = mid;
      hi = std::move(e);
    }
  }
  s.maximizer = std::move(hi.b);
  s.multiplier = mu_high;
  s.value = objective(t, s.maximizer);
  s.active = v - hi.constraint <= kConstraintTol * v;
  if (!s.active && lo.constraint > v) {
    // Bisection collapsed with the constraint still slack; accept the tighter bracket end.
    s.active = true;
  }
  return s;
}

NvSolution solve_nv(const OrliczFunction& phi, const CoefficientVector& t, double v) {
  const std::vector<OrliczFunction> phis(t.size(), phi);
  return solve_nv(phis, t, v);
}

double nv_brute_force(std::span<const OrliczFunction> phis, const CoefficientVector& t, double v, double grid_step) {
  const std::size_t n = t.size();
  if (n > 4) throw BoundError(ErrorKind::refusal, "nv_brute_force grids grow exponentially; n = " + std::to_string(n) + " > 4");
  if (phis.size() != n) throw BoundError(ErrorKind::domain, "nv_brute_force: size mismatch");
  if (!(v >= 0.0)) throw BoundError(ErrorKind::domain, "nv_brute_force: v must be >= 0");
  if (!(grid_step > 0.0)) throw BoundError(ErrorKind::domain, "nv_brute_force: grid step must be > 0");
  check_finite(t);
  if (n == 0 || v == 0.0) return 0.0;

  // Matching sign(b_i) to sign(t_i) never costs budget, so only |b_i| is scanned.
  // The coordinate that spends the remainder should have a cheap inverse.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    if (phis[i].has_analytic_inverse()) {
      std::swap(order[i], order[n - 1]);
      break;
    }
  }
  std::vector<long> steps(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    steps[j] = static_cast<long>(std::floor(phis[order[j]].inverse(v) / grid_step));
  }

  double best = 0.0;
  const auto scan = [&](auto&& self, std::size_t j, double spent, double partial) -> void {
    const std::size_t i = order[j];
    const double ti = std::abs(t.entries[i]);
    if (j + 1 == n) {
      const double rest = v - spent;
      if (rest < 0.0) return;
      const double last = ti == 0.0 ? 0.0 : phis[i].inverse(rest);
      best = std::max(best, partial + ti * last);
      return;
    }
    if (ti == 0.0) {
      self(self, j + 1, spent, partial);
      return;
    }
    for (long k = 0; k <= steps[j]; ++k) {
      const double bi = static_cast<double>(k) * grid_step;
      const double cost = spent + phis[i](bi);
      if (cost > v) break;
      self(self, j + 1, cost, partial + ti * bi);
    }
  };
  scan(scan, 0, 0.0, 0.0);
  return best;
}

BoundReport tail_bound_general(const NvSolution& nv, double s, double K) {
  if (!(s >= 1.0)) throw BoundError(ErrorKind::domain, "tail_bound_general needs s >= 1, got " + num(s));
  if (!(K > 0.0)) throw BoundError(ErrorKind::domain, "tail_bound_general needs K > 0, got " + num(K));
  BoundReport r;
  r.threshold = 2.0 * s * K * nv.value;
  r.probability_bound = std::exp(-nv.budget * s);
  r.constants = {{"K", K}, {"s", s}, {"v", nv.budget}, {"N_v", nv.value}};
  r.regime = Regime::general;
  return r;
}

BoundReport tail_bound_iid(double z, const CoefficientVector& t, const OrliczFunction& phi, double K1, double K2,
                           double c) {
  if (!(z > 0.0)) throw BoundError(ErrorKind::domain, "tail_bound_iid needs z > 0, got " + num(z));
  if (!(K1 > 0.0) || !(K2 > 0.0)) throw BoundError(ErrorKind::domain, "tail_bound_iid needs K1, K2 > 0");
  if (!(c > 0.0)) throw BoundError(ErrorKind::domain, "tail_bound_iid needs c > 0");
  check_finite(t);
  const double l1 = t.l1();
  const double l2 = t.l2();
  if (!(l1 > 0.0)) throw BoundError(ErrorKind::domain, "tail_bound_iid needs a nonzero coefficient vector");
  const double orlicz_term = phi(z / (K1 * l1));
  const double quad_term = (z * z) / (K2 * K2 * l2 * l2);
  const double m = std::min(orlicz_term, quad_term);
  BoundReport r;
  r.threshold = z;
  r.probability_bound = std::clamp(std::exp(-c * m), 0.0, 1.0);
  if (std::abs(orlicz_term - quad_term) <= 1e-12 * std::max(orlicz_term, quad_term)) {
    r.regime = Regime::min_of_both;
  } else {
    r.regime = orlicz_term < quad_term ? Regime::iid_orlicz : Regime::iid_quadratic;
  }
  r.constants = {{"K1", K1},         {"K2", K2},       {"c", c},
                 {"z", z},           {"t_l1", l1},     {"t_l2", l2},
                 {"orlicz_exponent", orlicz_term}, {"quadratic_exponent", quad_term}};
  return r;
}

BvMomentReport bv_moment_check(std::span<const double> samples, double v, double K, double u, double cap) {
  if (samples.empty()) throw BoundError(ErrorKind::domain, "bv_moment_check needs samples");
  if (!(v >= 1.0)) throw BoundError(ErrorKind::domain, "bv_moment_check needs v >= 1");
  if (!(u >= 1.0)) throw BoundError(ErrorKind::domain, "bv_moment_check needs u >= 1");
  if (!(K > 0.0)) throw BoundError(ErrorKind::domain, "bv_moment_check needs K > 0");
  const double scale = 1.0 / (2.0 * u * K);
  double acc = 0.0;
  for (double y : samples) acc += std::pow(std::abs(y) * scale, v);
  BvMomentReport r;
  r.scaled_norm = std::pow(acc / static_cast<double>(samples.size()), 1.0 / v);
  r.l_hat = r.scaled_norm / u;
  r.cap = cap;
  r.passed = r.l_hat <= cap;
  return r;
}

}  // namespace phib
