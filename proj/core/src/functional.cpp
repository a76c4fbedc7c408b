#include "phibound/functional.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <nlohmann/json.hpp>

#include "phibound/errors.hpp"
#include "phibound/norms.hpp"

namespace phib {

namespace {

constexpr double kE = std::numbers::e;
constexpr std::uint64_t kEnumerationLimit = 1000000;

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

/// Calls visit(x, p) for every support point, last coordinate fastest.
template <typename Visit>
void enumerate(const std::vector<FiniteDistribution>& coords, Visit&& visit) {
  const std::size_t n = coords.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = coords[i].values[0];
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= coords[i].probs[idx[i]];
    visit(std::span<const double>(x), p);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < coords[pos].values.size()) {
        x[pos] = coords[pos].values[idx[pos]];
        break;
      }
      idx[pos] = 0;
      x[pos] = coords[pos].values[0];
      if (pos == 0) return;
    }
    if (n == 0) return;
  }
}

void require_enumerable(const DiscreteFunctionModel& fm) {
  const auto size = fm.grid_size();
  if (size > kEnumerationLimit) {
    throw BoundError(ErrorKind::refusal, "support grid has " + std::to_string(size) + " points; limit is 1000000");
  }
}

}  // namespace

DiscreteFunctionModel::DiscreteFunctionModel(std::vector<FiniteDistribution> coordinates, Fn f, std::string name)
    : coords_(std::move(coordinates)), f_(std::move(f)), name_(std::move(name)) {
  for (const auto& c : coords_) {
    if (c.values.empty()) throw BoundError(ErrorKind::domain, "coordinate support must be nonempty");
    c.validate();
  }
  if (!f_) throw BoundError(ErrorKind::domain, "function model needs a callable");
}

DiscreteFunctionModel DiscreteFunctionModel::sum(std::vector<FiniteDistribution> coordinates) {
  return {std::move(coordinates),
          [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v;
            return s;
          },
          "sum"};
}

DiscreteFunctionModel DiscreteFunctionModel::product(std::vector<FiniteDistribution> coordinates) {
  return {std::move(coordinates),
          [](std::span<const double> x) {
            double s = 1.0;
            for (double v : x) s *= v;
            return s;
          },
          "product"};
}

DiscreteFunctionModel DiscreteFunctionModel::constant(std::vector<FiniteDistribution> coordinates, double c) {
  return {std::move(coordinates), [c](std::span<const double>) { return c; }, "constant"};
}

DiscreteFunctionModel DiscreteFunctionModel::coordinate(std::vector<FiniteDistribution> coordinates, int k) {
  if (k < 0 || k >= static_cast<int>(coordinates.size())) {
    throw BoundError(ErrorKind::domain, "coordinate index " + std::to_string(k) + " out of range");
  }
  const auto slot = static_cast<std::size_t>(k);
  return {std::move(coordinates), [slot](std::span<const double> x) { return x[slot]; },
          "coordinate:" + std::to_string(k)};
}

DiscreteFunctionModel DiscreteFunctionModel::tabulated(std::vector<FiniteDistribution> coordinates,
                                                       std::vector<double> table) {
  std::uint64_t size = 1;
  for (const auto& c : coordinates) size *= c.values.size();
  if (table.size() != size) {
    throw BoundError(ErrorKind::domain, "table has " + std::to_string(table.size()) + " entries, grid has " +
                                            std::to_string(size));
  }
  // Look values up by their support index in each coordinate.
  auto coords_copy = coordinates;
  return {std::move(coordinates),
          [coords_copy, table = std::move(table)](std::span<const double> x) {
            std::size_t flat = 0;
            for (std::size_t i = 0; i < coords_copy.size(); ++i) {
              const auto& vals = coords_copy[i].values;
              const auto it = std::find(vals.begin(), vals.end(), x[i]);
              if (it == vals.end()) throw BoundError(ErrorKind::domain, "point outside the tabulated support");
              flat = flat * vals.size() + static_cast<std::size_t>(it - vals.begin());
            }
            return table[flat];
          },
          "tabulated"};
}

DiscreteFunctionModel DiscreteFunctionModel::from_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("function model json: ") + e.what());
  }
  try {
    std::vector<FiniteDistribution> coords;
    for (const auto& c : j.at("coordinates")) {
      coords.push_back({c.at("values").get<std::vector<double>>(), c.at("probs").get<std::vector<double>>()});
    }
    const std::string f = j.at("f").get<std::string>();
    if (f == "sum") return sum(std::move(coords));
    if (f == "product") return product(std::move(coords));
    if (f == "constant") return constant(std::move(coords), j.at("constant").get<double>());
    if (f == "coordinate") return coordinate(std::move(coords), j.at("coordinate").get<int>());
    if (f == "tabulated") return tabulated(std::move(coords), j.at("table").get<std::vector<double>>());
    throw ConfigError("function model json: unknown f '" + f + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("function model json: ") + e.what());
  }
}

std::vector<FiniteDistribution> DiscreteFunctionModel::fair_coins(int n, double a) {
  if (n < 0) throw BoundError(ErrorKind::domain, "coin count must be >= 0");
  return std::vector<FiniteDistribution>(static_cast<std::size_t>(n), FiniteDistribution{{-a, a}, {0.5, 0.5}});
}

std::uint64_t DiscreteFunctionModel::grid_size() const noexcept {
  std::uint64_t size = 1;
  for (const auto& c : coords_) {
    const std::uint64_t k = c.values.size();
    if (size > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
    size *= k;
  }
  return size;
}

FiniteDistribution DiscreteFunctionModel::distribution() const {
  require_enumerable(*this);
  std::map<double, double> mass;
  enumerate(coords_, [&](std::span<const double> x, double p) { mass[f_(x)] += p; });
  FiniteDistribution d;
  for (const auto& [v, p] : mass) {
    d.values.push_back(v);
    d.probs.push_back(p);
  }
  return d;
}

FiniteDistribution centered_conditional(const DiscreteFunctionModel& fm, std::span<const double> x, int k) {
  if (k < 0 || k >= fm.arity()) {
    throw BoundError(ErrorKind::domain, "coordinate index " + std::to_string(k) + " outside [0, " +
                                            std::to_string(fm.arity()) + ")");
  }
  if (static_cast<int>(x.size()) != fm.arity()) throw BoundError(ErrorKind::domain, "point has the wrong arity");
  const auto& law = fm.coordinate_distribution(k);
  std::vector<double> point(x.begin(), x.end());
  FiniteDistribution out;
  out.probs = law.probs;
  out.values.reserve(law.values.size());
  for (double v : law.values) {
    point[static_cast<std::size_t>(k)] = v;
    out.values.push_back(fm(point));
  }
  const double m = out.mean();
  for (double& v : out.values) v -= m;
  return out;
}

double tilted_expectation(std::span<const double> values, std::span<const double> tilts, std::span<const double> probs) {
  if (values.size() != tilts.size() || values.size() != probs.size() || values.empty()) {
    throw BoundError(ErrorKind::domain, "tilted expectation needs equal, nonempty lengths");
  }
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tilts.size(); ++i) {
    if (probs[i] > 0.0) shift = std::max(shift, tilts[i]);
  }
  double num_acc = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double w = probs[i] * std::exp(tilts[i] - shift);
    num_acc += w * values[i];
    den += w;
  }
  return num_acc / den;
}

double tilted_variance(const FiniteDistribution& dist, double s) {
  std::vector<double> tilts(dist.values.size());
  for (std::size_t i = 0; i < tilts.size(); ++i) tilts[i] = s * dist.values[i];
  const double m = tilted_expectation(dist.values, tilts, dist.probs);
  std::vector<double> sq(dist.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (dist.values[i] - m) * (dist.values[i] - m);
  return tilted_expectation(sq, tilts, dist.probs);
}

CheckReport fe_integral_check(const FiniteDistribution& dist, const OrliczFunction& phi) {
  dist.validate();
  if (std::abs(dist.mean()) > 1e-12) {
    throw BoundError(ErrorKind::precondition, "integral check needs a centred distribution; mean is " + num(dist.mean()));
  }
  const double norm = moment_orlicz_norm(RandomModel::discrete(dist), phi).value;
  if (norm >= 1.0 / kE) {
    throw BoundError(ErrorKind::hypothesis, "moment-ratio norm " + num(norm) + " is not below 1/e");
  }
  using Gauss = boost::math::quadrature::gauss<double, 32>;
  const auto inner = [&](double t) {
    return Gauss::integrate([&](double s) { return tilted_variance(dist, s); }, t, 1.0);
  };
  CheckReport r;
  r.lhs = Gauss::integrate(inner, 0.0, 1.0);
  const double en = kE * norm;
  r.rhs = en * en / ((1.0 - en) * (1.0 - en));
  r.passed = r.lhs <= r.rhs + 1e-6;
  r.detail = "norm " + num(norm) + ": integral " + num(r.lhs) + " vs " + num(r.rhs);
  return r;
}

double m20_rhs(double C1, double a, double t) {
  if (!(C1 > 0.0) || !(a >= 0.0) || !(t > 0.0)) throw BoundError(ErrorKind::domain, "need C1 > 0, a >= 0, t > 0");
  return -t * t / (2.0 * (2.0 * C1 + a * t));
}

double m20_lhs_grid(double C1, double a, double t, int grid_points) {
  if (!(C1 > 0.0) || !(a >= 0.0) || !(t > 0.0)) throw BoundError(ErrorKind::domain, "need C1 > 0, a >= 0, t > 0");
  if (grid_points < 3) throw BoundError(ErrorKind::domain, "need at least 3 grid points");
  const auto f = [&](double beta) { return -beta * t + C1 * beta * beta / (1.0 - a * beta); };
  double upper = 0.0;
  if (a > 0.0) {
    upper = 1.0 / a;
  } else {
    upper = 50.0 / t;
    while (-t + 2.0 * C1 * upper < 0.0) upper *= 2.0;
  }
  // For a > 0 the right end is excluded: the grid stops one step short of 1/a.
  const double step = upper / grid_points;
  int best = 0;
  double best_val = f(0.0);
  const int last = a > 0.0 ? grid_points - 1 : grid_points;
  for (int i = 1; i <= last; ++i) {
    const double val = f(i * step);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  double lo = std::max(0, best - 1) * step;
  double hi = std::min(last, best + 1) * step;
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return std::min({best_val, fc, fd});
}

double med_tail_bound(double t, double A, double B) {
  if (!(t > 0.0)) throw BoundError(ErrorKind::domain, "tail bound needs t > 0");
  if (!(A >= 0.0) || !(B >= 0.0)) throw BoundError(ErrorKind::domain, "tail bound needs A, B >= 0");
  if (A == 0.0 && B == 0.0) return 0.0;
  return std::exp(-t * t / (4.0 * kE * kE * A + 2.0 * kE * B * t));
}

FunctionalBoundInputs functional_norm_inputs(const DiscreteFunctionModel& fm, const OrliczFunction& phi) {
  require_enumerable(fm);
  std::vector<FiniteDistribution> coords;
  for (int k = 0; k < fm.arity(); ++k) coords.push_back(fm.coordinate_distribution(k));
  std::map<std::vector<double>, double> cache;
  const auto norm_of = [&](const FiniteDistribution& d) {
    std::vector<double> key = d.values;
    key.insert(key.end(), d.probs.begin(), d.probs.end());
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double v = 0.0;
    if (std::any_of(d.values.begin(), d.values.end(), [](double x) { return x != 0.0; })) {
      v = moment_orlicz_norm(RandomModel::discrete(d), phi).value;
    }
    cache.emplace(std::move(key), v);
    return v;
  };
  FunctionalBoundInputs in;
  enumerate(coords, [&](std::span<const double> x, double) {
    ++in.points;
    double sum_sq = 0.0;
    for (int k = 0; k < fm.arity(); ++k) {
      const double nk = norm_of(centered_conditional(fm, x, k));
      sum_sq += nk * nk;
      in.B = std::max(in.B, nk);
    }
    in.A = std::max(in.A, sum_sq);
  });
  return in;
}

double confidence_log_term(std::int64_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw BoundError(ErrorKind::domain, "delta must lie in (0,1), got " + num(delta));
  const double L = std::log(1.0 / delta);
  constexpr double kSlack = 1e-12;
  if (L < 1.0 - kSlack) {
    throw BoundError(ErrorKind::domain, "hypothesis ln(1/delta) >= 1 fails: ln(1/delta) = " + num(L));
  }
  if (static_cast<double>(n) < L * (1.0 - kSlack)) {
    throw BoundError(ErrorKind::domain,
                     "hypothesis n >= ln(1/delta) fails: n = " + std::to_string(n) + ", ln(1/delta) = " + num(L));
  }
  return L;
}

double vector_mean_bound(std::int64_t n, double delta, double norm) {
  if (!(norm >= 0.0)) throw BoundError(ErrorKind::domain, "norm must be >= 0");
  const double L = confidence_log_term(n, delta);
  return 6.0 * kE * norm * std::sqrt(L / static_cast<double>(n));
}

}  // namespace phib
