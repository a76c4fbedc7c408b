#include "phibound/models.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "phibound/errors.hpp"

namespace phib {

struct RandomModel::Node {
  Family family = Family::gaussian;
  double a = 0.0;  // sigma, half-width, scale, rate, mixture weight...
  double b = 0.0;
  double c = 0.0;
  int count = 0;
  FiniteDistribution dist;
  std::vector<double> cumulative;
  std::shared_ptr<const Node> child;
};

namespace {

using Family = RandomModel::Family;
using Node = RandomModel::Node;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw BoundError(ErrorKind::domain, std::string(what) + " must be finite and positive, got " + num(v));
  }
}

RandomModel wrap(std::shared_ptr<Node> n) { return RandomModel(std::move(n)); }

double log_sum_exp(const std::vector<double>& logs, const std::vector<double>& weights) {
  double mx = -kInf;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (weights[i] > 0.0) mx = std::max(mx, logs[i]);
  }
  if (std::isinf(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (weights[i] > 0.0) s += weights[i] * std::exp(logs[i] - mx);
  }
  return mx + std::log(s);
}

/// log cosh(u), accurate for small and huge |u|.
double log_cosh(double u) {
  const double au = std::abs(u);
  if (au < 1.0) {
    const double sh = std::sinh(0.5 * au);
    return std::log1p(2.0 * sh * sh);
  }
  return au + std::log1p(std::exp(-2.0 * au)) - std::numbers::ln2;
}

/// log(sinh(u) / u).
double log_sinhc(double u) {
  const double au = std::abs(u);
  if (au < 1e-3) {
    const double u2 = au * au;
    return u2 / 6.0 - u2 * u2 / 180.0;
  }
  if (au < 20.0) return std::log(std::sinh(au) / au);
  return au - std::log(2.0 * au) + std::log1p(-std::exp(-2.0 * au));
}

double gaussian_abs_moment(double sigma, double p) {
  return std::exp(p * std::log(sigma) + 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) -
                  0.5 * std::log(std::numbers::pi));
}

bool is_continuous(const Node& n) {
  switch (n.family) {
    case Family::gaussian:
    case Family::uniform_symmetric:
    case Family::exponential:
    case Family::chi:
    case Family::chi_squared:
    case Family::mixture: return true;
    default: return false;
  }
}

/// Integral of g against the density of a continuous node, split at `kink`.
double integrate_density(const Node& n, const std::function<double(double)>& g, double kink) {
  using boost::math::quadrature::gauss_kronrod;
  std::function<double(double)> density;
  double lo = 0.0;
  double hi = 0.0;
  switch (n.family) {
    case Family::gaussian: {
      const double s = n.a;
      density = [s](double x) { return std::exp(-0.5 * (x / s) * (x / s)) / (s * std::sqrt(2.0 * std::numbers::pi)); };
      lo = -40.0 * s;
      hi = 40.0 * s;
      break;
    }
    case Family::uniform_symmetric: {
      const double a = n.a;
      density = [a](double) { return 0.5 / a; };
      lo = -a;
      hi = a;
      break;
    }
    case Family::exponential: {
      const double r = n.a;
      density = [r](double x) { return r * std::exp(-r * x); };
      hi = 100.0 / r;
      break;
    }
    case Family::chi: {
      const double k = n.count;
      const double s = n.a;
      const double log_norm = (0.5 * k - 1.0) * std::numbers::ln2 + k * std::log(s) + std::lgamma(0.5 * k);
      density = [k, s, log_norm](double r) {
        if (r <= 0.0) return 0.0;
        return std::exp((k - 1.0) * std::log(r) - 0.5 * (r / s) * (r / s) - log_norm);
      };
      hi = s * (std::sqrt(k) + 40.0);
      break;
    }
    case Family::chi_squared: {
      const double k = n.count;
      const double s2 = n.a * n.a;
      const double log_norm = 0.5 * k * std::log(2.0 * s2) + std::lgamma(0.5 * k);
      density = [k, s2, log_norm](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp((0.5 * k - 1.0) * std::log(x) - x / (2.0 * s2) - log_norm);
      };
      hi = s2 * (k + 40.0 * std::sqrt(2.0 * k) + 100.0);
      break;
    }
    case Family::mixture: {
      Node gauss;
      gauss.family = Family::gaussian;
      gauss.a = n.b;
      Node unif;
      unif.family = Family::uniform_symmetric;
      unif.a = n.c;
      return n.a * integrate_density(gauss, g, kink) + (1.0 - n.a) * integrate_density(unif, g, kink);
    }
    default: throw BoundError(ErrorKind::unsupported, "no density for this model family");
  }
  auto integrand = [&](double x) { return g(x) * density(x); };
  auto piece = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    return gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-12);
  };
  if (kink > lo && kink < hi) return piece(lo, kink) + piece(kink, hi);
  return piece(lo, hi);
}

std::optional<FiniteDistribution> finite_of(const Node& n) {
  switch (n.family) {
    case Family::rademacher_scaled:
      if (n.a == 0.0) return FiniteDistribution{{0.0}, {1.0}};
      return FiniteDistribution{{-n.a, n.a}, {0.5, 0.5}};
    case Family::discrete: return n.dist;
    case Family::shifted: {
      auto inner = finite_of(*n.child);
      if (!inner) return std::nullopt;
      for (double& v : inner->values) v += n.b;
      return inner;
    }
    case Family::iid_sum: {
      auto inner = finite_of(*n.child);
      if (!inner) return std::nullopt;
      std::map<double, double> acc{{0.0, 1.0}};
      for (int i = 0; i < n.count; ++i) {
        std::map<double, double> next;
        for (const auto& [v, p] : acc) {
          for (std::size_t j = 0; j < inner->values.size(); ++j) next[v + inner->values[j]] += p * inner->probs[j];
        }
        acc = std::move(next);
        if (acc.size() > 200000) return std::nullopt;
      }
      FiniteDistribution out;
      for (const auto& [v, p] : acc) {
        out.values.push_back(v);
        out.probs.push_back(p);
      }
      return out;
    }
    default: return std::nullopt;
  }
}

double mean_of(const Node& n) {
  switch (n.family) {
    case Family::gaussian:
    case Family::uniform_symmetric:
    case Family::rademacher_scaled:
    case Family::mixture: return 0.0;
    case Family::discrete: return n.dist.mean();
    case Family::exponential: return 1.0 / n.a;
    case Family::chi:
      return n.a * std::exp(0.5 * std::numbers::ln2 + std::lgamma(0.5 * (n.count + 1)) - std::lgamma(0.5 * n.count));
    case Family::chi_squared: return n.count * n.a * n.a;
    case Family::shifted: return mean_of(*n.child) + n.b;
    case Family::iid_sum: return n.count * mean_of(*n.child);
  }
  return 0.0;
}

}  // namespace

double FiniteDistribution::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size() && i < probs.size(); ++i) m += values[i] * probs[i];
  return m;
}

void FiniteDistribution::validate() const {
  if (values.empty()) throw BoundError(ErrorKind::domain, "finite distribution needs a nonempty support");
  if (values.size() != probs.size()) throw BoundError(ErrorKind::domain, "support and probability lengths differ");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw BoundError(ErrorKind::domain, "support value is not finite");
    if (!(probs[i] >= 0.0)) throw BoundError(ErrorKind::domain, "negative probability");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw BoundError(ErrorKind::domain, "probabilities sum to " + num(total) + ", not 1");
  }
}

RandomModel RandomModel::gaussian(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw BoundError(ErrorKind::domain, "gaussian sigma must be >= 0");
  if (sigma == 0.0) return constant(0.0);
  auto n = std::make_shared<Node>();
  n->family = Family::gaussian;
  n->a = sigma;
  return wrap(n);
}

RandomModel RandomModel::uniform_symmetric(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw BoundError(ErrorKind::domain, "uniform half-width must be >= 0");
  if (a == 0.0) return constant(0.0);
  auto n = std::make_shared<Node>();
  n->family = Family::uniform_symmetric;
  n->a = a;
  return wrap(n);
}

RandomModel RandomModel::rademacher(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw BoundError(ErrorKind::domain, "rademacher scale must be >= 0");
  auto n = std::make_shared<Node>();
  n->family = Family::rademacher_scaled;
  n->a = a;
  return wrap(n);
}

RandomModel RandomModel::discrete(std::vector<double> values, std::vector<double> probs) {
  return discrete(FiniteDistribution{std::move(values), std::move(probs)});
}

RandomModel RandomModel::discrete(FiniteDistribution dist) {
  dist.validate();
  auto n = std::make_shared<Node>();
  n->family = Family::discrete;
  n->cumulative.resize(dist.probs.size());
  std::partial_sum(dist.probs.begin(), dist.probs.end(), n->cumulative.begin());
  n->dist = std::move(dist);
  return wrap(n);
}

RandomModel RandomModel::constant(double c) { return discrete({c}, {1.0}); }

RandomModel RandomModel::exponential(double rate) {
  require_positive(rate, "exponential rate");
  auto n = std::make_shared<Node>();
  n->family = Family::exponential;
  n->a = rate;
  return wrap(n);
}

RandomModel RandomModel::chi(int dim, double sigma) {
  if (dim < 1) throw BoundError(ErrorKind::domain, "chi dimension must be >= 1");
  require_positive(sigma, "chi sigma");
  auto n = std::make_shared<Node>();
  n->family = Family::chi;
  n->a = sigma;
  n->count = dim;
  return wrap(n);
}

RandomModel RandomModel::chi_squared(int dim, double sigma) {
  if (dim < 1) throw BoundError(ErrorKind::domain, "chi-squared dimension must be >= 1");
  require_positive(sigma, "chi-squared sigma");
  auto n = std::make_shared<Node>();
  n->family = Family::chi_squared;
  n->a = sigma;
  n->count = dim;
  return wrap(n);
}

RandomModel RandomModel::mixture(double weight, double sigma, double a) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw BoundError(ErrorKind::domain, "mixture weight must lie in [0, 1]");
  require_positive(sigma, "mixture sigma");
  require_positive(a, "mixture half-width");
  auto n = std::make_shared<Node>();
  n->family = Family::mixture;
  n->a = weight;
  n->b = sigma;
  n->c = a;
  return wrap(n);
}

namespace {

std::vector<double> parse_list(std::string_view text, std::string_view spec) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("bad number '" + std::string(item) + "' in model '" + std::string(spec) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

RandomModel RandomModel::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ConfigError("model '" + std::string(spec) + "' needs parameters");
  const auto family = spec.substr(0, colon);
  const auto args = spec.substr(colon + 1);
  auto expect = [&](std::size_t count) {
    auto values = parse_list(args, spec);
    if (values.size() != count) {
      throw ConfigError("model '" + std::string(spec) + "' expects " + std::to_string(count) + " parameter(s)");
    }
    return values;
  };
  try {
    if (family == "gaussian") return gaussian(expect(1)[0]);
    if (family == "uniform") return uniform_symmetric(expect(1)[0]);
    if (family == "rademacher") return rademacher(expect(1)[0]);
    if (family == "exponential") return exponential(expect(1)[0]);
    if (family == "constant") return constant(expect(1)[0]);
    if (family == "mixture") {
      const auto v = expect(3);
      return mixture(v[0], v[1], v[2]);
    }
    if (family == "chi" || family == "chi2") {
      const auto v = expect(2);
      const int dim = static_cast<int>(v[0]);
      if (dim != v[0]) throw ConfigError("chi dimension must be an integer");
      return family == "chi" ? chi(dim, v[1]) : chi_squared(dim, v[1]);
    }
    if (family == "discrete") {
      const auto semi = args.find(';');
      if (semi == std::string_view::npos) throw ConfigError("discrete model needs 'values;probs'");
      return discrete(parse_list(args.substr(0, semi), spec), parse_list(args.substr(semi + 1), spec));
    }
  } catch (const BoundError& e) {
    throw ConfigError(std::string("invalid model '") + std::string(spec) + "': " + e.what());
  }
  throw ConfigError("unknown model family '" + std::string(family) + "'");
}

RandomModel RandomModel::shifted(double mu) const {
  if (!std::isfinite(mu)) throw BoundError(ErrorKind::domain, "shift must be finite");
  auto n = std::make_shared<Node>();
  n->family = Family::shifted;
  n->b = mu;
  n->child = node_;
  return wrap(n);
}

RandomModel RandomModel::scaled(double c) const {
  if (!std::isfinite(c)) throw BoundError(ErrorKind::domain, "scale must be finite");
  const Node& n = *node_;
  const double ac = std::abs(c);
  switch (n.family) {
    case Family::gaussian: return gaussian(ac * n.a);
    case Family::uniform_symmetric: return uniform_symmetric(ac * n.a);
    case Family::rademacher_scaled: return rademacher(ac * n.a);
    case Family::mixture: return mixture(n.a, ac * n.b, ac * n.c);
    case Family::discrete: {
      auto d = n.dist;
      for (double& v : d.values) v *= c;
      return discrete(std::move(d));
    }
    case Family::shifted: return RandomModel(n.child).scaled(c).shifted(c * n.b);
    case Family::iid_sum: return RandomModel(n.child).scaled(c).iid_sum(n.count);
    case Family::exponential:
      if (c > 0.0) return exponential(n.a / c);
      break;
    case Family::chi:
      if (c > 0.0) return chi(n.count, c * n.a);
      break;
    case Family::chi_squared:
      if (c > 0.0) return chi_squared(n.count, std::sqrt(c) * n.a);
      break;
  }
  throw BoundError(ErrorKind::unsupported, "cannot scale " + name() + " by " + num(c));
}

RandomModel RandomModel::iid_sum(int count) const {
  if (count < 1) throw BoundError(ErrorKind::domain, "i.i.d. sum needs count >= 1");
  if (count == 1) return *this;
  if (node_->family == Family::gaussian) return gaussian(node_->a * std::sqrt(static_cast<double>(count)));
  auto n = std::make_shared<Node>();
  n->family = Family::iid_sum;
  n->count = count;
  n->child = node_;
  return wrap(n);
}

RandomModel RandomModel::centered() const {
  const double m = mean();
  if (m == 0.0) return *this;
  return shifted(-m);
}

RandomModel::Family RandomModel::family() const noexcept { return node_->family; }

std::string RandomModel::name() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::gaussian: return "gaussian(" + num(n.a) + ")";
    case Family::uniform_symmetric: return "uniform(" + num(n.a) + ")";
    case Family::rademacher_scaled: return "rademacher(" + num(n.a) + ")";
    case Family::discrete: return "discrete(" + std::to_string(n.dist.values.size()) + " points)";
    case Family::exponential: return "exponential(" + num(n.a) + ")";
    case Family::chi: return "chi(" + std::to_string(n.count) + "," + num(n.a) + ")";
    case Family::chi_squared: return "chi2(" + std::to_string(n.count) + "," + num(n.a) + ")";
    case Family::mixture: return "mixture(" + num(n.a) + "," + num(n.b) + "," + num(n.c) + ")";
    case Family::shifted: return RandomModel(n.child).name() + "+" + num(n.b);
    case Family::iid_sum: return "sum" + std::to_string(n.count) + "(" + RandomModel(n.child).name() + ")";
  }
  return "model";
}

double RandomModel::mean() const { return mean_of(*node_); }

bool RandomModel::is_centered(double tol) const { return std::abs(mean()) <= tol; }

bool RandomModel::nonnegative() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::exponential:
    case Family::chi:
    case Family::chi_squared: return true;
    case Family::rademacher_scaled: return n.a == 0.0;
    case Family::discrete:
      return std::all_of(n.dist.values.begin(), n.dist.values.end(), [](double v) { return v >= 0.0; });
    case Family::shifted: {
      if (auto f = finite_of(n)) {
        return std::all_of(f->values.begin(), f->values.end(), [](double v) { return v >= 0.0; });
      }
      const Node& c = *n.child;
      if (c.family == Family::uniform_symmetric) return n.b - c.a >= 0.0;
      if (c.family == Family::exponential || c.family == Family::chi || c.family == Family::chi_squared) {
        return n.b >= 0.0;
      }
      return false;
    }
    case Family::iid_sum: return RandomModel(n.child).nonnegative();
    default: return false;
  }
}

bool RandomModel::has_analytic_mgf() const noexcept {
  const Node& n = *node_;
  switch (n.family) {
    case Family::chi: return false;
    case Family::shifted:
    case Family::iid_sum: return RandomModel(n.child).has_analytic_mgf();
    default: return true;
  }
}

bool RandomModel::has_analytic_moments() const noexcept {
  const Node& n = *node_;
  if (n.family == Family::iid_sum) return finite_of(n).has_value();
  return true;
}

double RandomModel::log_mgf(double lambda) const {
  if (!std::isfinite(lambda)) throw BoundError(ErrorKind::domain, "lambda must be finite");
  const Node& n = *node_;
  switch (n.family) {
    case Family::gaussian: return 0.5 * lambda * lambda * n.a * n.a;
    case Family::uniform_symmetric: return log_sinhc(lambda * n.a);
    case Family::rademacher_scaled: return log_cosh(lambda * n.a);
    case Family::discrete: {
      std::vector<double> logs(n.dist.values.size());
      for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = lambda * n.dist.values[i];
      return log_sum_exp(logs, n.dist.probs);
    }
    case Family::exponential:
      if (lambda >= n.a) return kInf;
      return -std::log1p(-lambda / n.a);
    case Family::chi_squared: {
      const double s2 = n.a * n.a;
      if (2.0 * s2 * lambda >= 1.0) return kInf;
      return -0.5 * n.count * std::log1p(-2.0 * s2 * lambda);
    }
    case Family::chi: throw BoundError(ErrorKind::unsupported, "chi model has no closed-form MGF");
    case Family::mixture: {
      const double lg = 0.5 * lambda * lambda * n.b * n.b;
      const double lu = log_sinhc(lambda * n.c);
      return log_sum_exp({lg, lu}, {n.a, 1.0 - n.a});
    }
    case Family::shifted: return lambda * n.b + RandomModel(n.child).log_mgf(lambda);
    case Family::iid_sum: return n.count * RandomModel(n.child).log_mgf(lambda);
  }
  return kInf;
}

double RandomModel::abs_moment(double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw BoundError(ErrorKind::domain, "moment order must be positive");
  const Node& n = *node_;
  switch (n.family) {
    case Family::gaussian: return gaussian_abs_moment(n.a, p);
    case Family::uniform_symmetric: return std::pow(n.a, p) / (p + 1.0);
    case Family::exponential: return std::exp(std::lgamma(p + 1.0) - p * std::log(n.a));
    case Family::chi:
      return std::exp(p * std::log(n.a) + 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (n.count + p)) -
                      std::lgamma(0.5 * n.count));
    case Family::chi_squared:
      return std::exp(2.0 * p * std::log(n.a) + p * std::numbers::ln2 + std::lgamma(0.5 * n.count + p) -
                      std::lgamma(0.5 * n.count));
    case Family::mixture:
      return n.a * gaussian_abs_moment(n.b, p) + (1.0 - n.a) * std::pow(n.c, p) / (p + 1.0);
    default: break;
  }
  if (auto f = finite_of(n)) {
    double m = 0.0;
    for (std::size_t i = 0; i < f->values.size(); ++i) {
      if (f->values[i] != 0.0) m += f->probs[i] * std::pow(std::abs(f->values[i]), p);
    }
    return m;
  }
  if (n.family == Family::shifted && is_continuous(*n.child)) {
    const double mu = n.b;
    return integrate_density(*n.child, [mu, p](double x) { return std::pow(std::abs(x + mu), p); }, -mu);
  }
  throw BoundError(ErrorKind::unsupported, "no absolute moments available for " + name());
}

double RandomModel::exp_abs_moment(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw BoundError(ErrorKind::domain, "exponential moment needs s >= 0");
  if (s == 0.0) return 1.0;
  const Node& n = *node_;
  auto gauss = [](double sigma, double t) {
    const double z = t * sigma;
    return std::exp(0.5 * z * z) * std::erfc(-z / std::numbers::sqrt2);
  };
  auto unif = [](double a, double t) { return std::expm1(t * a) / (t * a); };
  switch (n.family) {
    case Family::gaussian: return gauss(n.a, s);
    case Family::uniform_symmetric: return unif(n.a, s);
    case Family::exponential: return s >= n.a ? kInf : n.a / (n.a - s);
    case Family::chi_squared: return std::exp(log_mgf(s));
    case Family::mixture: return n.a * gauss(n.b, s) + (1.0 - n.a) * unif(n.c, s);
    case Family::chi:
      return integrate_density(n, [s](double x) { return std::exp(s * x); }, 0.0);
    default: break;
  }
  if (auto f = finite_of(n)) {
    double m = 0.0;
    for (std::size_t i = 0; i < f->values.size(); ++i) m += f->probs[i] * std::exp(s * std::abs(f->values[i]));
    return m;
  }
  if (n.family == Family::shifted && is_continuous(*n.child)) {
    const double mu = n.b;
    if (n.child->family == Family::exponential && s >= n.child->a) return kInf;
    return integrate_density(*n.child, [mu, s](double x) { return std::exp(s * std::abs(x + mu)); }, -mu);
  }
  throw BoundError(ErrorKind::unsupported, "no exponential moments available for " + name());
}

std::optional<FiniteDistribution> RandomModel::finite_support() const { return finite_of(*node_); }

double RandomModel::sample(CounterRng& rng) const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::gaussian: return n.a * rng.normal();
    case Family::uniform_symmetric: return n.a * (2.0 * rng.uniform() - 1.0);
    case Family::rademacher_scaled: return n.a * rng.rademacher();
    case Family::discrete: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(n.cumulative.begin(), n.cumulative.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - n.cumulative.begin()),
                                             n.dist.values.size() - 1);
      return n.dist.values[idx];
    }
    case Family::exponential: return -std::log(rng.uniform()) / n.a;
    case Family::chi:
    case Family::chi_squared: {
      double acc = 0.0;
      for (int i = 0; i < n.count; ++i) {
        const double g = n.a * rng.normal();
        acc += g * g;
      }
      return n.family == Family::chi ? std::sqrt(acc) : acc;
    }
    case Family::mixture: {
      const double u = rng.uniform();
      const double g = rng.normal();
      const double v = rng.uniform();
      return u < n.a ? n.b * g : n.c * (2.0 * v - 1.0);
    }
    case Family::shifted: return RandomModel(n.child).sample(rng) + n.b;
    case Family::iid_sum: {
      const RandomModel child(n.child);
      double acc = 0.0;
      for (int i = 0; i < n.count; ++i) acc += child.sample(rng);
      return acc;
    }
  }
  return 0.0;
}

}  // namespace phib
