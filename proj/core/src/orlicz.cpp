#include "phibound/orlicz.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "phibound/errors.hpp"

namespace phib {

struct OrliczFunction::Impl {
  OrliczKind kind = OrliczKind::quadratic;
  double p = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> slopes;
  std::function<double(double)> fn;
  std::string label;
  std::shared_ptr<const Impl> base;
};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// Golden-section maximisation of a unimodal function on [lo, hi].
template <typename F>
std::pair<double, double> golden_maximize(F&& f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 400 && (b - a) > tol; ++iter) {
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
  double best_x = fc >= fd ? c : d;
  double best = std::max(fc, fd);
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }
  return {best_x, best};
}

OrliczFunction wrap(std::shared_ptr<const OrliczFunction::Impl> impl) { return OrliczFunction(std::move(impl)); }

}  // namespace

std::string_view to_string(OrliczKind kind) noexcept {
  switch (kind) {
    case OrliczKind::quadratic: return "quadratic";
    case OrliczKind::scaled_quadratic: return "scaled-quadratic";
    case OrliczKind::power: return "power";
    case OrliczKind::exp_type: return "exp-type";
    case OrliczKind::entropy_type: return "entropy-type";
    case OrliczKind::tabulated: return "tabulated";
    case OrliczKind::callable: return "callable";
    case OrliczKind::numeric_conjugate: return "numeric-conjugate";
  }
  return "unknown";
}

OrliczFunction OrliczFunction::quadratic() {
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::quadratic;
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::scaled_quadratic() {
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::scaled_quadratic;
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw BoundError(ErrorKind::domain, "power N-function needs finite p > 1, got " + format_number(p));
  }
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::power;
  im->p = p;
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::exp_type() {
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::exp_type;
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::entropy_type() {
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::entropy_type;
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::tabulated(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw ConfigError("tabulated N-function needs equally many x and phi values (at least one)");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ConfigError("tabulated N-function has non-finite data");
    if (xs[i] < 0.0) throw ConfigError("tabulated N-function needs x >= 0");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("tabulated N-function needs strictly increasing x");
  }
  if (xs.front() > 0.0) {
    xs.insert(xs.begin(), 0.0);
    ys.insert(ys.begin(), 0.0);
  }
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::tabulated;
  im->slopes.resize(xs.size() > 1 ? xs.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    im->slopes[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  }
  im->xs = std::move(xs);
  im->ys = std::move(ys);
  im->label = "tabulated";
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::from_csv(std::istream& in) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("csv line " + std::to_string(line_no) + ": expected 'x,phi'");
    try {
      const double x = std::stod(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      xs.push_back(x);
      ys.push_back(y);
    } catch (const std::invalid_argument&) {
      if (xs.empty() && line_no == 1) continue;  // header row
      throw ConfigError("csv line " + std::to_string(line_no) + ": not numeric");
    } catch (const std::out_of_range&) {
      throw ConfigError("csv line " + std::to_string(line_no) + ": value out of range");
    }
  }
  if (xs.empty()) throw ConfigError("csv contains no (x, phi) rows");
  return tabulated(std::move(xs), std::move(ys));
}

OrliczFunction OrliczFunction::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open N-function csv '" + path + "'");
  return from_csv(in);
}

OrliczFunction OrliczFunction::callable(std::string name, std::function<double(double)> fn) {
  if (!fn) throw ConfigError("callable N-function needs a function");
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::callable;
  im->fn = std::move(fn);
  im->label = std::move(name);
  return OrliczFunction(std::move(im));
}

OrliczFunction OrliczFunction::parse(std::string_view spec) {
  if (spec == "quadratic") return quadratic();
  if (spec == "scaled-quadratic" || spec == "scaled_quadratic") return scaled_quadratic();
  if (spec == "exp" || spec == "exp-type") return exp_type();
  if (spec == "entropy" || spec == "entropy-type") return entropy_type();
  if (spec.starts_with("power:")) {
    const auto text = spec.substr(6);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError("bad power exponent in '" + std::string(spec) + "'");
    }
    if (!(p > 1.0)) throw ConfigError("power exponent must exceed 1 in '" + std::string(spec) + "'");
    return power(p);
  }
  if (spec.starts_with("csv:")) return from_csv_file(std::string(spec.substr(4)));
  throw ConfigError("unknown N-function '" + std::string(spec) +
                    "' (expected quadratic, scaled-quadratic, power:<p>, exp, entropy or csv:<path>)");
}

OrliczKind OrliczFunction::kind() const noexcept { return impl_->kind; }

double OrliczFunction::parameter() const noexcept { return impl_->p; }

std::string OrliczFunction::name() const {
  switch (impl_->kind) {
    case OrliczKind::power: return "power:" + format_number(impl_->p);
    case OrliczKind::tabulated:
    case OrliczKind::callable: return impl_->label;
    case OrliczKind::numeric_conjugate:
      return "numeric-conjugate(" + wrap(impl_->base).name() + ")";
    default: return std::string(to_string(impl_->kind));
  }
}

bool OrliczFunction::has_analytic_conjugate() const noexcept {
  switch (impl_->kind) {
    case OrliczKind::quadratic:
    case OrliczKind::scaled_quadratic:
    case OrliczKind::power:
    case OrliczKind::exp_type:
    case OrliczKind::entropy_type: return true;
    default: return false;
  }
}

bool OrliczFunction::has_analytic_inverse() const noexcept {
  switch (impl_->kind) {
    case OrliczKind::quadratic:
    case OrliczKind::scaled_quadratic:
    case OrliczKind::power: return true;
    default: return false;
  }
}

bool OrliczFunction::strictly_convex() const noexcept {
  switch (impl_->kind) {
    case OrliczKind::tabulated:
    case OrliczKind::callable: return false;
    default: return true;
  }
}

namespace {

double evaluate_impl(const OrliczFunction::Impl& im, double a) {
  switch (im.kind) {
    case OrliczKind::quadratic: return 0.5 * a * a;
    case OrliczKind::scaled_quadratic: return a * a;
    case OrliczKind::power: return std::pow(a, im.p) / im.p;
    case OrliczKind::exp_type:
      if (a < 1e-4) return a * a * (0.5 + a * (1.0 / 6.0 + a / 24.0));
      return std::expm1(a) - a;
    case OrliczKind::entropy_type:
      if (a < 1e-4) return a * a * (0.5 - a * (1.0 / 6.0 - a / 12.0));
      return (1.0 + a) * std::log1p(a) - a;
    case OrliczKind::tabulated: {
      const auto& xs = im.xs;
      if (xs.size() == 1) return im.ys.front();
      if (a >= xs.back()) return im.ys.back() + im.slopes.back() * (a - xs.back());
      const auto it = std::upper_bound(xs.begin(), xs.end(), a);
      const auto i = static_cast<std::size_t>(it - xs.begin()) - 1;
      return im.ys[i] + im.slopes[i] * (a - xs[i]);
    }
    case OrliczKind::callable: return im.fn(a);
    case OrliczKind::numeric_conjugate: return maximize_conjugate(wrap(im.base), a).value;
  }
  return kNaN;
}

double derivative_impl(const OrliczFunction::Impl& im, double x) {
  const double a = std::abs(x);
  const double s = sign_of(x);
  switch (im.kind) {
    case OrliczKind::quadratic: return x;
    case OrliczKind::scaled_quadratic: return 2.0 * x;
    case OrliczKind::power: return s * std::pow(a, im.p - 1.0);
    case OrliczKind::exp_type: return s * std::expm1(a);
    case OrliczKind::entropy_type: return s * std::log1p(a);
    case OrliczKind::numeric_conjugate: return s * maximize_conjugate(wrap(im.base), a).maximizer;
    case OrliczKind::tabulated:
    case OrliczKind::callable: {
      const double h = orlicz_tolerance::difference_step * std::max(1.0, a);
      return (evaluate_impl(im, std::abs(x + h)) - evaluate_impl(im, std::abs(x - h))) / (2.0 * h);
    }
  }
  return kNaN;
}

/// Smallest power-of-two bracket [lo, hi] with g(hi) >= target for increasing g.
template <typename G>
double bisect_increasing(G&& g, double target, const char* what) {
  double hi = 1.0;
  while (g(hi) < target) {
    hi *= 2.0;
    if (hi > 1e300) throw BoundError(ErrorKind::domain, std::string(what) + ": no bracket for target " + format_number(target));
  }
  double lo = hi > 1.0 ? 0.5 * hi : 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double OrliczFunction::evaluate(double x) const {
  if (!std::isfinite(x)) throw BoundError(ErrorKind::domain, "N-function argument must be finite");
  return evaluate_impl(*impl_, std::abs(x));
}

double OrliczFunction::inverse(double y) const {
  if (std::isnan(y) || y < 0.0) throw BoundError(ErrorKind::domain, "inverse needs y >= 0, got " + format_number(y));
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  switch (impl_->kind) {
    case OrliczKind::quadratic: return std::sqrt(2.0 * y);
    case OrliczKind::scaled_quadratic: return std::sqrt(y);
    case OrliczKind::power: return std::pow(impl_->p * y, 1.0 / impl_->p);
    default: break;
  }
  const auto& im = *impl_;
  return bisect_increasing([&im](double x) { return evaluate_impl(im, x); }, y, "inverse");
}

double OrliczFunction::derivative(double x) const {
  if (!std::isfinite(x)) throw BoundError(ErrorKind::domain, "derivative argument must be finite");
  return derivative_impl(*impl_, x);
}

double OrliczFunction::derivative_inverse(double y) const {
  if (std::isnan(y)) throw BoundError(ErrorKind::domain, "derivative_inverse needs a number");
  const double a = std::abs(y);
  const double s = sign_of(y);
  switch (impl_->kind) {
    case OrliczKind::quadratic: return y;
    case OrliczKind::scaled_quadratic: return 0.5 * y;
    case OrliczKind::power: return s * std::pow(a, 1.0 / (impl_->p - 1.0));
    case OrliczKind::exp_type: return s * std::log1p(a);
    case OrliczKind::entropy_type: return s * std::expm1(a);
    case OrliczKind::numeric_conjugate: return wrap(impl_->base).derivative(y);
    default: break;
  }
  if (a == 0.0) return 0.0;
  const auto& im = *impl_;
  double hi = 1.0;
  while (derivative_impl(im, hi) < a) {
    hi *= 2.0;
    if (hi > orlicz_tolerance::bracket_cap) {
      throw BoundError(ErrorKind::unbounded_conjugate, "derivative never reaches " + format_number(a));
    }
  }
  double lo = hi > 1.0 ? 0.5 * hi : 0.0;
  for (int iter = 0; iter < 200 && hi - lo > orlicz_tolerance::inverse_relative * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (derivative_impl(im, mid) < a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return s * 0.5 * (lo + hi);
}

double OrliczFunction::conjugate(double y) const {
  if (!std::isfinite(y)) throw BoundError(ErrorKind::domain, "conjugate argument must be finite");
  const double a = std::abs(y);
  switch (impl_->kind) {
    case OrliczKind::quadratic: return 0.5 * a * a;
    case OrliczKind::scaled_quadratic: return 0.25 * a * a;
    case OrliczKind::power: {
      const double q = impl_->p / (impl_->p - 1.0);
      return std::pow(a, q) / q;
    }
    case OrliczKind::exp_type: return evaluate_impl(*entropy_type().impl_, a);
    case OrliczKind::entropy_type: return evaluate_impl(*exp_type().impl_, a);
    default: return maximize_conjugate(*this, y).value;
  }
}

OrliczFunction OrliczFunction::conjugate_function() const {
  switch (impl_->kind) {
    case OrliczKind::quadratic: return quadratic();
    case OrliczKind::scaled_quadratic:
      return callable("conjugate(scaled-quadratic)", [](double y) { return 0.25 * y * y; });
    case OrliczKind::power: return power(impl_->p / (impl_->p - 1.0));
    case OrliczKind::exp_type: return entropy_type();
    case OrliczKind::entropy_type: return exp_type();
    case OrliczKind::numeric_conjugate: return wrap(impl_->base);
    default: return numeric_conjugate_function();
  }
}

OrliczFunction OrliczFunction::numeric_conjugate_function() const {
  auto im = std::make_shared<Impl>();
  im->kind = OrliczKind::numeric_conjugate;
  im->base = impl_;
  return OrliczFunction(std::move(im));
}

ConjugateMaximum maximize_conjugate(const OrliczFunction& phi, double y) {
  if (!std::isfinite(y)) throw BoundError(ErrorKind::domain, "conjugate argument must be finite");
  const double a = std::abs(y);
  double hi = 1.0;
  while (a - phi.derivative(hi) > 0.0) {
    hi *= 2.0;
    if (hi > orlicz_tolerance::bracket_cap) {
      throw BoundError(ErrorKind::unbounded_conjugate,
                       "sup_x (xy - phi(x)) diverges for y = " + format_number(y) + " on " + phi.name());
    }
  }
  const double lo = hi > 1.0 ? 0.5 * hi : 0.0;
  const auto objective = [&phi, a](double x) { return a * x - phi.evaluate(x); };
  auto [x_best, value] = golden_maximize(objective, lo, hi, orlicz_tolerance::conjugate_absolute);
  // Concavity puts the maximiser in [lo, hi], but x = 0 is always feasible.
  if (value < 0.0) {
    value = 0.0;
    x_best = 0.0;
  }
  return {value, sign_of(y) * x_best};
}

bool ValidationReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck* ValidationReport::find(std::string_view name) const noexcept {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

/// a <= b up to a relative rounding slack; +inf compares equal to +inf.
bool leq(double a, double b) {
  if (a <= b) return true;
  if (std::isinf(a) && std::isinf(b)) return true;
  return a - b <= 1e-12 * (std::abs(a) + std::abs(b)) + 1e-300;
}

std::string point(double x) { return "x=" + format_number(x); }

std::string pair(double x, double y) { return "x=" + format_number(x) + ", y=" + format_number(y); }

}  // namespace

ValidationReport validate_n_function(const OrliczFunction& phi, std::span<const double> grid) {
  ValidationReport report;
  auto add = [&report](std::string name) -> PropertyCheck& {
    report.checks.push_back(PropertyCheck{std::move(name), true, {}, 0.0});
    return report.checks.back();
  };
  auto fail = [](PropertyCheck& c, std::string witness) {
    if (c.passed) {
      c.passed = false;
      c.witness = std::move(witness);
    }
  };

  std::vector<double> pts;
  for (double x : grid) {
    if (std::isfinite(x)) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> positive;
  for (double x : pts) {
    if (x > 0.0) positive.push_back(std::abs(x));
  }
  std::vector<double> values(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) values[i] = phi(pts[i]);

  auto& even = add("even");
  for (double x : pts) {
    const double l = phi(x);
    const double r = phi(-x);
    if (!(leq(l, r) && leq(r, l))) fail(even, point(x));
  }

  auto& zero = add("zero-at-origin");
  zero.statistic = phi(0.0);
  if (std::abs(zero.statistic) > 1e-15) fail(zero, "phi(0)=" + format_number(zero.statistic));

  auto& increasing = add("strictly-increasing");
  {
    double prev_x = 0.0;
    double prev = phi(0.0);
    for (double x : positive) {
      const double cur = phi(x);
      const bool both_inf = std::isinf(cur) && std::isinf(prev);
      if (!(cur > prev) && !both_inf) fail(increasing, pair(prev_x, x));
      prev = cur;
      prev_x = x;
    }
  }

  auto& small = add("ratio-to-zero");
  small.statistic = phi(1e-6) / 1e-6;
  if (!(small.statistic < 1e-3)) fail(small, "phi(1e-6)/1e-6=" + format_number(small.statistic));

  // A finite check can only look for growth: phi(x)/x must gain a factor of 10
  // between x = 1 and x = 1e6 (x ln x does, anything asymptotically linear does not).
  auto& large = add("ratio-to-infinity");
  const double at_one = phi(1.0);
  large.statistic = at_one > 0.0 ? (phi(1e6) / 1e6) / at_one : 0.0;
  if (!(large.statistic > 10.0)) fail(large, "phi(1e6)/1e6 / phi(1)=" + format_number(large.statistic));

  auto& convex = add("convex");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double mid = phi(0.5 * (pts[i] + pts[j]));
      if (!leq(mid, 0.5 * (values[i] + values[j]))) {
        fail(convex, "midpoint of " + pair(pts[i], pts[j]));
      }
    }
  }

  auto& scaling = add("scaling");
  for (double beta : {1.5, 2.0, 4.0, 10.0}) {
    for (double x : pts) {
      if (!leq(beta * phi(x), phi(beta * x))) {
        fail(scaling, "beta=" + format_number(beta) + ", " + point(x));
      }
    }
  }

  auto& linear = add("linear-lower-bound");
  {
    double c = kInf;
    double arg = 0.0;
    bool any = false;
    for (double x : positive) {
      if (x > 1.0) {
        any = true;
        const double r = phi(x) / x;
        if (r < c) {
          c = r;
          arg = x;
        }
      }
    }
    if (!any) {
      arg = 2.0;
      c = phi(2.0) / 2.0;
    }
    linear.statistic = c;
    if (!(c > 0.0)) fail(linear, point(arg));
  }

  auto& ratio = add("ratio-monotone");
  {
    double prev = -kInf;
    double prev_x = 0.0;
    for (double x : positive) {
      const double r = phi(x) / x;
      if (!leq(prev, r)) fail(ratio, pair(prev_x, x));
      prev = r;
      prev_x = x;
    }
  }

  auto& super = add("superadditive");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i; j < pts.size(); ++j) {
      const double lhs = values[i] + values[j];
      const double rhs = phi(std::abs(pts[i]) + std::abs(pts[j]));
      if (!leq(lhs, rhs)) fail(super, pair(pts[i], pts[j]));
    }
  }

  return report;
}

std::vector<double> standard_grid() {
  std::vector<double> grid(121);
  for (int i = 0; i <= 120; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 6.0 * i / 120.0);
  return grid;
}

}  // namespace phib
