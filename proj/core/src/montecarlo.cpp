#include "phibound/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "phibound/errors.hpp"
#include "phibound/functional.hpp"
#include "phibound/norms.hpp"
#include "phibound/orlicz.hpp"

namespace phib {

namespace {

constexpr double kCalibrationLow = 1e-4;
constexpr double kCalibrationHigh = 1e4;
constexpr std::uint32_t kCoefficientSubstream = 0xffffffffu;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list17(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += g17(xs[i]);
  }
  return out;
}

double binomial_upper_p(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 1.0;
  if (p >= 1.0) return 1.0;
  if (p <= 0.0) return 0.0;
  // P(Bin(n, p) >= k) = I_p(k, n - k + 1).
  return boost::math::ibeta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

GridPoint make_point(std::map<std::string, double> params, double threshold, const TailEstimate& tail, double bound) {
  GridPoint g;
  g.params = std::move(params);
  g.threshold = threshold;
  g.tail = tail;
  g.bound = bound;
  g.dominated = bound >= tail.ci_high;
  g.p_value = binomial_upper_p(tail.count, tail.n, bound);
  return g;
}

CoefficientVector resolve_t(const CampaignConfig& cfg) {
  if (!cfg.t.empty()) return CoefficientVector{cfg.t};
  return random_coefficients(cfg.dimension, cfg.seed, cfg.stream);
}

/// A zero norm means the variable is 0 almost surely; any positive constant
/// then satisfies the hypothesis, and 1 is used.
double positive_or_one(double v) { return v > 0.0 ? v : 1.0; }

double iid_exponent(double z, double l1, double l2, const OrliczFunction& phi, double K1, double K2) {
  if (z <= 0.0) return 0.0;
  return std::min(phi(z / (K1 * l1)), (z * z) / (K2 * K2 * l2 * l2));
}

/// Everything a campaign needs that does not depend on the calibrated constant.
struct Prepared {
  CampaignConfig cfg;
  RandomModel model;
  OrliczFunction phi;
  CoefficientVector t;
  std::vector<double> sorted;  // sorted Y_t or f(X) - Ef samples
  std::map<std::string, double> constants;
  // general
  std::vector<NvSolution> nv;  // per v in v_grid
  // iid
  double l1 = 0.0;
  double l2 = 0.0;
  // randomized
  std::vector<double> sums;
  std::vector<double> log_u;
  double tau = 0.0;
  // functional
  FunctionalBoundInputs inputs;
};

Prepared prepare(const CampaignConfig& cfg) {
  cfg.validate();
  Prepared p{cfg, RandomModel::parse(cfg.model), OrliczFunction::parse(cfg.phi), {}, {}, {}, {}, 0, 0, {}, {}, 0, {}};
  switch (cfg.bound) {
    case BoundKind::general: {
      p.t = resolve_t(cfg);
      const double K = cfg.K ? *cfg.K : positive_or_one(tau_phi_norm(p.model, p.phi.conjugate_function()).value);
      p.constants = {{"K", K}, {"t_l2", p.t.l2()}, {"threshold_scale", cfg.threshold_scale}};
      for (double v : cfg.v_grid) p.nv.push_back(solve_nv(p.phi, p.t, v));
      p.sorted = sample_canonical(p.model, p.t, cfg.trials, cfg.seed, cfg.stream);
      break;
    }
    case BoundKind::iid: {
      p.t = resolve_t(cfg);
      p.l1 = p.t.l1();
      p.l2 = p.t.l2();
      const double K1 = cfg.K1 ? *cfg.K1 : positive_or_one(tau_phi_norm(p.model, p.phi.conjugate_function()).value);
      const double K2 = cfg.K2 ? *cfg.K2 : positive_or_one(exp_orlicz_norm(p.model).value);
      p.constants = {{"K1", K1}, {"K2", K2}, {"c", cfg.c}, {"t_l1", p.l1}, {"t_l2", p.l2},
                     {"threshold_scale", cfg.threshold_scale}};
      p.sorted = sample_canonical(p.model, p.t, cfg.trials, cfg.seed, cfg.stream);
      break;
    }
    case BoundKind::randomized: {
      const RandomModel centred = p.model.centered();
      p.tau = cfg.mode == TauMode::sum ? tau_phi_norm(centred.iid_sum(cfg.n_summands), p.phi).value
                                       : tau_phi_norm(centred, p.phi).value;
      if (!(p.tau > 0.0)) throw BoundError(ErrorKind::domain, "randomized threshold needs tau > 0; " + p.model.name() + " is degenerate");
      p.constants = {{"C", cfg.C}, {"tau", p.tau}, {"n_summands", static_cast<double>(cfg.n_summands)},
                     {"threshold_scale", cfg.threshold_scale}};
      const double mean = p.model.mean();
      p.sums.resize(static_cast<std::size_t>(cfg.trials));
      p.log_u.resize(static_cast<std::size_t>(cfg.trials));
      for (std::int64_t i = 0; i < cfg.trials; ++i) {
        CounterRng rng(cfg.seed, cfg.stream, static_cast<std::uint32_t>(i));
        double s = 0.0;
        for (int j = 0; j < cfg.n_summands; ++j) s += p.model.sample(rng) - mean;
        p.sums[static_cast<std::size_t>(i)] = s;
        p.log_u[static_cast<std::size_t>(i)] = std::log(rng.uniform());
      }
      break;
    }
    case BoundKind::functional_sum: {
      const auto law = p.model.finite_support();
      if (!law) throw ConfigError("functional-sum campaigns need a finite-support model, got " + p.model.name());
      const auto fm = DiscreteFunctionModel::sum(std::vector<FiniteDistribution>(static_cast<std::size_t>(cfg.dimension), *law));
      p.inputs = functional_norm_inputs(fm, p.phi);
      // f(X) is constant: the exact bound 0 cannot beat a CI upper end, but any
      // positive A is also valid, so use A = 1 as for zero norms elsewhere.
      if (p.inputs.A == 0.0 && p.inputs.B == 0.0) p.inputs.A = 1.0;
      p.constants = {{"A", p.inputs.A}, {"B", p.inputs.B}, {"threshold_scale", cfg.threshold_scale}};
      p.t = CoefficientVector{std::vector<double>(static_cast<std::size_t>(cfg.dimension), 1.0)};
      p.sorted = sample_canonical(p.model.centered(), p.t, cfg.trials, cfg.seed, cfg.stream);
      break;
    }
  }
  std::sort(p.sorted.begin(), p.sorted.end());
  return p;
}

/// Grid points for the given value of the calibratable constant.
std::vector<GridPoint> evaluate(const Prepared& p, double constant) {
  const CampaignConfig& cfg = p.cfg;
  std::vector<GridPoint> out;
  switch (cfg.bound) {
    case BoundKind::general:
      for (std::size_t i = 0; i < cfg.v_grid.size(); ++i) {
        for (double s : cfg.s_grid) {
          const BoundReport r = tail_bound_general(p.nv[i], s, constant);
          const double z = r.threshold * cfg.threshold_scale;
          out.push_back(make_point({{"v", cfg.v_grid[i]}, {"s", s}}, z,
                                   empirical_tail_sorted(p.sorted, z, cfg.ci_multiplier), r.probability_bound));
        }
      }
      break;
    case BoundKind::iid:
      for (double z : cfg.z_grid) {
        const double m = iid_exponent(z, p.l1, p.l2, p.phi, p.constants.at("K1"), p.constants.at("K2"));
        const double zz = z * cfg.threshold_scale;
        out.push_back(make_point({{"z", z}}, zz, empirical_tail_sorted(p.sorted, zz, cfg.ci_multiplier),
                                 std::exp(-constant * m)));
      }
      break;
    case BoundKind::randomized:
      for (double alpha : cfg.alpha_grid) {
        const double L = std::log(1.0 / alpha);
        const double scale = constant * p.tau / p.phi.inverse(L) * cfg.threshold_scale;
        std::int64_t hits = 0;
        double thr_sum = 0.0;
        for (std::size_t i = 0; i < p.sums.size(); ++i) {
          const double thr = scale * (2.0 * L + p.log_u[i]);
          thr_sum += thr;
          if (p.sums[i] >= thr) ++hits;
        }
        const auto n = static_cast<std::int64_t>(p.sums.size());
        const Interval ci = clopper_pearson(hits, n, confidence_for_multiplier(cfg.ci_multiplier));
        const TailEstimate tail{static_cast<double>(hits) / static_cast<double>(n), ci.lo, ci.hi, hits, n};
        out.push_back(make_point({{"alpha", alpha}}, thr_sum / static_cast<double>(n), tail, alpha));
      }
      break;
    case BoundKind::functional_sum:
      for (double t : cfg.z_grid) {
        const double zz = t * cfg.threshold_scale;
        out.push_back(make_point({{"t", t}}, zz, empirical_tail_sorted(p.sorted, zz, cfg.ci_multiplier),
                                 med_tail_bound(t, p.inputs.A, p.inputs.B)));
      }
      break;
  }
  return out;
}

double default_constant(const Prepared& p) {
  switch (p.cfg.bound) {
    case BoundKind::general: return p.constants.at("K");
    case BoundKind::iid: return p.cfg.c;
    case BoundKind::randomized: return p.cfg.C;
    case BoundKind::functional_sum: return 1.0;
  }
  return 1.0;
}

}  // namespace

double confidence_for_multiplier(double k) {
  if (!(k > 0.0)) throw BoundError(ErrorKind::domain, "confidence multiplier must be > 0");
  return std::erf(k / std::sqrt(2.0));
}

Interval clopper_pearson(std::int64_t k, std::int64_t n, double confidence) {
  if (n <= 0 || k < 0 || k > n) throw BoundError(ErrorKind::domain, "clopper_pearson needs 0 <= k <= n, n > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) throw BoundError(ErrorKind::domain, "confidence must lie in (0,1)");
  const double a = 0.5 * (1.0 - confidence);
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  Interval ci{0.0, 1.0};
  if (k > 0) ci.lo = boost::math::quantile(boost::math::beta_distribution<double>(kd, nd - kd + 1.0), a);
  if (k < n) ci.hi = boost::math::quantile(boost::math::beta_distribution<double>(kd + 1.0, nd - kd), 1.0 - a);
  return ci;
}

TailEstimate empirical_tail(std::span<const double> samples, double z, double ci_multiplier) {
  if (samples.empty()) throw BoundError(ErrorKind::domain, "empirical tail needs samples");
  std::int64_t count = 0;
  for (double x : samples) count += x >= z ? 1 : 0;
  const auto n = static_cast<std::int64_t>(samples.size());
  const Interval ci = clopper_pearson(count, n, confidence_for_multiplier(ci_multiplier));
  return {static_cast<double>(count) / static_cast<double>(n), ci.lo, ci.hi, count, n};
}

TailEstimate empirical_tail_sorted(std::span<const double> sorted, double z, double ci_multiplier) {
  if (sorted.empty()) throw BoundError(ErrorKind::domain, "empirical tail needs samples");
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), z);
  const auto count = static_cast<std::int64_t>(sorted.end() - it);
  const auto n = static_cast<std::int64_t>(sorted.size());
  const Interval ci = clopper_pearson(count, n, confidence_for_multiplier(ci_multiplier));
  return {static_cast<double>(count) / static_cast<double>(n), ci.lo, ci.hi, count, n};
}

std::vector<double> sample_canonical(std::span<const RandomModel> models, const CoefficientVector& t,
                                     std::int64_t n_trials, std::uint64_t seed, std::uint64_t stream) {
  if (models.size() != t.size()) {
    throw BoundError(ErrorKind::domain, "sample_canonical: " + std::to_string(models.size()) + " models for " +
                                            std::to_string(t.size()) + " coefficients");
  }
  if (n_trials < 0 || n_trials >= static_cast<std::int64_t>(kCoefficientSubstream)) {
    throw BoundError(ErrorKind::domain, "trial count out of range");
  }
  std::vector<double> out(static_cast<std::size_t>(n_trials));
  for (std::int64_t i = 0; i < n_trials; ++i) {
    CounterRng rng(seed, stream, static_cast<std::uint32_t>(i));
    double y = 0.0;
    for (std::size_t j = 0; j < models.size(); ++j) y += t.entries[j] * models[j].sample(rng);
    out[static_cast<std::size_t>(i)] = y;
  }
  return out;
}

std::vector<double> sample_canonical(const RandomModel& model, const CoefficientVector& t, std::int64_t n_trials,
                                     std::uint64_t seed, std::uint64_t stream) {
  const std::vector<RandomModel> models(t.size(), model);
  return sample_canonical(models, t, n_trials, seed, stream);
}

CoefficientVector random_coefficients(int n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw BoundError(ErrorKind::domain, "need at least one coefficient");
  CounterRng rng(seed, stream, kCoefficientSubstream);
  CoefficientVector t;
  for (int i = 0; i < n; ++i) t.entries.push_back(rng.normal());
  return t;
}

std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::general: return "general";
    case BoundKind::iid: return "iid";
    case BoundKind::randomized: return "randomized";
    case BoundKind::functional_sum: return "functional-sum";
  }
  return "unknown";
}

BoundKind parse_bound_kind(std::string_view text) {
  if (text == "general") return BoundKind::general;
  if (text == "iid") return BoundKind::iid;
  if (text == "randomized") return BoundKind::randomized;
  if (text == "functional-sum") return BoundKind::functional_sum;
  throw ConfigError("unknown bound '" + std::string(text) + "' (expected general, iid, randomized or functional-sum)");
}

void CampaignConfig::validate() const {
  if (trials < 1000) throw ConfigError("trials must be >= 1000, got " + std::to_string(trials));
  if (trials >= static_cast<std::int64_t>(kCoefficientSubstream)) throw ConfigError("trials too large");
  if (!(ci_multiplier > 0.0)) throw ConfigError("ci_multiplier must be > 0");
  if (!(threshold_scale > 0.0)) throw ConfigError("threshold_scale must be > 0");
  if (t.empty() && dimension < 1) throw ConfigError("dimension must be >= 1");
  const auto nonempty = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) throw ConfigError(std::string(name) + " must be nonempty");
  };
  switch (bound) {
    case BoundKind::general:
      nonempty(v_grid, "v_grid");
      nonempty(s_grid, "s_grid");
      break;
    case BoundKind::iid:
    case BoundKind::functional_sum:
      nonempty(z_grid, "z_grid");
      break;
    case BoundKind::randomized:
      nonempty(alpha_grid, "alpha_grid");
      for (double a : alpha_grid) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha_grid entries must lie in (0,1)");
      }
      if (!(C > 0.0)) throw ConfigError("C must be > 0");
      if (n_summands < 1) throw ConfigError("n_summands must be >= 1");
      break;
  }
  if (bound == BoundKind::functional_sum && dimension < 1) throw ConfigError("dimension must be >= 1");
}

std::string CampaignConfig::canonical() const {
  std::ostringstream os;
  const auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string("auto"); };
  os << "bound = " << to_string(bound) << '\n'
     << "model = " << model << '\n'
     << "phi = " << phi << '\n'
     << "trials = " << trials << '\n'
     << "seed = " << seed << '\n'
     << "stream = " << stream << '\n'
     << "ci_multiplier = " << g17(ci_multiplier) << '\n'
     << "threshold_scale = " << g17(threshold_scale) << '\n'
     << "t = " << list17(t) << '\n'
     << "dimension = " << dimension << '\n'
     << "v_grid = " << list17(v_grid) << '\n'
     << "s_grid = " << list17(s_grid) << '\n'
     << "z_grid = " << list17(z_grid) << '\n'
     << "alpha_grid = " << list17(alpha_grid) << '\n'
     << "K = " << opt(K) << '\n'
     << "K1 = " << opt(K1) << '\n'
     << "K2 = " << opt(K2) << '\n'
     << "c = " << g17(c) << '\n'
     << "C = " << g17(C) << '\n'
     << "n_summands = " << n_summands << '\n'
     << "mode = " << to_string(mode) << '\n';
  return os.str();
}

std::string CampaignConfig::hash() const { return hex64(fnv1a64(canonical())); }

CampaignConfig CampaignConfig::from_kv(const KeyValueConfig& kv) {
  static constexpr std::string_view kKeys[] = {
      "bound", "model",  "phi",    "trials", "seed",       "stream", "ci_multiplier", "threshold_scale",
      "t",     "dimension", "v_grid", "s_grid", "z_grid", "alpha_grid", "K", "K1", "K2", "c", "C",
      "n_summands", "mode"};
  kv.require_known(kKeys);
  CampaignConfig c;
  c.bound = parse_bound_kind(kv.get_string("bound", "general"));
  c.model = kv.get_string("model", c.model);
  c.phi = kv.get_string("phi", c.phi);
  c.trials = kv.get_int("trials", c.trials);
  const auto seed = kv.get_int("seed", 1);
  const auto stream = kv.get_int("stream", 0);
  if (seed < 0 || stream < 0) throw ConfigError("seed and stream must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.stream = static_cast<std::uint64_t>(stream);
  c.ci_multiplier = kv.get_double("ci_multiplier", c.ci_multiplier);
  c.threshold_scale = kv.get_double("threshold_scale", c.threshold_scale);
  c.t = kv.get_list("t", {});
  c.dimension = static_cast<int>(kv.get_int("dimension", c.dimension));
  c.v_grid = kv.get_list("v_grid", c.v_grid);
  c.s_grid = kv.get_list("s_grid", c.s_grid);
  c.z_grid = kv.get_list("z_grid", c.z_grid);
  c.alpha_grid = kv.get_list("alpha_grid", c.alpha_grid);
  if (kv.has("K")) c.K = kv.get_double("K", 0.0);
  if (kv.has("K1")) c.K1 = kv.get_double("K1", 0.0);
  if (kv.has("K2")) c.K2 = kv.get_double("K2", 0.0);
  c.c = kv.get_double("c", c.c);
  c.C = kv.get_double("C", c.C);
  c.n_summands = static_cast<int>(kv.get_int("n_summands", c.n_summands));
  c.mode = parse_tau_mode(kv.get_string("mode", "sum"));
  // Resolve model and phi now so a bad spec is a config error, not a late failure.
  (void)RandomModel::parse(c.model);
  (void)OrliczFunction::parse(c.phi);
  c.validate();
  return c;
}

CampaignConfig CampaignConfig::load(const std::string& path) { return from_kv(KeyValueConfig::load(path)); }

CampaignResult verify_dominance(const CampaignConfig& config) {
  const Prepared p = prepare(config);
  CampaignResult r;
  r.bound = std::string(to_string(config.bound));
  r.model = p.model.name();
  r.trials = config.trials;
  r.constants = p.constants;
  r.points = evaluate(p, default_constant(p));
  r.summary.points = static_cast<std::int64_t>(r.points.size());
  r.summary.worst_margin = r.points.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& g : r.points) {
    if (!g.dominated) ++r.summary.violations;
    r.summary.worst_margin = std::min(r.summary.worst_margin, g.bound - g.tail.ci_high);
  }
  r.provenance = {config.seed, config.stream, config.hash()};
  return r;
}

Calibration calibrate_constant(const CampaignConfig& config, std::string_view constant) {
  bool largest = false;
  if (constant == "c") {
    if (config.bound != BoundKind::iid) throw ConfigError("constant c belongs to the iid bound");
    largest = true;
  } else if (constant == "C") {
    if (config.bound != BoundKind::randomized) throw ConfigError("constant C belongs to the randomized bound");
  } else if (constant == "K") {
    if (config.bound != BoundKind::general) throw ConfigError("constant K belongs to the general bound");
  } else {
    throw ConfigError("unknown constant '" + std::string(constant) + "' (expected c, C or K)");
  }
  const Prepared p = prepare(config);
  const auto feasible = [&](double value) {
    const auto pts = evaluate(p, value);
    return std::all_of(pts.begin(), pts.end(), [](const GridPoint& g) { return g.dominated; });
  };
  Calibration cal;
  cal.constant = std::string(constant);
  for (const auto& g : evaluate(p, default_constant(p))) cal.grid.push_back(g.params);

  // Feasible values form [0, c*] when largest, [C*, inf) otherwise.
  const double good_end = largest ? kCalibrationLow : kCalibrationHigh;
  const double cap_end = largest ? kCalibrationHigh : kCalibrationLow;
  if (feasible(cap_end)) {
    cal.value = cap_end;
    cal.at_cap = true;
    return cal;
  }
  if (!feasible(good_end)) {
    throw BoundError(ErrorKind::calibration_failed,
                     "no value of " + cal.constant + " in [1e-4, 1e4] makes every grid point dominated");
  }
  double ok = good_end;
  double bad = cap_end;
  for (int it = 0; it < 200 && std::abs(std::log(bad / ok)) > 1e-10; ++it) {
    const double mid = std::sqrt(ok * bad);
    if (feasible(mid)) {
      ok = mid;
    } else {
      bad = mid;
    }
  }
  cal.value = ok;
  return cal;
}

}  // namespace phib
