#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "phibound/applications.hpp"
#include "phibound/canonical.hpp"
#include "phibound/errors.hpp"
#include "phibound/functional.hpp"
#include "phibound/montecarlo.hpp"
#include "phibound/norms.hpp"
#include "phibound/orlicz.hpp"
#include "phibound/randomized.hpp"
#include "phibound/report.hpp"

namespace phib::cli {

namespace {

constexpr const char* kOutputDirEnv = "PHIBOUND_OUTPUT_DIR";

struct Context {
  std::ostream& out;
  std::string format = "table";
  std::string output_dir;
  std::string command;

  ReportFormat fmt() const { return parse_report_format(format); }

  /// Prints `text` and, when an output directory is set, saves the JSON
  /// (and CSV when given) next to it as <command>.json / <command>.csv.
  void emit(const std::string& text, const std::string& json, const std::string& csv = {}) const {
    out << text;
    if (output_dir.empty()) return;
    std::filesystem::create_directories(output_dir);
    const auto base = std::filesystem::path(output_dir) / command;
    std::ofstream(base.string() + ".json") << json;
    if (!csv.empty()) std::ofstream(base.string() + ".csv") << csv;
  }

  template <typename R>
  void report(const R& r) const {
    emit(emit_report(r, fmt()), emit_report(r, ReportFormat::json));
  }

  void scalars(const Scalars& s) const { emit(emit_scalars(s, fmt()), emit_scalars(s, ReportFormat::json)); }
};

std::vector<OrliczFunction> parse_phis(const std::string& specs, std::size_t n) {
  std::vector<OrliczFunction> out;
  std::stringstream in(specs);
  std::string item;
  while (std::getline(in, item, ';')) out.push_back(OrliczFunction::parse(item));
  if (out.size() == 1 && n > 1) out.assign(n, out.front());
  if (out.size() != n) {
    throw ConfigError("--phi lists " + std::to_string(out.size()) + " functions for " + std::to_string(n) + " coefficients");
  }
  return out;
}

Eigen::MatrixXd read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      rows.push_back(CoefficientVector::parse(line).entries);
    } catch (const ConfigError&) {
      if (rows.empty()) continue;  // header row
      throw;
    }
    if (rows.back().size() != rows.front().size()) throw ConfigError("ragged rows in '" + path + "'");
  }
  if (rows.empty()) throw ConfigError("no data rows in '" + path + "'");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return X;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concentration bounds under Orlicz-type conditions, with Monte Carlo verification", "phibound"};
  app.require_subcommand(1);
  app.allow_extras(false);
  app.fallthrough();

  const char* env_dir = std::getenv(kOutputDirEnv);
  Context ctx{out, "table", env_dir ? env_dir : "", ""};
  app.add_option("--format", ctx.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--output-dir", ctx.output_dir,
                 std::string("also save <subcommand>.json (and .csv for campaigns) here; default $") + kOutputDirEnv);

  std::function<int()> action;

  // conjugate
  std::string phi_spec = "quadratic";
  double y = 0.0;
  bool numeric = false;
  auto* conj = app.add_subcommand("conjugate", "Young-Fenchel conjugate phi*(y)");
  conj->add_option("--phi", phi_spec, "quadratic, scaled-quadratic, power:<p>, exp, entropy or csv:<path>");
  conj->add_option("--y", y, "argument")->required();
  conj->add_flag("--numeric", numeric, "force the numerical transform and report the maximiser");
  conj->callback([&] {
    action = [&] {
      const auto phi = OrliczFunction::parse(phi_spec);
      if (numeric) {
        const auto m = maximize_conjugate(phi, y);
        ctx.scalars({{"y", y}, {"conjugate", m.value}, {"maximizer", m.maximizer}});
      } else {
        ctx.scalars({{"y", y}, {"conjugate", phi.conjugate(y)}});
      }
      return 0;
    };
  });

  // validate-phi
  auto* validate = app.add_subcommand("validate-phi", "check the N-function axioms and growth properties");
  validate->add_option("--phi", phi_spec, "function spec")->required();
  validate->callback([&] {
    action = [&] {
      const auto grid = standard_grid();
      const auto r = validate_n_function(OrliczFunction::parse(phi_spec), grid);
      ctx.report(r);
      return r.all_passed() ? 0 : 1;
    };
  });

  // nv
  std::string t_text;
  double v = 1.0;
  std::optional<double> brute_step;
  auto* nv = app.add_subcommand("nv", "solve N_v(t) = sup{sum t_i b_i : sum phi_i(b_i) <= v}");
  nv->add_option("--phi", phi_spec, "one spec, or one per coefficient separated by ';'");
  nv->add_option("--t", t_text, "comma-separated coefficients")->required();
  nv->add_option("--v", v, "budget v >= 0")->required();
  nv->add_option("--brute-force", brute_step, "also run the grid oracle with this step (n <= 4)");
  nv->callback([&] {
    action = [&] {
      const auto t = CoefficientVector::parse(t_text);
      const auto phis = parse_phis(phi_spec, t.size());
      const auto sol = solve_nv(phis, t, v);
      if (brute_step) {
        const double bf = nv_brute_force(phis, t, v, *brute_step);
        ctx.scalars({{"value", sol.value}, {"brute_force", bf}, {"multiplier", sol.multiplier}});
      } else {
        ctx.report(sol);
      }
      return 0;
    };
  });

  // tail-bound
  std::string kind = "general";
  double s = 1.0, K = 1.0, z = 1.0, K1 = 1.0, K2 = 1.0, c = 1.0;
  auto* tail = app.add_subcommand("tail-bound", "canonical-process tail bound (general or iid form)");
  tail->add_option("--kind", kind, "general or iid")->check(CLI::IsMember({"general", "iid"}));
  tail->add_option("--phi", phi_spec, "function spec");
  tail->add_option("--t", t_text, "comma-separated coefficients")->required();
  tail->add_option("--v", v, "budget v (general)");
  tail->add_option("--s", s, "s >= 1 (general)");
  tail->add_option("--K", K, "K (general)");
  tail->add_option("--z", z, "threshold z (iid)");
  tail->add_option("--K1", K1, "K1 (iid)");
  tail->add_option("--K2", K2, "K2 (iid)");
  tail->add_option("--c", c, "universal constant c (iid)");
  tail->callback([&] {
    action = [&] {
      const auto t = CoefficientVector::parse(t_text);
      if (kind == "general") {
        const auto sol = solve_nv(parse_phis(phi_spec, t.size()), t, v);
        ctx.report(tail_bound_general(sol, s, K));
      } else {
        ctx.report(tail_bound_iid(z, t, OrliczFunction::parse(phi_spec), K1, K2, c));
      }
      return 0;
    };
  });

  // randomized
  double alpha = 0.1, tau = 1.0, C = 4.0, u = 1.0, a = 1.0;
  bool campaign = false, markov = false;
  std::string model_spec = "gaussian:1", mode = "sum";
  int n_summands = 10;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1, stream = 0;
  auto* rnd = app.add_subcommand("randomized", "randomized Hoeffding threshold, validity campaign or Markov check");
  rnd->add_option("--alpha", alpha, "level in (0,1)");
  rnd->add_option("--tau", tau, "tau_phi norm");
  rnd->add_option("--phi", phi_spec, "function spec");
  rnd->add_option("--C", C, "constant C");
  rnd->add_option("--u", u, "uniform draw in (0,1]");
  rnd->add_flag("--campaign", campaign, "run the Monte Carlo validity campaign");
  rnd->add_flag("--markov", markov, "check P(X >= U/a) = E min(aX,1)");
  rnd->add_option("--model", model_spec, "model spec for --campaign / --markov");
  rnd->add_option("--n", n_summands, "summands per trial");
  rnd->add_option("--mode", mode, "sum or summand")->check(CLI::IsMember({"sum", "summand"}));
  rnd->add_option("--a", a, "a > 0 for --markov");
  rnd->add_option("--trials", trials, "Monte Carlo trials");
  rnd->add_option("--seed", seed, "seed");
  rnd->add_option("--stream", stream, "stream index");
  rnd->callback([&] {
    action = [&] {
      if (markov) {
        ctx.report(randomized_markov_check(RandomModel::parse(model_spec), a, trials, seed, stream));
        return 0;
      }
      const auto phi = OrliczFunction::parse(phi_spec);
      if (campaign) {
        RandomizedCampaignSpec spec;
        spec.n_summands = n_summands;
        spec.alpha = alpha;
        spec.C = C;
        spec.mode = parse_tau_mode(mode);
        spec.n_trials = trials;
        spec.seed = seed;
        spec.stream = stream;
        const auto r = randomized_validity_campaign(RandomModel::parse(model_spec), phi, spec);
        ctx.report(r);
        return r.ci_high <= alpha ? 0 : 1;
      }
      ctx.scalars({{"threshold", randomized_hoeffding_threshold(alpha, tau, phi, C, u)},
                   {"classical", classical_threshold(alpha, tau, phi, C)}});
      return 0;
    };
  });

  // functional-bound
  double ft = 1.0, A = 0.0, B = 0.0, delta = 0.1, norm = 0.0;
  std::optional<int> coins;
  std::string model_json;
  std::int64_t n = 100;
  bool vector_mean = false;
  auto* fb = app.add_subcommand("functional-bound", "tail bound for f(X) from (A, B), or the Hilbert-space mean bound");
  fb->add_option("--t", ft, "deviation t > 0");
  fb->add_option("--A", A, "A >= 0");
  fb->add_option("--B", B, "B >= 0");
  fb->add_option("--coins", coins, "compute (A, B) for the sum of this many fair +-1 coins");
  fb->add_option("--model-json", model_json, "compute (A, B) for a discrete function model file");
  fb->add_option("--phi", phi_spec, "function spec for the moment-ratio norm (must satisfy phi^{-1}(1) = 1)");
  fb->add_flag("--vector-mean", vector_mean, "evaluate 6 e norm sqrt(ln(1/delta)/n) instead");
  fb->add_option("--n", n, "sample size (vector mean)");
  fb->add_option("--delta", delta, "confidence (vector mean)");
  fb->add_option("--norm", norm, "moment-ratio norm of ||X|| (vector mean)");
  fb->callback([&] {
    action = [&] {
      if (vector_mean) {
        ctx.scalars({{"bound", vector_mean_bound(n, delta, norm)}});
        return 0;
      }
      if (coins || !model_json.empty()) {
        if (phi_spec == "quadratic") phi_spec = "scaled-quadratic";
        const auto phi = OrliczFunction::parse(phi_spec);
        std::optional<DiscreteFunctionModel> fm;
        if (coins) {
          fm = DiscreteFunctionModel::sum(DiscreteFunctionModel::fair_coins(*coins));
        } else {
          std::ifstream in(model_json);
          if (!in) throw ConfigError("cannot open model file '" + model_json + "'");
          fm = DiscreteFunctionModel::from_json(in);
        }
        const auto inputs = functional_norm_inputs(*fm, phi);
        A = inputs.A;
        B = inputs.B;
      }
      ctx.scalars({{"t", ft}, {"A", A}, {"B", B}, {"bound", med_tail_bound(ft, A, B)}});
      return 0;
    };
  });

  // pca
  int d = 1, m = 0, replicas = 0;
  std::optional<double> K3;
  auto* pca = app.add_subcommand("pca", "PCA reconstruction-error bound, optionally with empirical replicas");
  pca->add_option("--d", d, "subspace rank")->required();
  pca->add_option("--n", n, "sample size")->required();
  pca->add_option("--delta", delta, "confidence");
  pca->add_option("--K3", K3, "moment-ratio norm of ||X||^2");
  pca->add_option("--m", m, "ambient dimension for standard Gaussian data (derives K3 when absent)");
  pca->add_option("--replicas", replicas, "empirical replicas on standard Gaussian data (needs --m)");
  pca->add_option("--seed", seed, "seed");
  pca->callback([&] {
    action = [&] {
      if (!K3 && m < 1) throw ConfigError("pca needs --K3 or --m");
      const double k3 = K3 ? *K3
                           : moment_orlicz_norm(RandomModel::chi_squared(m), OrliczFunction::scaled_quadratic()).value;
      const double bound = pca_bound(d, n, delta, k3);
      Scalars sc{{"K3", k3}, {"bound", bound}};
      if (replicas > 0) {
        if (m < 1) throw ConfigError("--replicas needs --m");
        if (d > m) throw BoundError(ErrorKind::domain, "d must not exceed m");
        int covered = 0;
        double worst = 0.0;
        for (int r = 0; r < replicas; ++r) {
          PcaInstance inst{d, Eigen::MatrixXd::Identity(m, m), standard_gaussian_sample(n, m, seed, static_cast<std::uint64_t>(r))};
          const double gap = pca_empirical_gap(inst).positive_part();
          worst = std::max(worst, gap);
          if (gap <= bound) ++covered;
        }
        sc.emplace_back("replicas", replicas);
        sc.emplace_back("coverage", static_cast<double>(covered) / replicas);
        sc.emplace_back("max_gap", worst);
      }
      ctx.scalars(sc);
      return 0;
    };
  });

  // rademacher
  double L = 1.0, normX = 0.0, normY = 0.0, complexity = 0.0;
  bool regression = false;
  std::string data;
  std::int64_t n_eps = 10000;
  auto* rad = app.add_subcommand("rademacher", "Rademacher-complexity or regression bound");
  rad->add_option("--n", n, "sample size");
  rad->add_option("--delta", delta, "confidence");
  rad->add_option("--L", L, "Lipschitz constant");
  rad->add_option("--normX", normX, "moment-ratio norm of ||X||");
  rad->add_option("--normY", normY, "moment-ratio norm of ||Y|| (regression)");
  rad->add_option("--complexity", complexity, "Rademacher complexity term");
  rad->add_option("--data", data, "CSV of points; estimates the linear-class complexity");
  rad->add_option("--n-eps", n_eps, "sign draws for --data");
  rad->add_option("--seed", seed, "seed");
  rad->add_flag("--regression", regression, "evaluate the regression bound");
  rad->callback([&] {
    action = [&] {
      if (regression) {
        ctx.scalars({{"bound", regression_bound(n, delta, L, normX, normY)}});
        return 0;
      }
      Scalars sc;
      if (!data.empty()) {
        const auto X = read_points_csv(data);
        const auto est = rademacher_complexity_linear(X, L, n_eps, seed, 0);
        complexity = est.mean;
        n = X.rows();
        sc.emplace_back("complexity_se", est.se);
      }
      sc.insert(sc.begin(), {"complexity", complexity});
      sc.emplace_back("bound", rademacher_bound(n, delta, L, normX, complexity));
      ctx.scalars(sc);
      return 0;
    };
  });

  // verify / calibrate
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string constant = "c";
  const auto load_config = [&] {
    auto cfg = CampaignConfig::load(config_path);
    if (seed_override) cfg.seed = *seed_override;
    return cfg;
  };
  auto* ver = app.add_subcommand("verify", "Monte Carlo dominance campaign from a config file");
  ver->add_option("--config", config_path, "key = value campaign config")->required();
  ver->add_option("--seed", seed_override, "override the config seed");
  ver->callback([&] {
    action = [&] {
      const auto r = verify_dominance(load_config());
      ctx.emit(emit_report(r, ctx.fmt()), emit_report(r, ReportFormat::json), emit_report(r, ReportFormat::csv));
      return r.all_dominated() ? 0 : 1;
    };
  });
  auto* cal = app.add_subcommand("calibrate", "empirical calibration of c, C or K");
  cal->add_option("--config", config_path, "key = value campaign config")->required();
  cal->add_option("--constant", constant, "c (iid), C (randomized) or K (general)");
  cal->add_option("--seed", seed_override, "override the config seed");
  cal->callback([&] {
    action = [&] {
      ctx.report(calibrate_constant(load_config(), constant));
      return 0;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  for (const auto* sub : app.get_subcommands()) ctx.command = sub->get_name();
  try {
    return action ? action() : 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const BoundError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace phib::cli
