// Desk-scale acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cli.hpp"
#include "phibound/applications.hpp"
#include "phibound/canonical.hpp"
#include "phibound/errors.hpp"
#include "phibound/functional.hpp"
#include "phibound/montecarlo.hpp"
#include "phibound/norms.hpp"
#include "phibound/orlicz.hpp"
#include "phibound/randomized.hpp"

using namespace phib;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::llround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

std::vector<OrliczFunction> builtins() {
  return {OrliczFunction::quadratic(), OrliczFunction::power(3.0), OrliczFunction::exp_type(),
          OrliczFunction::entropy_type(), OrliczFunction::scaled_quadratic()};
}

Outcome involution() {
  const auto xs = linear_grid(-10.0, 10.0, 0.01);
  double worst = 0.0;
  std::string who;
  for (const auto& phi : builtins()) {
    const auto star = phi.numeric_conjugate_function();
    for (double x : xs) {
      const double err = std::abs(maximize_conjugate(star, x).value - phi(x));
      if (err > worst) {
        worst = err;
        who = phi.name();
      }
    }
  }
  return {worst <= 1e-6, fmt("max |phi** - phi| = %.3g", worst) + " (" + who + ")"};
}

Outcome nv_closed_form() {
  std::mt19937_64 gen(20240601);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> uv(0.1, 10.0);
  const auto quad = OrliczFunction::quadratic();
  double worst_rel = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    CoefficientVector t;
    for (int i = 0; i < 20; ++i) t.entries.push_back(g(gen));
    const double v = uv(gen);
    const double exact = t.l2() * std::sqrt(2.0 * v);
    worst_rel = std::max(worst_rel, std::abs(solve_nv(quad, t, v).value / exact - 1.0));
  }
  double worst_brute = 0.0;
  const std::vector<std::vector<OrliczFunction>> families = {
      {quad}, {quad, quad}, {OrliczFunction::power(3.0), OrliczFunction::power(3.0)},
      {quad, OrliczFunction::power(3.0), OrliczFunction::exp_type()}};
  const std::vector<CoefficientVector> ts = {CoefficientVector{{1.0}}, CoefficientVector{{3.0, 4.0}},
                                             CoefficientVector{{1.0, 1.0}}, CoefficientVector{{0.5, -1.0, 2.0}}};
  const std::vector<double> vs = {1.0, 2.0, 2.0, 1.0};
  for (std::size_t i = 0; i < families.size(); ++i) {
    const double a = solve_nv(families[i], ts[i], vs[i]).value;
    const double b = nv_brute_force(families[i], ts[i], vs[i], 1e-3);
    worst_brute = std::max(worst_brute, std::abs(a - b));
  }
  return {worst_rel <= 1e-8 && worst_brute <= 1e-2,
          fmt("closed-form rel err %.3g, brute-force abs diff %.3g", worst_rel, worst_brute)};
}

Outcome general_dominance() {
  CampaignConfig cfg;
  cfg.model = "gaussian:1";
  cfg.bound = BoundKind::general;
  cfg.phi = "quadratic";
  cfg.trials = 1000000;
  cfg.dimension = 20;
  cfg.seed = 31;
  const auto r = verify_dominance(cfg);
  return {r.all_dominated() && r.points.size() == 6,
          fmt("%g/%g points dominated, worst margin %.3g", static_cast<double>(r.points.size() - r.summary.violations),
              static_cast<double>(r.points.size()), r.summary.worst_margin)};
}

Outcome randomized_validity() {
  bool ok = true;
  std::string detail;
  for (double alpha : {0.1, 0.01}) {
    RandomizedCampaignSpec spec;
    spec.n_summands = 10;
    spec.alpha = alpha;
    spec.C = 4.0;
    spec.mode = TauMode::sum;
    spec.n_trials = 100000;
    spec.seed = 41;
    const auto r = randomized_validity_campaign(RandomModel::gaussian(1.0), OrliczFunction::quadratic(), spec);
    const double zdiff = std::abs(r.mean_difference - r.expected_difference) / r.difference_se;
    ok = ok && r.ci_high <= alpha && zdiff <= 3.0;
    detail += fmt("alpha=%g: ci_high %.3g, tightening z %.2f; ", alpha, r.ci_high, zdiff);
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome markov_identity() {
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<std::string, RandomModel>> models = {{"exponential:1", RandomModel::exponential(1.0)},
                                                                   {"constant:0.5", RandomModel::constant(0.5)},
                                                                   {"constant:2", RandomModel::constant(2.0)}};
  for (const auto& [name, m] : models) {
    const auto r = randomized_markov_check(m, 1.0, 100000, 51);
    ok = ok && r.passed;
    detail += name + fmt(" z=%.2f; ", r.z);
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome infimum_inequality() {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> c1(0.1, 10.0), a(0.0, 5.0), t(0.1, 10.0);
  double worst = -INFINITY, worst_eq = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double C1 = c1(gen), A = a(gen), T = t(gen);
    worst = std::max(worst, m20_lhs_grid(C1, A, T) - m20_rhs(C1, A, T));
    worst_eq = std::max(worst_eq, std::abs(m20_lhs_grid(C1, 0.0, T) - m20_rhs(C1, 0.0, T)));
  }
  return {worst <= 1e-9 && worst_eq <= 1e-9, fmt("max(lhs - rhs) = %.3g, a=0 gap %.3g", worst, worst_eq)};
}

Outcome functional_coins() {
  const auto fm = DiscreteFunctionModel::sum(DiscreteFunctionModel::fair_coins(12));
  const auto in = functional_norm_inputs(fm, OrliczFunction::scaled_quadratic());
  const auto law = fm.distribution();
  int bad = 0;
  double min_margin = INFINITY;
  for (int i = 1; i <= 50; ++i) {
    const double t = 12.0 * i / 50.0;
    double tail = 0.0;
    for (std::size_t k = 0; k < law.values.size(); ++k) {
      if (law.values[k] >= t) tail += law.probs[k];
    }
    const double margin = med_tail_bound(t, in.A, in.B) - tail;
    min_margin = std::min(min_margin, margin);
    bad += margin < 0.0;
  }
  return {bad == 0, fmt("A=%g B=%g, min(bound - tail) over 50 t = %.3g", in.A, in.B, min_margin)};
}

Outcome vector_mean_coverage() {
  const int n = 200, m = 5, replicas = 2000;
  const double delta = 0.1;
  const double norm = moment_orlicz_norm(RandomModel::chi(m), OrliczFunction::scaled_quadratic()).value;
  const double bound = vector_mean_bound(n, delta, norm);
  std::int64_t exceed = 0;
  for (int r = 0; r < replicas; ++r) {
    const auto X = standard_gaussian_sample(n, m, 71, static_cast<std::uint64_t>(r));
    exceed += X.colwise().mean().norm() > bound;
  }
  const auto ci = clopper_pearson(exceed, replicas, confidence_for_multiplier(3.0));
  return {ci.hi <= delta, fmt("bound %.4g, exceedances %g/2000, CI upper %.3g", bound, static_cast<double>(exceed), ci.hi)};
}

Outcome pca() {
  const int m = 10, d = 3, n = 500, replicas = 500;
  const double delta = 0.1;
  const double K3 = moment_orlicz_norm(RandomModel::chi_squared(m), OrliczFunction::scaled_quadratic()).value;
  const double bound = pca_bound(d, n, delta, K3);
  int covered = 0;
  double worst_gap = 0.0;
  for (int r = 0; r < replicas; ++r) {
    PcaInstance inst;
    inst.d = d;
    inst.population = Eigen::MatrixXd::Identity(m, m);
    inst.sample = standard_gaussian_sample(n, m, 81, static_cast<std::uint64_t>(r));
    const double g = pca_empirical_gap(inst).positive_part();
    worst_gap = std::max(worst_gap, g);
    covered += g <= bound;
  }
  const double coverage = static_cast<double>(covered) / replicas;

  // Eigen-sup identity against random orthonormal d-frames.
  std::mt19937_64 gen(82);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = g(gen);
  const Eigen::MatrixXd M = 0.5 * (A + A.transpose());
  const double top = top_eigen_sum(M, d);
  double best = -INFINITY;
  for (int rep = 0; rep < 10000; ++rep) {
    Eigen::MatrixXd F(m, d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) F(i, j) = g(gen);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(F).householderQ() * Eigen::MatrixXd::Identity(m, d);
    best = std::max(best, (Q.transpose() * M * Q).trace());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::MatrixXd V = es.eigenvectors().rightCols(d);
  const double attained = std::abs((V.transpose() * M * V).trace() - top);
  const bool ok = coverage >= 1.0 - delta && best <= top + 1e-9 && attained <= 1e-9;
  return {ok, fmt("coverage %.3f (bound %.4g, max gap %.3g)", coverage, bound, worst_gap) +
                  fmt(", frames: best %.6f <= top %.6f, eigvec gap %.2g", best, top, attained)};
}

Outcome validator() {
  const auto grid = standard_grid();
  std::string failing;
  for (const auto& phi : builtins()) {
    const auto r = validate_n_function(phi, grid);
    for (const auto& c : r.checks) {
      if (!c.passed) failing += phi.name() + ":" + c.name + " ";
    }
  }
  const auto planted = OrliczFunction::callable("x^2(1.5+sin x)", [](double x) { return x * x * (1.5 + std::sin(x)); });
  const auto planted_report = validate_n_function(planted, grid);
  const auto* convex = planted_report.find("convex");
  const bool caught = convex != nullptr && !convex->passed && !convex->witness.empty();
  return {failing.empty() && caught,
          (failing.empty() ? std::string("built-ins pass") : "failing: " + failing) +
              (caught ? "; counterexample caught at " + convex->witness : "; counterexample NOT caught")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "phibound_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = (dir / "campaign.cfg").string();
  std::ofstream(cfg) << "bound = iid\nmodel = uniform:1\ntrials = 100000\nz_grid = 0.5, 1, 2, 4\nseed = 91\n";
  std::vector<std::string> stdout_text;
  for (const char* run : {"first", "second"}) {
    std::ostringstream out, err;
    cli::run({"verify", "--config", cfg, "--output-dir", (dir / run).string(), "--format", "csv"}, out, err);
    stdout_text.push_back(out.str());
  }
  const bool json = slurp(dir / "first" / "verify.json") == slurp(dir / "second" / "verify.json") &&
                    !slurp(dir / "first" / "verify.json").empty();
  const bool csv = slurp(dir / "first" / "verify.csv") == slurp(dir / "second" / "verify.csv") &&
                   !slurp(dir / "first" / "verify.csv").empty();
  const bool out = stdout_text[0] == stdout_text[1];
  fs::remove_all(dir);
  return {json && csv && out, std::string("json ") + (json ? "identical" : "DIFFERS") + ", csv " +
                                  (csv ? "identical" : "DIFFERS") + ", stdout " + (out ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;  // 0 = no runtime requirement
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"conjugate involution", 5.0, involution},
      {"N_v closed form and brute force", 10.0, nv_closed_form},
      {"canonical tail dominance", 120.0, general_dominance},
      {"randomized Hoeffding validity", 60.0, randomized_validity},
      {"randomized Markov identity", 0.0, markov_identity},
      {"infimum inequality", 0.0, infimum_inequality},
      {"functional bound on 12 coins", 0.0, functional_coins},
      {"Hilbert mean coverage", 120.0, vector_mean_coverage},
      {"PCA coverage and eigen-sup", 0.0, pca},
      {"N-function validator", 0.0, validator},
      {"verify reproducibility", 0.0, reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.passed = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_s);
    }
    failures += !o.passed;
    std::printf("%s %2zu %-32s %7.2fs  %s\n", o.passed ? "PASS" : "FAIL", i + 1, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
