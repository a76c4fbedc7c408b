#include "phibound/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phibound/errors.hpp"
#include "phibound/functional.hpp"
#include "phibound/random.hpp"

namespace phib {

namespace {

constexpr double kE = std::numbers::e;

void require_symmetric(const Eigen::MatrixXd& M, const char* what) {
  if (M.rows() != M.cols()) throw BoundError(ErrorKind::domain, std::string(what) + " must be square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw BoundError(ErrorKind::domain, std::string(what) + " is not symmetric");
  }
}

}  // namespace

double pca_bound(int d, std::int64_t n, double delta, double K3) {
  if (d < 1) throw BoundError(ErrorKind::domain, "pca_bound needs d >= 1");
  if (!(K3 >= 0.0)) throw BoundError(ErrorKind::domain, "pca_bound needs K3 >= 0");
  const double L = confidence_log_term(n, delta);
  return 12.0 * std::sqrt(static_cast<double>(d)) * kE * K3 * std::sqrt(L / static_cast<double>(n));
}

PcaSecondTerm pca_second_term(std::int64_t n, double delta, double K3, double psi1_norm_sq) {
  const double root = std::sqrt(confidence_log_term(n, delta) / static_cast<double>(n));
  return {K3 * root, psi1_norm_sq * root};
}

double top_eigen_sum(const Eigen::MatrixXd& M, int d) {
  require_symmetric(M, "matrix");
  if (d < 0 || d > M.rows()) throw BoundError(ErrorKind::domain, "rank d out of range");
  if (d == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  return ev.tail(d).sum();
}

PcaGap pca_gap_from_moment_difference(const Eigen::MatrixXd& M, int d) {
  require_symmetric(M, "moment difference");
  if (d < 0 || d > M.rows()) throw BoundError(ErrorKind::domain, "rank d out of range");
  PcaGap g;
  g.trace_term = M.trace();
  g.projection_term = top_eigen_sum(-M, d);
  g.gap = g.trace_term + g.projection_term;
  return g;
}

PcaGap pca_empirical_gap(const PcaInstance& inst) {
  require_symmetric(inst.population, "population second-moment matrix");
  if (inst.sample.cols() != inst.population.rows()) throw BoundError(ErrorKind::domain, "sample dimension mismatch");
  if (inst.sample.rows() < 1) throw BoundError(ErrorKind::domain, "sample is empty");
  const Eigen::MatrixXd empirical =
      (inst.sample.transpose() * inst.sample) / static_cast<double>(inst.sample.rows());
  Eigen::MatrixXd M = empirical - inst.population;
  M = 0.5 * (M + M.transpose());
  return pca_gap_from_moment_difference(M, inst.d);
}

McEstimate rademacher_complexity_linear(const Eigen::MatrixXd& points, double L, std::int64_t n_eps, std::uint64_t seed,
                                        std::uint64_t stream) {
  if (points.rows() < 1) throw BoundError(ErrorKind::domain, "need at least one point");
  if (n_eps < 2) throw BoundError(ErrorKind::domain, "need at least two sign draws");
  if (!(L >= 0.0)) throw BoundError(ErrorKind::domain, "L must be >= 0");
  const double scale = 2.0 / static_cast<double>(points.rows());
  double sum = 0.0;
  double sum_sq = 0.0;
  Eigen::VectorXd acc(points.cols());
  for (std::int64_t r = 0; r < n_eps; ++r) {
    CounterRng rng(seed, stream, static_cast<std::uint32_t>(r));
    acc.setZero();
    for (Eigen::Index i = 0; i < points.rows(); ++i) acc += rng.rademacher() * points.row(i).transpose();
    const double v = scale * acc.norm();
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_eps);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {L * mean, L * std::sqrt(var / n)};
}

double rademacher_bound(std::int64_t n, double delta, double L, double normX, double complexity) {
  if (!(L >= 0.0) || !(normX >= 0.0)) throw BoundError(ErrorKind::domain, "L and normX must be >= 0");
  const double Lg = confidence_log_term(n, delta);
  return complexity + 12.0 * kE * L * normX * std::sqrt(Lg / static_cast<double>(n));
}

double regression_bound(std::int64_t n, double delta, double L, double normX, double normY) {
  if (!(L >= 0.0) || !(normX >= 0.0) || !(normY >= 0.0)) {
    throw BoundError(ErrorKind::domain, "L, normX and normY must be >= 0");
  }
  const double Lg = confidence_log_term(n, delta);
  return 12.0 / std::sqrt(static_cast<double>(n)) * (L * normX + normY) * (1.0 + kE * std::sqrt(Lg));
}

void FunctionClassSpec::validate() const {
  if (!(L > 0.0)) throw BoundError(ErrorKind::domain, "function class needs L > 0");
}

double linear_class_sup_deviation(const Eigen::MatrixXd& points, const Eigen::VectorXd& population_mean, double L) {
  if (points.rows() < 1 || points.cols() != population_mean.size()) {
    throw BoundError(ErrorKind::domain, "points and mean must share a dimension");
  }
  const Eigen::VectorXd mean = points.colwise().mean().transpose();
  return L * (mean - population_mean).norm();
}

Eigen::MatrixXd standard_gaussian_sample(std::int64_t n, int m, std::uint64_t seed, std::uint64_t stream) {
  Eigen::MatrixXd X(n, m);
  for (std::int64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, stream, static_cast<std::uint32_t>(i));
    for (int j = 0; j < m; ++j) X(i, j) = rng.normal();
  }
  return X;
}

}  // namespace phib
