#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace phib {

/// 12 sqrt(d) e K3 sqrt(ln(1/delta) / n); needs n >= ln(1/delta) >= 1.
double pca_bound(int d, std::int64_t n, double delta, double K3);

/// The two candidates for the second term of the PCA argument, both times
/// sqrt(ln(1/delta)/n): K3 and the psi_1 norm of ||X||^2.
struct PcaSecondTerm {
  double k3_term = 0.0;
  double psi1_term = 0.0;
};
PcaSecondTerm pca_second_term(std::int64_t n, double delta, double K3, double psi1_norm_sq);

struct PcaInstance {
  int d = 1;
  Eigen::MatrixXd population;  ///< E X X^T, m x m
  Eigen::MatrixXd sample;      ///< n x m, one point per row
};

/// sup over rank-d projections P of (1/n) sum ||P x_i - x_i||^2 - E||P X - X||^2.
/// With M = (1/n) sum x_i x_i^T - E X X^T this is tr(M) + (top-d eigenvalue
/// sum of -M), i.e. the sum of the m - d largest eigenvalues of M.
struct PcaGap {
  double gap = 0.0;
  double projection_term = 0.0;  ///< sup_P <P, -M>
  double trace_term = 0.0;       ///< tr(M)
  double positive_part() const noexcept { return gap > 0.0 ? gap : 0.0; }
};

PcaGap pca_empirical_gap(const PcaInstance& inst);
PcaGap pca_gap_from_moment_difference(const Eigen::MatrixXd& M, int d);

/// Sum of the d largest eigenvalues of symmetric M (= sup of <P, M> over rank-d projections).
double top_eigen_sum(const Eigen::MatrixXd& M, int d);

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

/// (2/n) L E_eps ||sum eps_i x_i|| averaged over n_eps Rademacher draws.
McEstimate rademacher_complexity_linear(const Eigen::MatrixXd& points, double L, std::int64_t n_eps, std::uint64_t seed,
                                        std::uint64_t stream = 0);

/// complexity + 12 e L normX sqrt(ln(1/delta) / n).
double rademacher_bound(std::int64_t n, double delta, double L, double normX, double complexity);

/// (12 / sqrt(n)) (L normX + normY) (1 + e sqrt(ln(1/delta))).
double regression_bound(std::int64_t n, double delta, double L, double normX, double normY);

enum class FunctionClassKind { lipschitz_ball, linear_regression };

struct FunctionClassSpec {
  FunctionClassKind kind = FunctionClassKind::lipschitz_ball;
  double L = 1.0;
  void validate() const;
};

/// sup over ||w|| <= L of (1/n) sum <w, x_i> - <w, mu> = L ||mean - mu||.
double linear_class_sup_deviation(const Eigen::MatrixXd& points, const Eigen::VectorXd& population_mean, double L);

/// n x m matrix of independent N(0,1) entries; row i uses substream i.
Eigen::MatrixXd standard_gaussian_sample(std::int64_t n, int m, std::uint64_t seed, std::uint64_t stream);

}  // namespace phib
