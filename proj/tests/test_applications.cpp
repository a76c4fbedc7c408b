#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phibound/applications.hpp"
#include "phibound/errors.hpp"
#include "phibound/norms.hpp"

using namespace phib;

namespace {

constexpr double kE = std::numbers::e;

Eigen::MatrixXd random_symmetric(std::mt19937_64& gen, int m) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(gen);
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, int m) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
}

}  // namespace

TEST(PcaBound, Examples) {
  EXPECT_NEAR(pca_bound(4, 100, std::exp(-1.0), 1.0), 24.0 * kE / 10.0, 1e-12);
  EXPECT_NEAR(pca_bound(1, 3, std::exp(-3.0), 1.0), 12.0 * kE, 1e-12);
  EXPECT_EQ(pca_bound(3, 100, 0.1, 0.0), 0.0);
  EXPECT_THROW(pca_bound(1, 2, std::exp(-3.0), 1.0), BoundError);
  EXPECT_THROW(pca_bound(1, 100, 0.5, 1.0), BoundError);
}

TEST(PcaSecondTerm, ExposesBothCandidates) {
  const auto s = pca_second_term(100, std::exp(-4.0), 10.0, 3.0);
  EXPECT_NEAR(s.k3_term, 10.0 * 0.2, 1e-12);
  EXPECT_NEAR(s.psi1_term, 3.0 * 0.2, 1e-12);
}

TEST(PcaGap, Examples) {
  EXPECT_EQ(pca_gap_from_moment_difference(Eigen::MatrixXd::Zero(4, 4), 2).gap, 0.0);
  Eigen::MatrixXd M(2, 2);
  M << 0.3, 0.0, 0.0, -0.1;
  const auto g = pca_gap_from_moment_difference(M, 1);
  EXPECT_NEAR(g.gap, 0.3, 1e-12);
  EXPECT_NEAR(g.trace_term, 0.2, 1e-12);
  EXPECT_NEAR(g.projection_term, 0.1, 1e-12);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(pca_gap_from_moment_difference(bad, 1), BoundError);
  EXPECT_THROW(pca_gap_from_moment_difference(M, 3), BoundError);
}

TEST(PcaGap, MatchesBruteForceProjectionLoss) {
  // Direct evaluation of the loss difference at the optimal projection.
  std::mt19937_64 gen(5);
  const int m = 4, n = 50, d = 2;
  PcaInstance inst;
  inst.d = d;
  inst.population = Eigen::MatrixXd::Identity(m, m);
  inst.sample = standard_gaussian_sample(n, m, 3, 0);
  const auto g = pca_empirical_gap(inst);
  const Eigen::MatrixXd emp = inst.sample.transpose() * inst.sample / n;
  const Eigen::MatrixXd M = emp - inst.population;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  // The sup is attained by projecting onto the eigenvectors of the d smallest eigenvalues of M.
  const Eigen::MatrixXd V = es.eigenvectors().leftCols(d);
  const Eigen::MatrixXd P = V * V.transpose();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
  double emp_loss = 0.0;
  for (int i = 0; i < n; ++i) emp_loss += (P * inst.sample.row(i).transpose() - inst.sample.row(i).transpose()).squaredNorm();
  emp_loss /= n;
  const double pop_loss = ((I - P) * inst.population).trace();
  EXPECT_NEAR(g.gap, emp_loss - pop_loss, 1e-10);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::MatrixXd Q = random_orthogonal(gen, m).leftCols(d);
    const Eigen::MatrixXd R = Q * Q.transpose();
    double e2 = 0.0;
    for (int i = 0; i < n; ++i) e2 += (R * inst.sample.row(i).transpose() - inst.sample.row(i).transpose()).squaredNorm();
    EXPECT_LE(e2 / n - ((I - R) * inst.population).trace(), g.gap + 1e-10);
  }
}

TEST(PcaGap, EigenSupIdentity) {
  std::mt19937_64 gen(11);
  for (int m = 2; m <= 6; ++m) {
    for (int d = 1; d < m; ++d) {
      const Eigen::MatrixXd M = random_symmetric(gen, m);
      const double top = top_eigen_sum(M, d);
      double best = -INFINITY;
      for (int rep = 0; rep < 10000 / (5 * m); ++rep) {
        const Eigen::MatrixXd Q = random_orthogonal(gen, m).leftCols(d);
        best = std::max(best, (Q.transpose() * M * Q).trace());
      }
      EXPECT_LE(best, top + 1e-9);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
      const Eigen::MatrixXd V = es.eigenvectors().rightCols(d);
      EXPECT_NEAR((V.transpose() * M * V).trace(), top, 1e-9);
    }
  }
}

TEST(PcaGap, RotationInvariant) {
  std::mt19937_64 gen(12);
  const int m = 5;
  PcaInstance inst;
  inst.d = 2;
  const Eigen::MatrixXd A = random_symmetric(gen, m);
  inst.population = A * A.transpose() + Eigen::MatrixXd::Identity(m, m);
  inst.sample = standard_gaussian_sample(40, m, 4, 0);
  const double base = pca_empirical_gap(inst).gap;
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd U = random_orthogonal(gen, m);
    PcaInstance rot = inst;
    rot.population = U * inst.population * U.transpose();
    rot.sample = inst.sample * U.transpose();
    EXPECT_NEAR(pca_empirical_gap(rot).gap, base, 1e-8);
  }
}

TEST(PcaGap, GaussianReplicasRespectBound) {
  // K3 for ||X||^2 ~ chi2(10) with the moment-ratio norm (p_max 50) is E||X||^2 = 10.
  const double delta = std::exp(-1.0);
  const double K3 = moment_orlicz_norm(RandomModel::chi_squared(10), OrliczFunction::scaled_quadratic()).value;
  EXPECT_NEAR(K3, 10.0, 1e-9);
  const double bound = pca_bound(3, 500, delta, K3);
  int covered = 0;
  const int replicas = 100;
  for (int r = 0; r < replicas; ++r) {
    PcaInstance inst;
    inst.d = 3;
    inst.population = Eigen::MatrixXd::Identity(10, 10);
    inst.sample = standard_gaussian_sample(500, 10, 77, static_cast<std::uint64_t>(r));
    covered += pca_empirical_gap(inst).positive_part() <= bound;
  }
  EXPECT_GE(covered, static_cast<int>(std::ceil((1.0 - delta) * replicas)));
}

TEST(Rademacher, Examples) {
  EXPECT_EQ(rademacher_complexity_linear(Eigen::MatrixXd::Zero(10, 3), 1.0, 100, 1).mean, 0.0);
  Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(1, 4);
  unit(0, 2) = 1.0;
  const auto one = rademacher_complexity_linear(unit, 1.0, 100, 1);
  EXPECT_DOUBLE_EQ(one.mean, 2.0);
  EXPECT_EQ(one.se, 0.0);
}

TEST(Rademacher, GaussianComplexityMatchesMoment) {
  // For Gaussian rows, sum eps_i x_i ~ N(0, n I), so E||.|| = sqrt(n) E chi_5 = 10 * 2.127692162140974.
  const auto X = standard_gaussian_sample(100, 5, 21, 0);
  const auto est = rademacher_complexity_linear(X, 1.0, 10000, 22);
  EXPECT_NEAR(est.mean, 0.02 * 21.27692162140974, 0.04);
  EXPECT_GT(est.se, 0.0);
  EXPECT_LT(est.se, 0.005);
}

TEST(Rademacher, LinearInLAndNonnegative) {
  const auto X = standard_gaussian_sample(30, 3, 23, 0);
  const double base = rademacher_complexity_linear(X, 1.0, 500, 24).mean;
  EXPECT_GE(base, 0.0);
  for (double L : {0.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(rademacher_complexity_linear(X, L, 500, 24).mean, L * base);
}

TEST(Rademacher, BoundExamples) {
  EXPECT_NEAR(rademacher_bound(100, std::exp(-1.0), 1.0, 1.0, 0.5), 0.5 + 12.0 * kE / 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(rademacher_bound(100, 0.1, 0.0, 3.0, 0.7), 0.7);
  EXPECT_THROW(rademacher_bound(1, 0.01, 1.0, 1.0, 0.0), BoundError);
}

TEST(Rademacher, BoundCoversLinearClassDeviation) {
  const int n = 200, m = 5, replicas = 100;
  const double delta = std::exp(-1.0), L = 1.0;
  // moment-ratio norm of ||X|| for X ~ N(0, I_5) is E chi_5.
  const double normX = moment_orlicz_norm(RandomModel::chi(m), OrliczFunction::scaled_quadratic()).value;
  int covered = 0;
  for (int r = 0; r < replicas; ++r) {
    const auto X = standard_gaussian_sample(n, m, 31, static_cast<std::uint64_t>(r));
    const double comp = rademacher_complexity_linear(X, L, 200, 32, static_cast<std::uint64_t>(r)).mean;
    const double dev = linear_class_sup_deviation(X, Eigen::VectorXd::Zero(m), L);
    covered += dev <= rademacher_bound(n, delta, L, normX, comp);
  }
  EXPECT_GE(covered, static_cast<int>(std::ceil((1.0 - delta) * replicas)));
}

TEST(Regression, Examples) {
  EXPECT_NEAR(regression_bound(100, std::exp(-1.0), 1.0, 1.0, 1.0), 1.2 * 2.0 * (1.0 + kE), 1e-12);
  EXPECT_EQ(regression_bound(100, 0.1, 1.0, 0.0, 0.0), 0.0);
  EXPECT_NEAR(regression_bound(144, std::exp(-4.0), 2.0, 0.5, 1.0), 2.0 * (1.0 + 2.0 * kE), 1e-12);
}

TEST(Bounds, MonotoneInSampleSizeAndConfidence) {
  for (std::int64_t n = 10; n < 10000; n = n * 3 / 2) {
    for (double l = 1.0; l < std::log(static_cast<double>(n)); l += 0.5) {
      const double delta = std::exp(-l), looser = std::exp(-l - 0.5);
      if (n >= l + 0.5) {
        EXPECT_LE(pca_bound(2, n, delta, 1.0), pca_bound(2, n, looser, 1.0));
        EXPECT_LE(rademacher_bound(n, delta, 1.0, 1.0, 0.1), rademacher_bound(n, looser, 1.0, 1.0, 0.1));
        EXPECT_LE(regression_bound(n, delta, 1.0, 1.0, 1.0), regression_bound(n, looser, 1.0, 1.0, 1.0));
      }
      const std::int64_t n2 = n * 3 / 2;
      EXPECT_GE(pca_bound(2, n, delta, 1.0), pca_bound(2, n2, delta, 1.0));
      EXPECT_GE(rademacher_bound(n, delta, 1.0, 1.0, 0.1), rademacher_bound(n2, delta, 1.0, 1.0, 0.1));
      EXPECT_GE(regression_bound(n, delta, 1.0, 1.0, 1.0), regression_bound(n2, delta, 1.0, 1.0, 1.0));
    }
  }
}

TEST(FunctionClass, Validation) {
  FunctionClassSpec spec;
  EXPECT_NO_THROW(spec.validate());
  spec.L = 0.0;
  EXPECT_THROW(spec.validate(), BoundError);
}
