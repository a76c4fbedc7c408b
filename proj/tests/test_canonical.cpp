#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "phibound/canonical.hpp"
#include "phibound/errors.hpp"
#include "phibound/random.hpp"

using namespace phib;

namespace {

const OrliczFunction kQuad = OrliczFunction::quadratic();

std::vector<OrliczFunction> same(const OrliczFunction& phi, std::size_t n) { return std::vector<OrliczFunction>(n, phi); }

CoefficientVector random_t(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  CoefficientVector t;
  for (int i = 0; i < n; ++i) t.entries.push_back(u(gen));
  return t;
}

double objective(const CoefficientVector& t, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += t.entries[i] * b[i];
  return s;
}

}  // namespace

TEST(CoefficientVector, NormsAndParse) {
  const auto t = CoefficientVector::parse("3, -4");
  EXPECT_EQ(t.entries, (std::vector<double>{3.0, -4.0}));
  EXPECT_DOUBLE_EQ(t.l1(), 7.0);
  EXPECT_DOUBLE_EQ(t.l2(), 5.0);
  EXPECT_THROW(CoefficientVector::parse("1,x"), ConfigError);
  EXPECT_THROW(CoefficientVector::parse("1,inf"), ConfigError);
}

TEST(SolveNv, QuadraticExample) {
  const auto s = solve_nv(kQuad, CoefficientVector{{3.0, 4.0}}, 2.0);
  EXPECT_NEAR(s.value, 10.0, 1e-9);
  ASSERT_EQ(s.maximizer.size(), 2u);
  EXPECT_NEAR(s.maximizer[0], 1.2, 1e-9);
  EXPECT_NEAR(s.maximizer[1], 1.6, 1e-9);
  EXPECT_TRUE(s.active);
  EXPECT_FALSE(s.fallback);
  EXPECT_NEAR(s.multiplier, 2.5, 1e-8);
}

TEST(SolveNv, TrivialCases) {
  EXPECT_EQ(solve_nv(kQuad, CoefficientVector{{0.0, 0.0, 0.0}}, 5.0).value, 0.0);
  const auto z = solve_nv(OrliczFunction::power(3.0), CoefficientVector{{1.0, 1.0}}, 0.0);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.maximizer, (std::vector<double>{0.0, 0.0}));
}

TEST(SolveNv, Errors) {
  EXPECT_THROW(solve_nv(kQuad, CoefficientVector{{1.0}}, -1.0), BoundError);
  const auto phis = same(kQuad, 3);
  EXPECT_THROW(solve_nv(phis, CoefficientVector{{1.0, 2.0}}, 1.0), BoundError);
}

TEST(SolveNv, SolutionInvariants) {
  std::mt19937_64 gen(42);
  for (const auto& phi : {kQuad, OrliczFunction::power(3.0), OrliczFunction::exp_type(), OrliczFunction::power(1.5)}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto t = random_t(gen, 1 + rep % 6);
      const double v = 0.1 + rep * 0.4;
      const auto s = solve_nv(phi, t, v);
      double used = 0.0;
      for (double b : s.maximizer) used += phi(b);
      EXPECT_LE(used, v + 1e-9) << phi.name();
      EXPECT_NEAR(objective(t, s.maximizer), s.value, 1e-9 * std::max(1.0, s.value)) << phi.name();
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.entries[i] != 0.0) EXPECT_GE(t.entries[i] * s.maximizer[i], 0.0);
      }
    }
  }
}

TEST(SolveNv, QuadraticClosedForm) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = random_t(gen, 1 + rep % 10);
    const double v = 0.05 + 0.3 * rep;
    EXPECT_NEAR(solve_nv(kQuad, t, v).value / (t.l2() * std::sqrt(2.0 * v)), 1.0, 1e-8);
  }
}

TEST(SolveNv, PositiveHomogeneityInT) {
  std::mt19937_64 gen(8);
  for (const auto& phi : {kQuad, OrliczFunction::power(3.0), OrliczFunction::exp_type()}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto t = random_t(gen, 4);
      for (double c : {0.3, 2.0, 17.0}) {
        CoefficientVector ct = t;
        for (double& x : ct.entries) x *= c;
        EXPECT_NEAR(solve_nv(phi, ct, 1.5).value / (c * solve_nv(phi, t, 1.5).value), 1.0, 1e-8) << phi.name();
      }
    }
  }
}

TEST(SolveNv, MonotoneInBudget) {
  std::mt19937_64 gen(9);
  for (const auto& phi : {kQuad, OrliczFunction::power(3.0), OrliczFunction::exp_type()}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto t = random_t(gen, 5);
      double prev = 0.0;
      for (double v = 0.25; v <= 8.0; v *= 2.0) {
        const double cur = solve_nv(phi, t, v).value;
        EXPECT_GE(cur, prev - 1e-12);
        prev = cur;
        for (double s : {1.0, 1.5, 3.0}) {
          EXPECT_GE(s * cur, solve_nv(phi, t, v * s).value * (1.0 - 1e-9)) << phi.name();
        }
      }
    }
  }
}

TEST(SolveNv, ConjugateDualityIdentity) {
  std::mt19937_64 gen(10);
  for (const auto& phi : {kQuad, OrliczFunction::power(3.0), OrliczFunction::power(1.5)}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto t = random_t(gen, 1 + rep % 5);
      const double v = 0.2 + 0.5 * rep;
      const double nv = solve_nv(phi, t, v).value;
      double sum = 0.0;
      for (double ti : t.entries) sum += phi.conjugate(v * std::abs(ti) / nv);
      EXPECT_GE(v - sum, -1e-6) << phi.name();
    }
  }
}

TEST(SolveNv, MixedPhisAgreeWithBruteForce) {
  const std::vector<OrliczFunction> phis = {kQuad, OrliczFunction::power(3.0)};
  const CoefficientVector t{{1.0, -2.0}};
  const double exact = solve_nv(phis, t, 1.0).value;
  EXPECT_NEAR(nv_brute_force(phis, t, 1.0, 1e-3), exact, 1e-2);
  EXPECT_LE(nv_brute_force(phis, t, 1.0, 1e-3), exact + 1e-9);
}

TEST(SolveNv, NonStrictlyConvexFallsBack) {
  const auto tab = OrliczFunction::tabulated({0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 2.0, 4.5});
  const auto s = solve_nv(tab, CoefficientVector{{3.0, 4.0}}, 2.0);
  EXPECT_TRUE(s.fallback);
  double used = 0.0;
  for (double b : s.maximizer) used += tab(b);
  EXPECT_LE(used, 2.0 + 1e-9);
  // Piecewise-linear interpolant of x^2/2 lies above it, so the value is below the quadratic one.
  EXPECT_LE(s.value, 10.0 + 1e-9);
  EXPECT_GT(s.value, 9.0);
}

TEST(NvBruteForce, Examples) {
  EXPECT_NEAR(nv_brute_force(same(kQuad, 2), CoefficientVector{{3.0, 4.0}}, 2.0, 1e-3), 10.0, 5e-3);
  EXPECT_NEAR(nv_brute_force(same(kQuad, 1), CoefficientVector{{1.0}}, 1.0, 1e-3), std::sqrt(2.0), 1e-3);
  const auto p3 = same(OrliczFunction::power(3.0), 2);
  EXPECT_NEAR(nv_brute_force(p3, CoefficientVector{{1.0, 1.0}}, 2.0, 1e-3),
              solve_nv(p3, CoefficientVector{{1.0, 1.0}}, 2.0).value, 1e-2);
  EXPECT_THROW(
      {
        try {
          nv_brute_force(same(kQuad, 5), CoefficientVector{{1, 1, 1, 1, 1}}, 1.0, 0.1);
        } catch (const BoundError& e) {
          EXPECT_EQ(e.kind(), ErrorKind::refusal);
          throw;
        }
      },
      BoundError);
}

TEST(TailBoundGeneral, Examples) {
  NvSolution nv;
  nv.value = 10.0;
  nv.budget = 2.0;
  const auto a = tail_bound_general(nv, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(a.threshold, 20.0);
  EXPECT_NEAR(a.probability_bound, std::exp(-2.0), 1e-15);
  EXPECT_EQ(a.regime, Regime::general);
  for (const char* k : {"K", "s", "v", "N_v"}) EXPECT_TRUE(a.constants.count(k)) << k;
  const auto b = tail_bound_general(nv, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(b.threshold, 40.0);
  EXPECT_NEAR(b.probability_bound, std::exp(-4.0), 1e-15);

  const auto composed = tail_bound_general(solve_nv(kQuad, CoefficientVector{{3.0, 4.0}}, 1.0), 1.0, 2.0);
  EXPECT_NEAR(composed.threshold, 20.0 * std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(composed.probability_bound, std::exp(-1.0), 1e-15);
  EXPECT_THROW(tail_bound_general(nv, 0.5, 1.0), BoundError);
  EXPECT_THROW(tail_bound_general(nv, 1.0, 0.0), BoundError);
}

TEST(TailBoundIid, Examples) {
  const CoefficientVector unit{{1.0}};
  const auto r = tail_bound_iid(1.0, unit, kQuad, 1.0, 1.0, 1.0);
  EXPECT_NEAR(r.probability_bound, std::exp(-0.5), 1e-15);
  EXPECT_EQ(r.regime, Regime::iid_orlicz);
  for (const char* k : {"K1", "K2", "c", "z"}) EXPECT_TRUE(r.constants.count(k)) << k;
  EXPECT_NEAR(tail_bound_iid(1e-9, unit, kQuad, 1.0, 1.0).probability_bound, 1.0, 1e-12);
  EXPECT_THROW(tail_bound_iid(1.0, unit, kQuad, 0.0, 1.0), BoundError);
  EXPECT_THROW(tail_bound_iid(1.0, unit, kQuad, 1.0, -1.0), BoundError);
  EXPECT_THROW(tail_bound_iid(0.0, unit, kQuad, 1.0, 1.0), BoundError);
}

TEST(TailBoundIid, RegimeSwitchForPowerThree) {
  // With K1 = K2 = 1 and ||t||_1 = a, ||t||_2 = b the exponents z^3/(3a^3) and
  // z^2/b^2 cross at z* = 3a^3/b^2; above it the quadratic term is the smaller one.
  const CoefficientVector t{{1.0, 1.0}};
  const auto p3 = OrliczFunction::power(3.0);
  const double zstar = 3.0 * 8.0 / 2.0;
  EXPECT_EQ(tail_bound_iid(0.5 * zstar, t, p3, 1.0, 1.0).regime, Regime::iid_orlicz);
  EXPECT_EQ(tail_bound_iid(2.0 * zstar, t, p3, 1.0, 1.0).regime, Regime::iid_quadratic);
  double lo = 1.0, hi = 100.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail_bound_iid(mid, t, p3, 1.0, 1.0).regime == Regime::iid_orlicz ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, zstar, 1e-9);
}

TEST(TailBoundIid, MonotoneInThreshold) {
  const CoefficientVector t{{0.5, -1.0, 2.0}};
  double prev = 1.0;
  for (double z = 0.1; z < 50.0; z *= 1.3) {
    const double p = tail_bound_iid(z, t, OrliczFunction::exp_type(), 1.0, 1.0).probability_bound;
    EXPECT_LE(p, prev);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(BvMoment, Examples) {
  const std::vector<double> zeros(100, 0.0);
  const auto z = bv_moment_check(zeros, 2.0, 1.0, 1.0);
  EXPECT_EQ(z.l_hat, 0.0);
  EXPECT_TRUE(z.passed);

  std::vector<double> g(1000000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CounterRng rng(3, 0, static_cast<std::uint32_t>(i));
    g[i] = rng.normal();
  }
  const auto two = bv_moment_check(g, 2.0, 1.0, 1.0);
  EXPECT_NEAR(two.l_hat, 0.5, 0.005);
  EXPECT_TRUE(two.passed);
  const auto four = bv_moment_check(g, 4.0, 1.0, 2.0);
  // ||Y / (2uK)||_4 = 3^{1/4} / 4 = 0.3290185032381231.
  EXPECT_NEAR(four.scaled_norm, 0.3290185032381231, 0.005);
  EXPECT_NEAR(four.l_hat, four.scaled_norm / 2.0, 1e-15);
  EXPECT_THROW(bv_moment_check(std::vector<double>{}, 2.0, 1.0, 1.0), BoundError);
  EXPECT_THROW(bv_moment_check(g, 0.5, 1.0, 1.0), BoundError);
}

TEST(TailBoundGeneral, GaussianDominanceMonteCarlo) {
  // i.i.d. N(0,1) is sub-Gaussian for x^2/2 with constant 1, so K = 1.
  const CoefficientVector t{{0.5, -1.0, 0.25, 2.0}};
  const int n = 100000;
  for (double v : {1.0, 2.0, 4.0}) {
    for (double s : {1.0, 2.0}) {
      const auto r = tail_bound_general(solve_nv(kQuad, t, v), s, 1.0);
      int hits = 0;
      for (int i = 0; i < n; ++i) {
        CounterRng rng(5, 0, static_cast<std::uint32_t>(i));
        double y = 0.0;
        for (double ti : t.entries) y += ti * rng.normal();
        hits += y >= r.threshold;
      }
      const double p = static_cast<double>(hits) / n;
      const double se = std::sqrt(std::max(p * (1 - p), 1.0 / n) / n);
      EXPECT_LE(p, r.probability_bound + 3.0 * se) << "v=" << v << " s=" << s;
    }
  }
}
