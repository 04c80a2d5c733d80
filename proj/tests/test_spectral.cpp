#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "support.hpp"

using namespace arithdyn;

namespace {

const double kGolden2 = (3 + std::sqrt(5.0)) / 2;

IntMat M(const char* s) { return IntMat::parse(s); }

double eigen_rho(const IntMat& a) {
  Eigen::MatrixXd m(a.dim(), a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a(i, j).get_d();
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

TEST(Supnorm, Examples) {
  EXPECT_EQ(supnorm(IntMat::identity(3)), 1);
  EXPECT_EQ(supnorm(M("2,-5;0,1")), 5);
  EXPECT_EQ(supnorm(IntMat(2)), 0);
}

TEST(PowerNorms, Examples) {
  auto j = power_norms(M("1,1;0,1"), 30);
  for (unsigned n = 1; n <= 30; ++n) EXPECT_EQ(j[n - 1], n);
  auto d = power_norms(M("2,0;0,1"), 20);
  for (unsigned n = 1; n <= 20; ++n) EXPECT_EQ(d[n - 1], pow_int(ExactInt(2), n));
  // A^n = [[F(2n+1), F(2n)], [F(2n), F(2n-1)]]: the max entry is F(2n+1),
  // and the trace is the Lucas number L(2n) = 3, 7, 18, 47, ...
  auto g = power_norms(M("2,1;1,1"), 4);
  EXPECT_EQ(g, (std::vector<ExactInt>{2, 5, 13, 34}));
  IntMat p = M("2,1;1,1");
  std::vector<ExactInt> traces;
  for (int n = 1; n <= 4; ++n, p = p * M("2,1;1,1")) traces.push_back(p(0, 0) + p(1, 1));
  EXPECT_EQ(traces, (std::vector<ExactInt>{3, 7, 18, 47}));
  EXPECT_THROW(power_norms(M("1"), 0), ContractViolation);
  EXPECT_THROW(power_norms(M("3,1;1,3"), 200, 64), ResourceCapExceeded);
}

TEST(CharPoly, MatchesLeibnizDeterminant) {
  for (int trial = 0; trial < 60; ++trial) {
    const auto r = static_cast<std::size_t>(testsupport::uniform(1, 5));
    auto a = testsupport::random_matrix(r, 6);
    auto c = characteristic_polynomial(a);
    ASSERT_EQ(c.size(), r + 1);
    EXPECT_EQ(c[r], 1);
    for (long x = -4; x <= 4; ++x) {
      auto rows = testsupport::rows_of(a);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) rows[i][j] = (i == j ? ExactInt(x) : ExactInt(0)) - rows[i][j];
      ExactInt val = 0;
      for (std::size_t k = r + 1; k-- > 0;) val = val * x + c[k];
      EXPECT_EQ(val, testsupport::leibniz_det(rows));
    }
    EXPECT_EQ(determinant(a), testsupport::leibniz_det(testsupport::rows_of(a)));
  }
}

TEST(SpectralRadius, Examples) {
  auto i = spectral_radius(IntMat::identity(3));
  EXPECT_EQ(i.value, 1.0);
  EXPECT_EQ(i.lower, 1.0);
  auto g = spectral_radius(M("2,1;1,1"));
  EXPECT_TRUE(g.contains(kGolden2));
  EXPECT_LE(g.width(), 1e-9);
  auto j = spectral_radius(M("1,1;0,1"));
  EXPECT_EQ(j.value, 1.0);
  EXPECT_TRUE(j.contains(1.0));
  auto rot = spectral_radius(M("0,-1;1,0"));
  EXPECT_TRUE(rot.contains(1.0));
  EXPECT_NEAR(rot.value, 1.0, 1e-9);
  EXPECT_TRUE(spectral_radius(M("0,0;0,0")).contains(0.0));
  EXPECT_THROW(spectral_radius(IntMat()), ContractViolation);
}

// Exact oracle for (3+sqrt 5)/2: lambda^2 - 3 lambda + 1 = 0 has its larger
// root in [a, b] iff p(a) <= 0 <= p(b) for rationals a < b above 3/2.
TEST(SpectralRadius, GoldenBracketByExactSignChange) {
  auto g = spectral_radius(M("2,1;1,1"));
  auto p = [](const ExactRat& x) { return ExactRat(x * x - 3 * x + 1); };
  EXPECT_LE(p(ExactRat(g.lower)), 0);
  EXPECT_GE(p(ExactRat(g.upper)), 0);
}

TEST(SpectralRadius, AgreesWithFloatingEigenvalues) {
  for (int trial = 0; trial < 60; ++trial) {
    const auto r = static_cast<std::size_t>(testsupport::uniform(1, 4));
    auto a = testsupport::random_matrix(r, 5);
    auto est = spectral_radius(a);
    const double rho = eigen_rho(a);
    EXPECT_LE(est.lower, est.upper);
    EXPECT_LE(est.width(), 1e-9 + 1e-15 * est.upper);
    EXPECT_GE(rho, est.lower - 1e-6 * std::max(1.0, rho)) << a.to_string();
    EXPECT_LE(rho, est.upper + 1e-6 * std::max(1.0, rho)) << a.to_string();
  }
}

TEST(SpectralRadius, PowersWithinBracketArithmetic) {
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = static_cast<std::size_t>(testsupport::uniform(2, 3));
    auto a = testsupport::random_matrix(r, 4);
    auto e = spectral_radius(a);
    for (unsigned k = 2; k <= 4; ++k) {
      auto ek = spectral_radius(matrix_power(a, k));
      const double lo = std::pow(e.lower, k), hi = std::pow(e.upper, k);
      const double pad = 1e-9 * k * std::pow(std::max(1.0, e.upper), k);
      EXPECT_LE(ek.lower, hi + pad) << a.to_string() << " k=" << k;
      EXPECT_GE(ek.upper, lo - pad) << a.to_string() << " k=" << k;
    }
  }
}

TEST(SpectralRadius, NormRouteIsAnUpperBound) {
  for (int trial = 0; trial < 30; ++trial) {
    auto a = testsupport::random_matrix(3, 5);
    auto n = spectral_radius_from_norms(a, 30);
    EXPECT_GE(n.upper, spectral_radius(a).lower - 1e-12);
    EXPECT_EQ(n.method, SpectralMethod::norm_limit);
  }
}

TEST(Birkhoff, Examples) {
  auto i = birkhoff_cone_eigvec(IntMat::identity(2));
  EXPECT_NEAR(i.eigenvalue, 1.0, 1e-9);
  EXPECT_NEAR(i.vector[0] + i.vector[1], 1.0, 1e-12);

  auto g = birkhoff_cone_eigvec(M("2,1;1,1"));
  EXPECT_NEAR(g.eigenvalue, kGolden2, 1e-9);
  EXPECT_NEAR(g.vector[0] / g.vector[1], (1 + std::sqrt(5.0)) / 2, 1e-8);

  auto s = birkhoff_cone_eigvec(M("0,1;1,0"));
  EXPECT_NEAR(s.vector[0], 0.5, 1e-12);
  EXPECT_NEAR(s.vector[1], 0.5, 1e-12);
  EXPECT_NEAR(s.eigenvalue, 1.0, 1e-12);

  EXPECT_THROW(birkhoff_cone_eigvec(M("1,-1;0,1")), ConeNotPreserved);
}

TEST(Birkhoff, ResidualWithinTolerance) {
  for (int trial = 0; trial < 40; ++trial) {
    const auto r = static_cast<std::size_t>(testsupport::uniform(1, 4));
    auto a = testsupport::random_matrix(r, 5);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) a(i, j) = abs_int(a(i, j));
    auto v = birkhoff_cone_eigvec(a);
    const double rho = spectral_radius(a).value;
    double sum = 0, vmax = 0, res = 0;
    for (std::size_t i = 0; i < r; ++i) {
      EXPECT_GE(v.vector[i], 0.0);
      sum += v.vector[i];
      vmax = std::max(vmax, v.vector[i]);
      double av = 0;
      for (std::size_t j = 0; j < r; ++j) av += a(i, j).get_d() * v.vector[j];
      res = std::max(res, std::abs(av - rho * v.vector[i]));
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_LE(res, 1e-9 * std::max(1.0, rho) * vmax + 1e-12) << a.to_string();
    EXPECT_NEAR(v.eigenvalue, rho, 1e-8 * std::max(1.0, rho)) << a.to_string();
  }
}

TEST(Birkhoff, JordanBlockAtSpectralRadius) {
  auto v = birkhoff_cone_eigvec(M("1,1;0,1"));
  EXPECT_NEAR(v.eigenvalue, 1.0, 1e-6);
  EXPECT_NEAR(v.vector[0], 1.0, 1e-6);
}

TEST(Submult, Examples) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = static_cast<std::size_t>(testsupport::uniform(2, 4));
    auto norms = power_norms(testsupport::random_matrix(r, 5), 12);
    if (std::find(norms.begin(), norms.end(), ExactInt(0)) != norms.end()) continue;
    EXPECT_TRUE(submult_check(std::span<const ExactInt>(norms), ExactRat(static_cast<long>(r))));
  }
  std::vector<ExactInt> cremona = {2, 1, 2, 1}, bad = {1, 1, 5};
  EXPECT_TRUE(submult_check(std::span<const ExactInt>(cremona), ExactRat(1)));
  EXPECT_FALSE(submult_check(std::span<const ExactInt>(bad), ExactRat(1)));
  std::vector<double> badd = {1, 1, 5};
  EXPECT_FALSE(submult_check(std::span<const double>(badd), 1.0));
}

TEST(Fekete, Examples) {
  std::vector<double> pw = {2, 4, 8, 16}, cr = {2, 1, 2, 1}, lucas = {3, 7, 18, 47};
  auto a = fekete_limit(std::span<const double>(pw), true);
  EXPECT_NEAR(a.inf_estimate, 2.0, 1e-12);
  EXPECT_TRUE(a.certified);
  auto b = fekete_limit(std::span<const double>(cr), true);
  EXPECT_NEAR(b.inf_estimate, 1.0, 1e-12);
  EXPECT_TRUE(b.certified);
  auto c = fekete_limit(std::span<const double>(lucas), false);
  EXPECT_FALSE(c.certified);
  EXPECT_NEAR(c.inf_estimate, std::pow(47.0, 0.25), 1e-9);
  // The caller's flag gates certification; the data itself passes C = 1.
  EXPECT_TRUE(fekete_limit(std::span<const double>(lucas), true).certified);
  std::vector<ExactInt> e = {2, 4, 8, 16};
  EXPECT_EQ(fekete_limit(std::span<const ExactInt>(e)).inf_estimate, 2.0);
}

TEST(NormSandwich, JordanBlockPolynomialFactor) {
  auto s = norm_sandwich(M("1,1;0,1"), 30);
  EXPECT_TRUE(s.holds);
  for (unsigned n = 1; n <= 30; ++n) EXPECT_EQ(s.norms[n - 1], n);
  EXPECT_EQ(spectral_radius(M("1,1;0,1")).value, 1.0);
}

TEST(NormSandwich, RandomMatrices) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = static_cast<std::size_t>(testsupport::uniform(2, 4));
    auto a = testsupport::random_matrix(r, 5);
    auto s = norm_sandwich(a, 15);
    EXPECT_TRUE(s.holds) << a.to_string() << " first bad n = " << s.first_bad;
    for (unsigned n = 1; n <= 15; ++n) EXPECT_LE(s.lower[n - 1], s.upper[n - 1] * (1 + 1e-12));
  }
}

}  // namespace
