#include <gtest/gtest.h>

#include <cmath>

#include "hoqmc/bernoulli.hpp"

using namespace hoqmc;

namespace {

mpz_class binom(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// Bernoulli numbers from sum_{k<=n} C(n+1, k) B_k = 0 (B_1 = -1/2).
std::vector<mpq_class> bernoulli_numbers(int n) {
  std::vector<mpq_class> B(static_cast<std::size_t>(n) + 1);
  B[0] = 1;
  for (int m = 1; m <= n; ++m) {
    mpq_class s = 0;
    for (int k = 0; k < m; ++k) s += mpq_class(binom(m + 1, k)) * B[static_cast<std::size_t>(k)];
    B[static_cast<std::size_t>(m)] = -s / mpq_class(binom(m + 1, m));
  }
  return B;
}

mpq_class q(long n, long d) {
  mpq_class v(n, d);
  v.canonicalize();
  return v;
}

}  // namespace

TEST(Bernoulli, LowDegreeValues) {
  EXPECT_EQ(bernoulli_exact(0, q(3, 7)), 1);
  EXPECT_EQ(bernoulli_exact(1, q(1, 2)), 0);
  EXPECT_EQ(bernoulli_exact(2, 0), q(1, 6));
  EXPECT_EQ(bernoulli_exact(4, 0), q(-1, 30));
  EXPECT_EQ(bernoulli_exact(2, q(1, 2)), q(-1, 12));
}

// B_r(x) = sum_k C(r, k) B_k x^(r-k) with the Bernoulli numbers from an
// independent recurrence.
TEST(Bernoulli, CoefficientsMatchBinomialExpansion) {
  const auto B = bernoulli_numbers(14);
  for (int r = 0; r <= 14; ++r) {
    const auto c = bernoulli_coeffs(r);
    ASSERT_EQ(c.size(), static_cast<std::size_t>(r) + 1);
    for (int k = 0; k <= r; ++k) {
      EXPECT_EQ(c[static_cast<std::size_t>(r - k)], mpq_class(binom(r, k)) * B[static_cast<std::size_t>(k)])
          << "r=" << r << " k=" << k;
    }
  }
}

TEST(Bernoulli, DerivativeAndZeroMean) {
  for (int r = 1; r <= 10; ++r) {
    const auto c = bernoulli_coeffs(r);
    const auto prev = bernoulli_coeffs(r - 1);
    mpq_class integral = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      integral += c[i] / mpq_class(static_cast<long>(i) + 1);
      if (i > 0) EXPECT_EQ(c[i] * static_cast<long>(i), prev[i - 1] * r);
    }
    EXPECT_EQ(integral, 0);
  }
}

TEST(Bernoulli, ReflectionSymmetry) {
  for (int r = 0; r <= 8; ++r) {
    for (int i = 0; i <= 10; ++i) {
      const mpq_class x = q(i, 10);
      const mpq_class lhs = bernoulli_exact(r, 1 - x);
      const mpq_class rhs = r % 2 ? mpq_class(-bernoulli_exact(r, x)) : bernoulli_exact(r, x);
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST(Bernoulli, DoubleMatchesExact) {
  for (int r = 0; r <= 8; ++r) {
    for (int i = 0; i <= 16; ++i) {
      EXPECT_NEAR(bernoulli(r, i / 16.0), bernoulli_exact(r, q(i, 16)).get_d(), 1e-14);
    }
  }
}

TEST(Bernoulli, ScaledCoefficientsDivideByFactorial) {
  EXPECT_EQ(factorial(0), 1);
  EXPECT_EQ(factorial(6), 720);
  for (int r = 0; r <= 8; ++r) {
    const auto c = bernoulli_coeffs(r);
    const auto s = scaled_bernoulli_coeffs(r);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(s[i] * mpq_class(factorial(r)), c[i]);
  }
}
