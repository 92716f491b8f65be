#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "hoqmc/bernoulli.hpp"
#include "hoqmc/errors.hpp"
#include "hoqmc/net_quality.hpp"
#include "hoqmc/walsh.hpp"

using namespace hoqmc;
using cplx = std::complex<double>;

namespace {

mpq_class q(long n, long d) {
  mpq_class v(n, d);
  v.canonicalize();
  return v;
}

int ndigits(std::uint64_t k, int b) {
  int c = 0;
  for (; k; k /= static_cast<std::uint64_t>(b)) ++c;
  return c;
}

// Most significant digit first digits of cell u at resolution g.
std::vector<Digit> cell_digits(std::uint64_t u, int b, int g) {
  std::vector<Digit> xi(static_cast<std::size_t>(g));
  for (int i = g - 1; i >= 0; --i) {
    xi[static_cast<std::size_t>(i)] = static_cast<Digit>(u % static_cast<std::uint64_t>(b));
    u /= static_cast<std::uint64_t>(b);
  }
  return xi;
}

mpq_class horner(const std::vector<mpq_class>& c, const mpq_class& x) {
  mpq_class v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

// Exact integral of B_r/r! against conj(wal_k) by summing antiderivative
// differences over the cells on which wal_k is constant.
Cyclotomic bhat_by_cells(int b, int r, std::uint64_t k) {
  const int g = std::max(1, ndigits(k, b));
  const std::uint64_t N = ipow(b, g);
  const auto anti = scaled_bernoulli_coeffs(r + 1);
  Cyclotomic out(b);
  for (std::uint64_t u = 0; u < N; ++u) {
    const int e = walsh_exponent(b, k, cell_digits(u, b, g));
    const mpq_class lo = q(static_cast<long>(u), static_cast<long>(N));
    const mpq_class hi = q(static_cast<long>(u + 1), static_cast<long>(N));
    out.add_scaled(Cyclotomic(b, 1), horner(anti, hi) - horner(anti, lo), -e);
  }
  return out;
}

cplx omega(int b, int j) { return std::polar(1.0, 2.0 * std::numbers::pi * j / b); }

// 8-point Gauss-Legendre on [0, 1]; exact for polynomials of degree <= 15.
constexpr std::array<double, 8> kNodes{0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                       0.4082826787521751,   0.5917173212478249,  0.7627662049581645,
                                       0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kWeights{0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
                                         0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
                                         0.11119051722668724, 0.05061426814518813};

// Double integral of B_r(|x - y|)/r! conj(wal_k(x)) wal_l(y) by tensor
// Gauss-Legendre on every cell pair; diagonal cells are split into the two
// triangles x > y and x < y, each mapped to the unit square (Duffy).
cplx bhat_per_quadrature(int b, int r, std::uint64_t k, std::uint64_t l) {
  const int g = std::max({1, ndigits(k, b), ndigits(l, b)});
  const std::uint64_t N = ipow(b, g);
  const double h = 1.0 / static_cast<double>(N);
  const double rf = factorial(r).get_d();
  auto P = [&](double t) { return bernoulli(r, t) / rf; };
  cplx total = 0;
  for (std::uint64_t u = 0; u < N; ++u) {
    const int ek = walsh_exponent(b, k, cell_digits(u, b, g));
    for (std::uint64_t v = 0; v < N; ++v) {
      const int el = walsh_exponent(b, l, cell_digits(v, b, g));
      const cplx w = omega(b, el - ek);
      const double a = static_cast<double>(u) * h;
      const double c = static_cast<double>(v) * h;
      double sum = 0.0;
      if (u != v) {
        for (std::size_t i = 0; i < 8; ++i) {
          for (std::size_t j = 0; j < 8; ++j) {
            sum += kWeights[i] * kWeights[j] * P(std::abs((a + h * kNodes[i]) - (c + h * kNodes[j])));
          }
        }
        sum *= h * h;
      } else {
        // x = a + h s, y = a + h s t (and the mirror image); Jacobian h^2 s.
        for (std::size_t i = 0; i < 8; ++i) {
          for (std::size_t j = 0; j < 8; ++j) {
            const double s = kNodes[i];
            const double t = kNodes[j];
            sum += 2.0 * kWeights[i] * kWeights[j] * s * P(h * s * (1.0 - t));
          }
        }
        sum *= h * h;
      }
      total += w * sum;
    }
  }
  return total;
}

// Leading-term stripping oracle for the pair type.
WalshPairType type_by_search(int b, std::uint64_t k, std::uint64_t l, int& matches) {
  const auto tk = digit_terms(k, b);
  const auto tl = digit_terms(l, b);
  auto strip = [&](const std::vector<DigitTerm>& t, std::size_t p) {
    std::uint64_t v = 0;
    for (std::size_t i = p; i < t.size(); ++i) v += static_cast<std::uint64_t>(t[i].kappa) * ipow(b, t[i].c - 1);
    return v;
  };
  auto term = [&](const std::vector<DigitTerm>& t, std::size_t p) -> std::uint64_t {
    if (p == 0) return 0;
    return static_cast<std::uint64_t>(t[p - 1].kappa) * ipow(b, t[p - 1].c - 1);
  };
  matches = 0;
  WalshPairType found;
  if (k == l) {
    matches = 1;
    return {0, 0};
  }
  for (std::size_t p = 0; p <= tk.size(); ++p) {
    for (std::size_t qq = 0; qq <= tl.size(); ++qq) {
      if (p == 0 && qq == 0) continue;
      if (strip(tk, p) == strip(tl, qq) && term(tk, p) != term(tl, qq)) {
        ++matches;
        found = {static_cast<int>(p), static_cast<int>(qq)};
      }
    }
  }
  return found;
}

void expect_close(cplx a, cplx c, double tol) {
  EXPECT_NEAR(a.real(), c.real(), tol);
  EXPECT_NEAR(a.imag(), c.imag(), tol);
}

}  // namespace

TEST(WalshExponent, Examples) {
  const std::vector<Digit> x{1, 0, 1};
  EXPECT_EQ(walsh_exponent(2, 0, x), 0);
  const std::vector<Digit> half{1};
  EXPECT_EQ(walsh_exponent(2, 1, half), 1);
  const std::vector<Digit> third{1, 0};
  EXPECT_EQ(walsh_exponent(3, 2, third), 2);
}

TEST(WalshExponent, MultivariateIsSumOfExponents) {
  const DigitPoint x(3, 2, {{1, 2}, {2, 2}});
  const std::vector<std::uint64_t> k{5, 7};  // digits (2,1) and (1,2)
  EXPECT_EQ(walsh_exponent(k, x), (2 * 1 + 1 * 2 + 1 * 2 + 2 * 2) % 3);
  const std::vector<std::uint64_t> bad{1};
  EXPECT_THROW(walsh_exponent(bad, x), UsageError);
}

TEST(WalshExponent, OrthonormalOnFineGrid) {
  for (int b : {2, 3}) {
    for (int n = 1; n <= (b == 2 ? 5 : 3); ++n) {
      const std::uint64_t N = ipow(b, n);
      std::vector<std::vector<int>> e(N, std::vector<int>(N));
      for (std::uint64_t u = 0; u < N; ++u) {
        const auto xi = cell_digits(u, b, n);
        for (std::uint64_t k = 0; k < N; ++k) e[k][u] = walsh_exponent(b, k, xi);
      }
      for (std::uint64_t k = 0; k < N; ++k) {
        for (std::uint64_t l = 0; l < N; ++l) {
          // Exact sum of omega^(e_k - e_l) as counts per residue class.
          std::vector<std::uint64_t> cnt(static_cast<std::size_t>(b), 0);
          for (std::uint64_t u = 0; u < N; ++u) cnt[static_cast<std::size_t>(((e[k][u] - e[l][u]) % b + b) % b)]++;
          Cyclotomic s(b);
          for (int r = 0; r < b; ++r) {
            s.add_scaled(Cyclotomic(b, 1), mpq_class(static_cast<unsigned long>(cnt[static_cast<std::size_t>(r)])), r);
          }
          EXPECT_EQ(s, Cyclotomic(b, k == l ? mpq_class(static_cast<unsigned long>(N)) : mpq_class(0)));
        }
      }
    }
  }
}

TEST(ClassifyType, Examples) {
  EXPECT_EQ(classify_type(2, 9, 9), (WalshPairType{0, 0}));
  EXPECT_EQ(classify_type(2, 5, 1), (WalshPairType{1, 0}));
  EXPECT_EQ(classify_type(2, 5, 6), (WalshPairType{2, 2}));
}

TEST(ClassifyType, UniqueAndMatchesSearchOracle) {
  for (int b : {2, 3}) {
    const std::uint64_t top = b == 2 ? 64 : 81;
    for (std::uint64_t k = 0; k < top; ++k) {
      for (std::uint64_t l = 0; l < top; ++l) {
        int matches = 0;
        const auto want = type_by_search(b, k, l, matches);
        EXPECT_EQ(matches, 1) << "b=" << b << " k=" << k << " l=" << l;
        const auto got = classify_type(b, k, l);
        EXPECT_EQ(got, want);
        const auto swapped = classify_type(b, l, k);
        EXPECT_EQ(swapped, (WalshPairType{got.q, got.p}));
        const int v = static_cast<int>(digit_terms(k, b).size());
        const int w = static_cast<int>(digit_terms(l, b).size());
        EXPECT_EQ(v - got.p, w - got.q);
      }
    }
  }
}

TEST(BhatR, Examples) {
  EXPECT_EQ(bhat_r(2, 0, 0), Cyclotomic(2, 1));
  for (std::uint64_t k = 1; k < 20; ++k) EXPECT_TRUE(bhat_r(3, 0, k).is_zero());
  EXPECT_EQ(bhat_r(2, 1, 1), Cyclotomic(2, q(-1, 4)));
  for (int r = 1; r <= 6; ++r) EXPECT_TRUE(bhat_r(5, r, 0).is_zero());
}

TEST(BhatR, MatchesCellwiseAntiderivative) {
  for (int b : {2, 3, 5}) {
    for (int r = 0; r <= 6; ++r) {
      const std::uint64_t top = b == 5 ? 30 : 100;
      for (std::uint64_t k = 0; k < top; ++k) {
        EXPECT_EQ(bhat_r(b, r, k), bhat_by_cells(b, r, k)) << "b=" << b << " r=" << r << " k=" << k;
      }
    }
  }
}

TEST(BhatRPer, ZeroMeanAtOrigin) {
  for (int b : {2, 3}) {
    for (int r = 2; r <= 6; r += 2) EXPECT_TRUE(bhat_r_per(b, r, 0, 0).is_zero());
  }
}

TEST(BhatRPer, HighTypeVanishes) {
  EXPECT_EQ(classify_type(2, 85, 1), (WalshPairType{3, 0}));
  EXPECT_TRUE(bhat_r_per(2, 2, 85, 1).is_zero());
  EXPECT_TRUE(khat(2, 1, 85, 1).is_zero());
}

TEST(BhatRPer, ChainMatchesGridOracle) {
  for (int b : {2, 3}) {
    const std::uint64_t top = b == 2 ? 16 : 9;
    for (int r = 2; r <= 5; ++r) {
      for (std::uint64_t k = 0; k < top; ++k) {
        for (std::uint64_t l = 0; l < top; ++l) {
          EXPECT_EQ(bhat_r_per(b, r, k, l), bhat_r_per_grid(b, r, k, l))
              << "b=" << b << " r=" << r << " k=" << k << " l=" << l;
        }
      }
    }
  }
  // Pairs with widely different digit counts.
  for (auto [k, l] : {std::pair<std::uint64_t, std::uint64_t>{1, 200}, {300, 7}, {511, 256}, {0, 129}}) {
    EXPECT_EQ(bhat_r_per(2, 4, k, l), bhat_r_per_grid(2, 4, k, l)) << k << "," << l;
  }
  EXPECT_EQ(bhat_r_per(5, 3, 23, 7), bhat_r_per_grid(5, 3, 23, 7));
}

TEST(BhatRPer, ChainMatchesQuadrature) {
  for (int b : {2, 3}) {
    const std::uint64_t top = b == 2 ? 8 : 9;
    for (int r = 2; r <= 4; ++r) {
      for (std::uint64_t k = 0; k < top; k += 1) {
        for (std::uint64_t l = 0; l < top; l += 2) {
          expect_close(bhat_r_per(b, r, k, l).to_complex(), bhat_per_quadrature(b, r, k, l), 1e-13);
        }
      }
    }
  }
}

TEST(BhatRPer, ConjugateSymmetry) {
  for (int b : {2, 3, 5}) {
    for (std::uint64_t k = 0; k < 30; k += 3) {
      for (std::uint64_t l = 0; l < 30; l += 2) {
        EXPECT_EQ(bhat_r_per(b, 3, l, k), bhat_r_per(b, 3, k, l).conj());
        EXPECT_EQ(bhat_r_per(b, 4, l, k), bhat_r_per(b, 4, k, l).conj());
      }
    }
  }
}

TEST(BhatRPer, RulesAgreeForEvenOrder) {
  for (std::uint64_t k = 0; k < 27; ++k) {
    for (std::uint64_t l = 0; l < 27; l += 4) {
      EXPECT_EQ(bhat_r_per(3, 4, k, l, DiagonalRule::absolute), bhat_r_per(3, 4, k, l, DiagonalRule::periodic));
    }
  }
}

TEST(BhatRPer, BatchMatchesChain) {
  for (int b : {2, 3}) {
    const std::vector<std::uint64_t> ks{0, 1, 2, 5, 9, 17, 26};
    const std::vector<std::uint64_t> ls{0, 3, 4, 8, 13, 40};
    for (int r = 2; r <= 5; ++r) {
      const auto got = bhat_r_per_batch(b, r, ks, ls, 2);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        for (std::size_t j = 0; j < ls.size(); ++j) EXPECT_EQ(got[i * ls.size() + j], bhat_r_per(b, r, ks[i], ls[j]));
      }
    }
  }
}

// Recursion in r: for r > 2 and k, l >= 1 with leading digit kappa at
// position c,
//   bhat_r(k,l) = -b^-c [ bhat_{r-1}(k',l)/(1 - w^-kappa)
//                 + (1/2 + 1/(w^-kappa - 1)) bhat_{r-1}(k,l)
//                 + sum_{a>=1} sum_theta bhat_{r-1}(theta b^(a+c-1) + k, l) / (b^a (w^theta - 1)) ]
// where k' drops the leading term. Evaluated in double with the a-sum cut
// at `amax`; the tail is below b^-amax times the largest coefficient.
cplx recursion_rhs(int b, int r, std::uint64_t k, std::uint64_t l, DiagonalRule rule, int amax) {
  const auto terms = digit_terms(k, b);
  const int kappa = terms.front().kappa;
  const int c = terms.front().c;
  const std::uint64_t kp = k - static_cast<std::uint64_t>(kappa) * ipow(b, c - 1);
  auto prev = [&](std::uint64_t kk) { return bhat_r_per(b, r - 1, kk, l, rule).to_complex(); };
  const cplx wk = omega(b, -kappa);
  cplx sum = prev(kp) / (1.0 - wk) + (0.5 + 1.0 / (wk - 1.0)) * prev(k);
  for (int a = 1; a <= amax; ++a) {
    for (int theta = 1; theta < b; ++theta) {
      const std::uint64_t idx = static_cast<std::uint64_t>(theta) * ipow(b, a + c - 1) + k;
      sum += prev(idx) / (std::pow(static_cast<double>(b), a) * (omega(b, theta) - 1.0));
    }
  }
  return -sum / std::pow(static_cast<double>(b), c);
}

TEST(BhatRPer, RecursionInROrderThreeFromTwo) {
  for (int b : {2, 3}) {
    for (std::uint64_t k = 1; k < 9; ++k) {
      for (std::uint64_t l = 1; l < 9; ++l) {
        const auto lhs = bhat_r_per(b, 3, k, l, DiagonalRule::periodic).to_complex();
        expect_close(lhs, recursion_rhs(b, 3, k, l, DiagonalRule::absolute, 20), 1e-12);
      }
    }
  }
}

// For odd r - 1 the two diagonal rules give different right-hand sides; the
// identity holds with the periodic continuation of B_{r-1}.
TEST(BhatRPer, RecursionInRFromOddOrder) {
  for (int b : {2, 3}) {
    for (int r : {4, 6}) {
      for (std::uint64_t k = 1; k < 9; ++k) {
        for (std::uint64_t l = 1; l < 9; ++l) {
          const auto lhs = bhat_r_per(b, r, k, l).to_complex();
          expect_close(lhs, recursion_rhs(b, r, k, l, DiagonalRule::periodic, 20), 1e-12);
        }
      }
    }
  }
}

TEST(Khat, Origin) {
  for (int b : {2, 3, 5}) {
    for (int alpha = 1; alpha <= 3; ++alpha) EXPECT_EQ(khat(b, alpha, 0, 0), Cyclotomic(b, 1));
  }
  const std::vector<std::uint64_t> zero3{0, 0, 0};
  EXPECT_EQ(khat_s(3, 2, zero3, zero3), Cyclotomic(3, 1));
}

TEST(Khat, DefinitionFromParts) {
  for (int b : {2, 3}) {
    for (int alpha = 1; alpha <= 2; ++alpha) {
      for (std::uint64_t k = 0; k < 12; ++k) {
        for (std::uint64_t l = 0; l < 12; ++l) {
          Cyclotomic want(b);
          for (int r = 0; r <= alpha; ++r) want += bhat_r(b, r, k) * bhat_r(b, r, l).conj();
          const auto per = bhat_r_per(b, 2 * alpha, k, l);
          if (alpha % 2 == 1) {
            want += per;
          } else {
            want -= per;
          }
          EXPECT_EQ(khat(b, alpha, k, l), want);
        }
      }
    }
  }
}

TEST(Khat, ProductOverCoordinatesAndCorollary) {
  const std::vector<std::uint64_t> k{3, 85, 2};
  const std::vector<std::uint64_t> l{1, 1, 6};
  EXPECT_TRUE(khat_s(2, 1, k, l).is_zero());  // second coordinate is of type (3,0)
  const std::vector<std::uint64_t> k2{3, 5};
  const std::vector<std::uint64_t> l2{1, 6};
  EXPECT_EQ(khat_s(2, 2, k2, l2), khat(2, 2, 3, 1) * khat(2, 2, 5, 6));
}

TEST(Khat, BatchMatchesChain) {
  const std::vector<std::uint64_t> ks{0, 1, 4, 7, 11, 30, 80};
  for (int b : {2, 3}) {
    for (int alpha = 1; alpha <= 3; ++alpha) {
      const auto got = khat_batch(b, alpha, ks, ks, 3);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        for (std::size_t j = 0; j < ks.size(); ++j) EXPECT_EQ(got[i * ks.size() + j], khat(b, alpha, ks[i], ks[j]));
      }
    }
  }
}

TEST(WalshTable, ConjugateSymmetricAndSparse) {
  for (int b : {2, 3}) {
    for (int alpha = 1; alpha <= 2; ++alpha) {
      const auto table = build_walsh_table(b, alpha, b == 2 ? 4 : 3);
      for (std::uint64_t k = 0; k < table.size(); ++k) {
        for (std::uint64_t l = 0; l < table.size(); ++l) EXPECT_EQ(table.value(l, k), table.value(k, l).conj());
        for (int r = 0; r <= alpha; ++r) EXPECT_EQ(table.bhat(r, k), bhat_r(b, r, k));
      }
      const auto rep = check_sparsity(table);
      EXPECT_EQ(rep.pairs, table.size() * table.size());
      EXPECT_GT(rep.over_budget, 0u);
      EXPECT_EQ(rep.nonzero_over_budget, 0u);
      EXPECT_FALSE(rep.first_violation);
    }
  }
}

TEST(WalshTable, DecaySupIsFiniteAndMonotone) {
  const auto table = build_walsh_table(2, 1, 6);
  const auto scan = decay_scan(table);
  ASSERT_EQ(scan.sup_by_level.size(), 7u);
  for (std::size_t t = 1; t < scan.sup_by_level.size(); ++t) {
    EXPECT_GE(scan.sup_by_level[t], scan.sup_by_level[t - 1]);
  }
  EXPECT_TRUE(std::isfinite(scan.sup));
  EXPECT_GT(scan.sup, 0.0);
  EXPECT_EQ(scan.sup_by_level[0], 1.0);  // K-hat(0,0) = 1 with weight 0
}

TEST(CountTypePairs, Examples) {
  EXPECT_EQ(count_type_pairs(2, 0, 0, 2, 2, CountMode::bruteforce), 2u);
  EXPECT_EQ(count_type_pairs(2, 0, 0, 2, 2, CountMode::formula), 2u);
  EXPECT_EQ(count_type_pairs(2, 1, 0, 2, 1, CountMode::bruteforce), 1u);
  EXPECT_EQ(count_type_pairs(2, 1, 0, 2, 1, CountMode::formula), 1u);
  EXPECT_EQ(count_type_pairs(2, 1, 1, 1, 1, CountMode::bruteforce), 0u);
  EXPECT_EQ(count_type_pairs(2, 1, 1, 1, 1, CountMode::formula), 0u);
}

TEST(CountTypePairs, FormulaMatchesBruteforce) {
  for (int b : {2, 3}) {
    const int zmax = b == 2 ? 5 : 4;
    const std::vector<std::pair<int, int>> types{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};
    for (auto [p, qq] : types) {
      for (int z1 = 0; z1 <= zmax; ++z1) {
        for (int z2 = 0; z2 <= zmax; ++z2) {
          EXPECT_EQ(count_type_pairs(b, p, qq, z1, z2, CountMode::formula),
                    count_type_pairs(b, p, qq, z1, z2, CountMode::bruteforce))
              << "b=" << b << " type (" << p << "," << qq << ") z=(" << z1 << "," << z2 << ")";
        }
      }
    }
  }
}

TEST(CountTypePairs, LiteralCeilingsOvercountAtZero) {
  EXPECT_EQ(type_count_formula_literal(3, 1, 1, 0, 0), 2u);  // (b-1)(b-2) although no pair exists
  EXPECT_EQ(type_count_formula_literal(3, 1, 1, 0, 2), 4u);
  EXPECT_EQ(count_type_pairs(3, 1, 1, 0, 2, CountMode::formula), 0u);
  EXPECT_EQ(count_type_pairs(3, 1, 1, 0, 2, CountMode::bruteforce), 0u);
}

TEST(CountTypePairs, UnsupportedTypeInFormulaMode) {
  EXPECT_THROW(count_type_pairs(2, 3, 0, 4, 1, CountMode::formula), UsageError);
  EXPECT_THROW(count_type_pairs(2, 2, 1, 4, 1, CountMode::formula), UsageError);
  EXPECT_NO_THROW(count_type_pairs(2, 3, 0, 4, 1, CountMode::bruteforce));
}
