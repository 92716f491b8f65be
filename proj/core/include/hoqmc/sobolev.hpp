#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hoqmc/cyclotomic.hpp"
#include "hoqmc/generator_matrices.hpp"
#include "hoqmc/net_quality.hpp"
#include "hoqmc/point_engine.hpp"

namespace hoqmc {

struct KernelSpec {
  int alpha = 1;
  std::size_t dims = 1;

  void validate() const;
};

// K_alpha(x,y) = sum_{r<=alpha} B_r(x) B_r(y) / (r!)^2 + (-1)^(alpha+1) B_{2alpha}(|x-y|) / (2alpha)!
double kernel_1d(int alpha, double x, double y);
double kernel_sd(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);
mpq_class kernel_1d_exact(int alpha, const mpq_class& x, const mpq_class& y);

// Squared worst-case error of equal-weight cubature on P in the Sobolev space
// of smoothness alpha: (1/N^2) sum_{n,n'} K(x_n, x_n') - 1, using
// int K(x, y) dy = 1. Evaluated as a sum of K - 1 = prod(1 + g_j) - 1 with
// g_j = K_alpha(x_j, y_j) - 1 to avoid cancellation, Kahan-compensated inside
// fixed blocks of rows; block totals are combined in index order, so the
// result does not depend on `threads`. Values in [-1e-9, 0) clamp to 0; more
// negative values raise NumericalError.
double wce_squared(const KernelSpec& spec, std::span<const DigitPoint> points, unsigned threads = 1);
double wce(const KernelSpec& spec, std::span<const DigitPoint> points, unsigned threads = 1);

// Exact rational e^2 for N <= 64 points and s <= 2.
mpq_class wce_squared_exact(const KernelSpec& spec, std::span<const DigitPoint> points);

struct DualTruncation {
  int cutoff = 0;
  std::size_t dual_size = 0;  // nonzero dual vectors with mu_1 <= cutoff
  Cyclotomic exact{2};        // sum of K-hat over those pairs
  double value = 0.0;         // its real part
};

// Sum of the multivariate K-hat(k, l) over nonzero dual vectors k, l of the
// net with b^m points from the first m columns of M, with mu_1(k), mu_1(l) <=
// cutoff. Throws NumericalError if the sum is not real.
DualTruncation wce_dual_truncated(const KernelSpec& spec, const GeneratingMatrixSet& M, std::size_t m, int cutoff,
                                  std::uint64_t work_limit = kDefaultWorkLimit, unsigned threads = 1);

// The same truncated sums for every cutoff 0..max_cutoff from one pass.
std::vector<DualTruncation> wce_dual_truncated_series(const KernelSpec& spec, const GeneratingMatrixSet& M,
                                                      std::size_t m, int max_cutoff,
                                                      std::uint64_t work_limit = kDefaultWorkLimit,
                                                      unsigned threads = 1);

}  // namespace hoqmc
