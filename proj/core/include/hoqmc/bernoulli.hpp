#pragma once

#include <gmpxx.h>

#include <vector>

namespace hoqmc {

// Coefficients of B_r, lowest degree first, from B_0 = 1, B_r' = r B_{r-1}
// and zero mean on [0,1].
std::vector<mpq_class> bernoulli_coeffs(int r);

mpq_class bernoulli_exact(int r, const mpq_class& x);
double bernoulli(int r, double x);

mpz_class factorial(int r);

// Coefficients of B_r(x)/r!, lowest degree first.
std::vector<mpq_class> scaled_bernoulli_coeffs(int r);

}  // namespace hoqmc
