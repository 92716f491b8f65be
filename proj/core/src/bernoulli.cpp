#include "hoqmc/bernoulli.hpp"

#include "hoqmc/errors.hpp"

namespace hoqmc {

std::vector<mpq_class> bernoulli_coeffs(int r) {
  if (r < 0) throw UsageError("Bernoulli degree must be >= 0");
  std::vector<mpq_class> c{mpq_class(1)};
  for (int n = 1; n <= r; ++n) {
    std::vector<mpq_class> next(static_cast<std::size_t>(n) + 1);
    mpq_class mean = 0;
    for (int i = 1; i <= n; ++i) {
      next[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i) - 1] * n / i;
      mean += next[static_cast<std::size_t>(i)] / (i + 1);
    }
    next[0] = -mean;
    c = std::move(next);
  }
  return c;
}

mpq_class bernoulli_exact(int r, const mpq_class& x) {
  const auto c = bernoulli_coeffs(r);
  mpq_class v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double bernoulli(int r, double x) {
  const auto c = bernoulli_coeffs(r);
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + it->get_d();
  return v;
}

mpz_class factorial(int r) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(r));
  return f;
}

std::vector<mpq_class> scaled_bernoulli_coeffs(int r) {
  auto c = bernoulli_coeffs(r);
  const mpq_class f(factorial(r));
  for (auto& v : c) v /= f;
  return c;
}

}  // namespace hoqmc
