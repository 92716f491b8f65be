#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hoqmc/generator_matrices.hpp"

namespace hoqmc {

inline constexpr std::uint64_t kDefaultWorkLimit = 10'000'000;

/// Nonzero base-b digit of an integer: k = sum kappa * b^(c-1).
struct DigitTerm {
  int kappa;
  int c;
  friend bool operator==(const DigitTerm&, const DigitTerm&) = default;
};

// Nonzero digits of k, leading term first (c strictly decreasing).
std::vector<DigitTerm> digit_terms(std::uint64_t k, int b);

/// k in N_0^s with the nonzero digit expansion of every component cached.
class DualIndex {
 public:
  DualIndex(std::vector<std::uint64_t> components, int base);

  int base() const { return base_; }
  std::size_t dims() const { return components_.size(); }
  const std::vector<std::uint64_t>& components() const { return components_; }
  std::uint64_t component(std::size_t j) const { return components_[j]; }
  const std::vector<DigitTerm>& terms(std::size_t j) const { return terms_[j]; }
  bool is_zero() const;

 private:
  int base_;
  std::vector<std::uint64_t> components_;
  std::vector<std::vector<DigitTerm>> terms_;
};

// Dick metric: sum of the alpha largest nonzero digit positions of k.
int mu(int alpha, std::uint64_t k, int b);
int mu(int alpha, const DualIndex& k);

// All nonzero k with mu_1(k) <= mu1_max in the dual net of M (digit vectors
// truncated to M.rows() digits, syndromes over all M.cols() columns), sorted
// by (mu_1, lexicographic k). Throws ResourceError once more than
// `work_limit` candidates have been examined.
std::vector<DualIndex> dual_enumerate(const GeneratingMatrixSet& M, int mu1_max,
                                      std::uint64_t work_limit = kDefaultWorkLimit);

// Dual vectors with mu_1 exactly equal to `shell`, sorted lexicographically.
// `work` accumulates the candidates examined across calls.
std::vector<DualIndex> dual_shell(const GeneratingMatrixSet& M, int shell, std::uint64_t work_limit,
                                  std::uint64_t& work);

struct RhoResult {
  std::optional<int> value;  // empty: no dual vector with mu_1 <= search_cap
  bool proven_minimal = false;
  std::optional<DualIndex> argmin;
  int shells_searched = 0;
};

// rho_alpha = min mu_alpha over nonzero dual vectors, searched in increasing
// mu_1 shells. Since mu_alpha >= mu_1, the search stops as soon as the best
// value found is <= the next unexplored shell.
RhoResult rho_min(const GeneratingMatrixSet& M, int alpha, int search_cap,
                  std::uint64_t work_limit = kDefaultWorkLimit);

enum class Verdict { certified, refuted };

struct NetCertificate {
  int b = 2;
  std::size_t m = 0;
  std::size_t s = 0;
  int alpha = 1;
  int t = 0;
  Verdict verdict = Verdict::certified;
  // Refuted only: selected row indices per dimension (1-based, descending).
  std::optional<std::vector<std::vector<int>>> witness;
  std::uint64_t selections_checked = 0;
};

// Order-alpha (t,m,s)-net check on the first s matrices and first m columns
// of M. Every admissible row selection (weight of the top alpha rows per
// dimension at most alpha*m - t) must be linearly independent. It suffices to
// test, per dimension, each top set T of at most alpha rows, extended by all
// rows below min(T) when |T| == alpha; each admissible selection is contained
// in one of these with equal weight. The first dependent one is the witness.
NetCertificate certify_order_t(const GeneratingMatrixSet& M, int alpha, std::size_t m, std::size_t s, int t,
                               std::uint64_t work_limit = kDefaultWorkLimit);

// Certifies at order alpha_prime < alpha with t' = ceil(t * alpha_prime / alpha).
NetCertificate propagation_check(const GeneratingMatrixSet& M, int alpha, int alpha_prime, std::size_t m,
                                 std::size_t s, int t, std::uint64_t work_limit = kDefaultWorkLimit);

// mu_alpha(k) - (A mu_{2alpha+1}(k) + B mu_1(k)), A = (alpha-1)/(2alpha),
// B = (alpha+1)/(2alpha). Requires alpha >= 2.
mpq_class interpolation_gap(int alpha, const DualIndex& k);

}  // namespace hoqmc
