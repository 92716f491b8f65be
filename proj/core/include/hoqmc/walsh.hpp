#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hoqmc/cyclotomic.hpp"
#include "hoqmc/point_engine.hpp"

namespace hoqmc {

// wal_k(x) = omega_b^e with e = sum_i kappa_i xi_i mod b, where kappa_1 is the
// least significant digit of k and xi_1 the most significant digit of x.
// Digits of k beyond the precision of x pair with zero digits.
int walsh_exponent(int b, std::uint64_t k, std::span<const Digit> x);
// Multivariate form: sum of the per-coordinate exponents mod b.
int walsh_exponent(std::span<const std::uint64_t> k, const DigitPoint& x);

struct WalshPairType {
  int p = 0;
  int q = 0;
  friend bool operator==(const WalshPairType&, const WalshPairType&) = default;
};

// The unique (p, q) with k^(p) == l^(q) and differing p-th / q-th leading
// terms; (0, 0) when k == l.
WalshPairType classify_type(int b, std::uint64_t k, std::uint64_t l);

// Integral of B_r(x)/r! * conj(wal_k(x)) over [0,1].
Cyclotomic bhat_r(int b, int r, std::uint64_t k);

// How B_r is continued below the diagonal x < y. `absolute` integrates
// B_r(|x - y|), which equals the periodic extension of B_r(x - y) for even r
// and differs from it by the sign (-1)^r for odd r; `periodic` integrates the
// periodic extension of B_r(x - y) on both sides.
enum class DiagonalRule { absolute, periodic };

// Double integral of B_r(|x-y|)/r! * conj(wal_k(x)) * wal_l(y), r >= 2,
// by the digit-tree moment recursion along the ancestors of (k, l).
Cyclotomic bhat_r_per(int b, int r, std::uint64_t k, std::uint64_t l,
                      DiagonalRule rule = DiagonalRule::absolute);

// Same integral summed cell by cell on the b-adic grid where wal_k and wal_l
// are constant: O(b^(2g)) integer work plus one exact cell integral per
// diagonal offset. Independent of the moment recursion.
Cyclotomic bhat_r_per_grid(int b, int r, std::uint64_t k, std::uint64_t l);

// Kernel coefficient sum_{r<=alpha} bhat_r(k) conj(bhat_r(l))
// + (-1)^(alpha+1) bhat_{2alpha,per}(k, l).
Cyclotomic khat(int b, int alpha, std::uint64_t k, std::uint64_t l);
Cyclotomic khat_s(int b, int alpha, std::span<const std::uint64_t> k, std::span<const std::uint64_t> l);

// Coefficients for every pair in ks x ls, row-major (|ks| rows). Shares the
// recursion across pairs; memory beyond the output is O(b^g) for
// g = digits of the largest index.
std::vector<Cyclotomic> khat_batch(int b, int alpha, std::span<const std::uint64_t> ks,
                                   std::span<const std::uint64_t> ls, unsigned threads = 1);
std::vector<Cyclotomic> bhat_r_per_batch(int b, int r, std::span<const std::uint64_t> ks,
                                         std::span<const std::uint64_t> ls, unsigned threads = 1);

/// K-hat_alpha(k, l) for all k, l < b^levels.
class WalshCoeffTable {
 public:
  WalshCoeffTable(int base, int alpha, int levels, std::vector<Cyclotomic> values,
                  std::vector<std::vector<Cyclotomic>> bhat);

  int base() const { return base_; }
  int alpha() const { return alpha_; }
  int levels() const { return levels_; }
  std::uint64_t size() const { return size_; }

  const Cyclotomic& value(std::uint64_t k, std::uint64_t l) const { return values_[k * size_ + l]; }
  WalshPairType type(std::uint64_t k, std::uint64_t l) const { return classify_type(base_, k, l); }
  // bhat_r(k) for 0 <= r <= alpha.
  const Cyclotomic& bhat(int r, std::uint64_t k) const { return bhat_[static_cast<std::size_t>(r)][k]; }

 private:
  int base_;
  int alpha_;
  int levels_;
  std::uint64_t size_;
  std::vector<Cyclotomic> values_;
  std::vector<std::vector<Cyclotomic>> bhat_;
};

WalshCoeffTable build_walsh_table(int b, int alpha, int levels, unsigned threads = 1);

struct SparsityReport {
  std::uint64_t pairs = 0;
  std::uint64_t over_budget = 0;  // pairs with p + q > 2 alpha
  std::uint64_t nonzero_over_budget = 0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> first_violation;
};

SparsityReport check_sparsity(const WalshCoeffTable& table);

// sup |K-hat(k,l)| * b^(mu_alpha(k) + mu_alpha(l)) over pairs whose larger
// index has at most t digits, for t = 0..levels (cumulative, so monotone).
struct DecayScan {
  std::vector<double> sup_by_level;
  double sup = 0.0;
};

DecayScan decay_scan(const WalshCoeffTable& table);

enum class CountMode { bruteforce, formula };

// Number of pairs (k, l) with mu_1(k) = z1, mu_1(l) = z2 and type (p, q).
// Formula mode covers (0,0), (1,0), (0,1), (2,0), (0,2), (1,1).
std::uint64_t count_type_pairs(int b, int p, int q, int z1, int z2, CountMode mode);

// Closed-form counts with ceilings taken literally. For (1,1) with
// min(z1, z2) = 0 this yields (b-1)(b-2) or (b-1)^2 although no such pair
// exists; count_type_pairs returns 0 there.
std::uint64_t type_count_formula_literal(int b, int p, int q, int z1, int z2);

}  // namespace hoqmc
