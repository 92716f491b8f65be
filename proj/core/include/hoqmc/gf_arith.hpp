#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hoqmc {

using Digit = std::uint8_t;

inline constexpr int kMaxBase = 64;

bool is_prime(int n);

// Throws UsageError unless b is a prime not exceeding kMaxBase.
void require_prime_base(int b);

/// An element of the prime field F_b.
///
/// The base is checked for primality on construction and the value is
/// reduced into [0, b). Mixing elements of different fields is a UsageError.
class FieldElement {
 public:
  FieldElement(long long value, int base);

  int value() const { return value_; }
  int base() const { return base_; }

  FieldElement inverse() const;

  friend FieldElement operator+(FieldElement a, FieldElement c);
  friend FieldElement operator-(FieldElement a, FieldElement c);
  friend FieldElement operator*(FieldElement a, FieldElement c);
  friend FieldElement operator/(FieldElement a, FieldElement c) { return a * c.inverse(); }
  FieldElement operator-() const { return FieldElement(base_ - value_, base_); }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

 private:
  struct Unchecked {};
  FieldElement(int value, int base, Unchecked) : value_(value), base_(base) {}

  int value_;
  int base_;
};

// Inverse in F_b by exponentiation; throws DomainError for a == 0.
int field_inverse(int a, int b);

// b-adic digits of k, least significant first, exactly `len` of them.
std::vector<Digit> to_digits(std::uint64_t k, int b, std::size_t len);
// Minimal b-adic digit vector of k (empty for k == 0).
std::vector<Digit> to_digits(std::uint64_t k, int b);
std::uint64_t from_digits(std::span<const Digit> digits, int b);

// Digitwise addition / subtraction modulo b of two nonnegative integers.
std::uint64_t digit_add(std::uint64_t k, std::uint64_t l, int b);
std::uint64_t digit_sub(std::uint64_t k, std::uint64_t l, int b);

// Overflow-checked b^e; throws UsageError when the result exceeds 2^63.
std::uint64_t ipow(int b, int e);

/// Polynomial over F_b, coefficients stored lowest degree first.
///
/// Trailing zero coefficients are trimmed so that the leading coefficient of
/// a nonzero polynomial is nonzero; the zero polynomial has no coefficients.
class FieldPoly {
 public:
  FieldPoly(std::vector<Digit> coeffs, int base);
  static FieldPoly zero(int base) { return FieldPoly({}, base); }
  static FieldPoly monomial(int degree, int base);

  int base() const { return base_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }
  std::span<const Digit> coeffs() const { return coeffs_; }
  Digit coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Digit{0}; }

  // Value of the coefficient vector read as a base-b number (p evaluated at b).
  std::uint64_t ordinal() const;

  FieldPoly pow(unsigned e) const;
  // Remainder of division by a nonzero divisor.
  FieldPoly mod(const FieldPoly& divisor) const;

  std::string to_string() const;

  friend FieldPoly operator+(const FieldPoly& a, const FieldPoly& c);
  friend FieldPoly operator-(const FieldPoly& a, const FieldPoly& c);
  friend FieldPoly operator*(const FieldPoly& a, const FieldPoly& c);
  friend bool operator==(const FieldPoly&, const FieldPoly&) = default;

 private:
  void trim();

  std::vector<Digit> coeffs_;
  int base_;
};

bool is_irreducible(const FieldPoly& p);

// The first `count` monic irreducible polynomials over F_b, ordered by degree
// and then by ordinal().
std::vector<FieldPoly> monic_irreducibles(int b, std::size_t count);

// First L coefficients a(i,z,1..L) of x^(e-z-1) / p(x)^i = sum_l a(i,z,l) x^-l,
// where e = deg p. Requires p monic, i >= 1, 0 <= z < e.
std::vector<Digit> laurent_coeffs(const FieldPoly& p, int i, int z, std::size_t L);

}  // namespace hoqmc
