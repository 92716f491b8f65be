#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <vector>

namespace hoqmc {

/// Exact element of Q(omega_b), omega_b = exp(2 pi i / b), b prime.
///
/// Stored as rational coordinates c_0..c_{b-1} on 1, omega, ..., omega^(b-1)
/// normalized so that c_{b-1} = 0 (using 1 + omega + ... + omega^(b-1) = 0),
/// which makes the representation unique. For b = 2 this is a rational.
class Cyclotomic {
 public:
  explicit Cyclotomic(int base);
  Cyclotomic(int base, const mpq_class& rational);

  static Cyclotomic root_power(int base, int j);  // omega^j

  int base() const { return base_; }
  // Coordinates on 1, omega, ..., omega^(b-2).
  std::vector<mpq_class> coords() const;
  const mpq_class& coord(int j) const { return c_[static_cast<std::size_t>(j)]; }

  bool is_zero() const;
  bool is_rational() const;

  Cyclotomic conj() const;
  // this * omega^j
  Cyclotomic rotate(int j) const;

  Cyclotomic& operator+=(const Cyclotomic& o);
  Cyclotomic& operator-=(const Cyclotomic& o);
  Cyclotomic& operator*=(const mpq_class& q);
  // this += q * omega^j * o
  void add_scaled(const Cyclotomic& o, const mpq_class& q, int j = 0);
  // this += x * y
  void add_product(const Cyclotomic& x, const Cyclotomic& y);

  friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& o) { return a += o; }
  friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& o) { return a -= o; }
  friend Cyclotomic operator*(Cyclotomic a, const mpq_class& q) { return a *= q; }
  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& o);
  friend bool operator==(const Cyclotomic& a, const Cyclotomic& o);

  std::complex<double> to_complex() const;
  std::string to_string() const;

 private:
  void normalize();
  void check(const Cyclotomic& o) const;

  int base_;
  std::vector<mpq_class> c_;  // size b, c_[b-1] == 0 after normalize()
};

}  // namespace hoqmc
