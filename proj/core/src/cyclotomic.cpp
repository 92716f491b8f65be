#include "hoqmc/cyclotomic.hpp"

#include <cmath>
#include <numbers>

#include "hoqmc/errors.hpp"
#include "hoqmc/gf_arith.hpp"

namespace hoqmc {

namespace {

int mod_b(int j, int b) {
  j %= b;
  return j < 0 ? j + b : j;
}

}  // namespace

Cyclotomic::Cyclotomic(int base) : base_(base), c_(static_cast<std::size_t>(base)) { require_prime_base(base); }

Cyclotomic::Cyclotomic(int base, const mpq_class& rational) : Cyclotomic(base) { c_[0] = rational; }

Cyclotomic Cyclotomic::root_power(int base, int j) {
  Cyclotomic out(base);
  out.c_[static_cast<std::size_t>(mod_b(j, base))] = 1;
  out.normalize();
  return out;
}

void Cyclotomic::normalize() {
  const std::size_t last = static_cast<std::size_t>(base_) - 1;
  if (sgn(c_[last]) == 0) return;
  const mpq_class top = c_[last];
  for (auto& v : c_) v -= top;
}

void Cyclotomic::check(const Cyclotomic& o) const {
  if (o.base_ != base_) throw UsageError("cyclotomic numbers from different fields");
}

std::vector<mpq_class> Cyclotomic::coords() const { return {c_.begin(), c_.end() - 1}; }

bool Cyclotomic::is_zero() const {
  for (const auto& v : c_) {
    if (sgn(v) != 0) return false;
  }
  return true;
}

bool Cyclotomic::is_rational() const {
  for (std::size_t j = 1; j < c_.size(); ++j) {
    if (sgn(c_[j]) != 0) return false;
  }
  return true;
}

Cyclotomic Cyclotomic::conj() const {
  Cyclotomic out(base_);
  for (int j = 0; j < base_; ++j) out.c_[static_cast<std::size_t>(mod_b(-j, base_))] = c_[static_cast<std::size_t>(j)];
  out.normalize();
  return out;
}

Cyclotomic Cyclotomic::rotate(int j) const {
  Cyclotomic out(base_);
  for (int i = 0; i < base_; ++i) {
    out.c_[static_cast<std::size_t>(mod_b(i + j, base_))] = c_[static_cast<std::size_t>(i)];
  }
  out.normalize();
  return out;
}

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& o) {
  check(o);
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
  return *this;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& o) {
  check(o);
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
  return *this;
}

Cyclotomic& Cyclotomic::operator*=(const mpq_class& q) {
  for (auto& v : c_) v *= q;
  return *this;
}

void Cyclotomic::add_scaled(const Cyclotomic& o, const mpq_class& q, int j) {
  check(o);
  const int shift = mod_b(j, base_);
  mpq_class tmp;
  for (int i = 0; i < base_; ++i) {
    const auto& src = o.c_[static_cast<std::size_t>(i)];
    if (sgn(src) == 0) continue;
    tmp = src * q;
    c_[static_cast<std::size_t>(mod_b(i + shift, base_))] += tmp;
  }
  normalize();
}

void Cyclotomic::add_product(const Cyclotomic& x, const Cyclotomic& y) {
  check(x);
  check(y);
  mpq_class tmp;
  for (int i = 0; i < base_; ++i) {
    const auto& a = x.c_[static_cast<std::size_t>(i)];
    if (sgn(a) == 0) continue;
    for (int j = 0; j < base_; ++j) {
      const auto& c = y.c_[static_cast<std::size_t>(j)];
      if (sgn(c) == 0) continue;
      tmp = a * c;
      c_[static_cast<std::size_t>((i + j) % base_)] += tmp;
    }
  }
  normalize();
}

Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& o) {
  Cyclotomic out(a.base_);
  out.add_product(a, o);
  return out;
}

bool operator==(const Cyclotomic& a, const Cyclotomic& o) {
  if (a.base_ != o.base_) return false;
  for (std::size_t j = 0; j < a.c_.size(); ++j) {
    if (a.c_[j] != o.c_[j]) return false;
  }
  return true;
}

std::complex<double> Cyclotomic::to_complex() const {
  std::complex<double> z = 0;
  for (int j = 0; j < base_; ++j) {
    const double v = c_[static_cast<std::size_t>(j)].get_d();
    if (v == 0.0) continue;
    const double ang = 2.0 * std::numbers::pi * j / base_;
    z += std::complex<double>(v * std::cos(ang), v * std::sin(ang));
  }
  return z;
}

std::string Cyclotomic::to_string() const {
  std::string out;
  for (int j = 0; j + 1 < base_; ++j) {
    const auto& v = c_[static_cast<std::size_t>(j)];
    if (sgn(v) == 0) continue;
    if (!out.empty()) out += " + ";
    out += "(" + v.get_str() + ")";
    if (j == 1) out += "*w";
    if (j >= 2) out += "*w^" + std::to_string(j);
  }
  return out.empty() ? "0" : out;
}

}  // namespace hoqmc
