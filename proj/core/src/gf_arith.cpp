#include "hoqmc/gf_arith.hpp"

#include <algorithm>
#include <limits>

#include "hoqmc/errors.hpp"

namespace hoqmc {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

void require_prime_base(int b) {
  if (!is_prime(b)) {
    throw UsageError("base " + std::to_string(b) + " is not prime");
  }
  if (b > kMaxBase) {
    throw UsageError("base " + std::to_string(b) + " exceeds the supported maximum of " +
                     std::to_string(kMaxBase));
  }
}

FieldElement::FieldElement(long long value, int base) : base_(base) {
  require_prime_base(base);
  long long r = value % base;
  if (r < 0) r += base;
  value_ = static_cast<int>(r);
}

namespace {

void check_same_field(const FieldElement& a, const FieldElement& c) {
  if (a.base() != c.base()) {
    throw UsageError("field elements from F_" + std::to_string(a.base()) + " and F_" +
                     std::to_string(c.base()) + " cannot be combined");
  }
}

}  // namespace

FieldElement operator+(FieldElement a, FieldElement c) {
  check_same_field(a, c);
  return FieldElement((a.value_ + c.value_) % a.base_, a.base_, FieldElement::Unchecked{});
}

FieldElement operator-(FieldElement a, FieldElement c) {
  check_same_field(a, c);
  return FieldElement((a.value_ - c.value_ + a.base_) % a.base_, a.base_,
                      FieldElement::Unchecked{});
}

FieldElement operator*(FieldElement a, FieldElement c) {
  check_same_field(a, c);
  return FieldElement((a.value_ * c.value_) % a.base_, a.base_, FieldElement::Unchecked{});
}

FieldElement FieldElement::inverse() const {
  return FieldElement(field_inverse(value_, base_), base_, Unchecked{});
}

int field_inverse(int a, int b) {
  a %= b;
  if (a < 0) a += b;
  if (a == 0) throw DomainError("zero has no inverse in F_" + std::to_string(b));
  // a^(b-2) by square-and-multiply
  int result = 1;
  int base = a;
  for (int e = b - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % b;
    base = base * base % b;
  }
  return result;
}

std::vector<Digit> to_digits(std::uint64_t k, int b, std::size_t len) {
  std::vector<Digit> out(len, 0);
  for (std::size_t i = 0; i < len && k != 0; ++i) {
    out[i] = static_cast<Digit>(k % static_cast<std::uint64_t>(b));
    k /= static_cast<std::uint64_t>(b);
  }
  return out;
}

std::vector<Digit> to_digits(std::uint64_t k, int b) {
  std::vector<Digit> out;
  while (k != 0) {
    out.push_back(static_cast<Digit>(k % static_cast<std::uint64_t>(b)));
    k /= static_cast<std::uint64_t>(b);
  }
  return out;
}

std::uint64_t from_digits(std::span<const Digit> digits, int b) {
  std::uint64_t k = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    k = k * static_cast<std::uint64_t>(b) + *it;
  }
  return k;
}

std::uint64_t digit_add(std::uint64_t k, std::uint64_t l, int b) {
  const auto ub = static_cast<std::uint64_t>(b);
  std::uint64_t out = 0;
  std::uint64_t scale = 1;
  while (k != 0 || l != 0) {
    out += ((k % ub + l % ub) % ub) * scale;
    k /= ub;
    l /= ub;
    scale *= ub;
  }
  return out;
}

std::uint64_t digit_sub(std::uint64_t k, std::uint64_t l, int b) {
  const auto ub = static_cast<std::uint64_t>(b);
  std::uint64_t out = 0;
  std::uint64_t scale = 1;
  while (k != 0 || l != 0) {
    out += ((k % ub + ub - l % ub) % ub) * scale;
    k /= ub;
    l /= ub;
    scale *= ub;
  }
  return out;
}

std::uint64_t ipow(int b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 63) / static_cast<std::uint64_t>(b)) {
      throw UsageError(std::to_string(b) + "^" + std::to_string(e) + " overflows 64 bits");
    }
    r *= static_cast<std::uint64_t>(b);
  }
  return r;
}

// ---------------------------------------------------------------------------

FieldPoly::FieldPoly(std::vector<Digit> coeffs, int base) : coeffs_(std::move(coeffs)), base_(base) {
  require_prime_base(base);
  for (auto c : coeffs_) {
    if (c >= base) throw UsageError("polynomial coefficient out of range for F_" + std::to_string(base));
  }
  trim();
}

FieldPoly FieldPoly::monomial(int degree, int base) {
  if (degree < 0) throw UsageError("monomial degree must be >= 0");
  std::vector<Digit> c(static_cast<std::size_t>(degree) + 1, 0);
  c.back() = 1;
  return FieldPoly(std::move(c), base);
}

void FieldPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

std::uint64_t FieldPoly::ordinal() const { return from_digits(coeffs_, base_); }

FieldPoly operator+(const FieldPoly& a, const FieldPoly& c) {
  if (a.base_ != c.base_) throw UsageError("polynomials over different fields");
  std::vector<Digit> out(std::max(a.coeffs_.size(), c.coeffs_.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<Digit>((a.coeff(i) + c.coeff(i)) % a.base_);
  }
  return FieldPoly(std::move(out), a.base_);
}

FieldPoly operator-(const FieldPoly& a, const FieldPoly& c) {
  if (a.base_ != c.base_) throw UsageError("polynomials over different fields");
  std::vector<Digit> out(std::max(a.coeffs_.size(), c.coeffs_.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<Digit>((a.coeff(i) + a.base_ - c.coeff(i)) % a.base_);
  }
  return FieldPoly(std::move(out), a.base_);
}

FieldPoly operator*(const FieldPoly& a, const FieldPoly& c) {
  if (a.base_ != c.base_) throw UsageError("polynomials over different fields");
  if (a.is_zero() || c.is_zero()) return FieldPoly::zero(a.base_);
  std::vector<int> acc(a.coeffs_.size() + c.coeffs_.size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < c.coeffs_.size(); ++j) {
      acc[i + j] = (acc[i + j] + a.coeffs_[i] * c.coeffs_[j]) % a.base_;
    }
  }
  std::vector<Digit> out(acc.begin(), acc.end());
  return FieldPoly(std::move(out), a.base_);
}

FieldPoly FieldPoly::pow(unsigned e) const {
  FieldPoly result({1}, base_);
  FieldPoly sq = *this;
  for (; e != 0; e >>= 1) {
    if (e & 1u) result = result * sq;
    if (e > 1) sq = sq * sq;
  }
  return result;
}

FieldPoly FieldPoly::mod(const FieldPoly& divisor) const {
  if (divisor.base_ != base_) throw UsageError("polynomials over different fields");
  if (divisor.is_zero()) throw DomainError("polynomial division by zero");
  std::vector<int> r(coeffs_.begin(), coeffs_.end());
  const int dd = divisor.degree();
  const int lead_inv = field_inverse(divisor.coeffs_.back(), base_);
  for (int top = static_cast<int>(r.size()) - 1; top >= dd; --top) {
    const int c = r[static_cast<std::size_t>(top)] * lead_inv % base_;
    if (c == 0) continue;
    const int shift = top - dd;
    for (int i = 0; i <= dd; ++i) {
      auto& slot = r[static_cast<std::size_t>(shift + i)];
      slot = (slot + base_ - c * divisor.coeffs_[static_cast<std::size_t>(i)] % base_) % base_;
    }
  }
  r.resize(static_cast<std::size_t>(std::min<int>(dd, static_cast<int>(r.size()))));
  return FieldPoly(std::vector<Digit>(r.begin(), r.end()), base_);
}

std::string FieldPoly::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (int i = degree(); i >= 0; --i) {
    const int c = coeffs_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    if (!out.empty()) out += " + ";
    if (i == 0 || c != 1) out += std::to_string(c);
    if (i >= 1) out += "x";
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out;
}

bool is_irreducible(const FieldPoly& p) {
  if (p.degree() < 1) return false;
  const int b = p.base();
  // Trial division by every monic polynomial of degree 1..deg/2.
  for (int d = 1; 2 * d <= p.degree(); ++d) {
    const std::uint64_t n = ipow(b, d);
    for (std::uint64_t v = 0; v < n; ++v) {
      auto c = to_digits(v, b, static_cast<std::size_t>(d));
      c.push_back(1);
      if (p.mod(FieldPoly(std::move(c), b)).is_zero()) return false;
    }
  }
  return true;
}

std::vector<FieldPoly> monic_irreducibles(int b, std::size_t count) {
  require_prime_base(b);
  std::vector<FieldPoly> out;
  out.reserve(count);
  for (int d = 1; out.size() < count; ++d) {
    const std::size_t lower_end = out.size();  // every irreducible of degree < d
    const std::uint64_t n = ipow(b, d);
    for (std::uint64_t v = 0; v < n && out.size() < count; ++v) {
      auto c = to_digits(v, b, static_cast<std::size_t>(d));
      c.push_back(1);
      FieldPoly cand(std::move(c), b);
      bool irreducible = true;
      for (std::size_t i = 0; i < lower_end; ++i) {
        if (2 * out[i].degree() > d) break;
        if (cand.mod(out[i]).is_zero()) {
          irreducible = false;
          break;
        }
      }
      if (irreducible) out.push_back(std::move(cand));
    }
  }
  return out;
}

std::vector<Digit> laurent_coeffs(const FieldPoly& p, int i, int z, std::size_t L) {
  const int e = p.degree();
  if (!p.is_monic()) throw UsageError("laurent_coeffs: polynomial must be monic");
  if (i < 1) throw UsageError("laurent_coeffs: power i must be >= 1");
  if (z < 0 || z >= e) {
    throw UsageError("laurent_coeffs: z=" + std::to_string(z) + " outside [0, " + std::to_string(e) + ")");
  }
  const int b = p.base();
  const FieldPoly den = p.pow(static_cast<unsigned>(i));
  const int ie = den.degree();
  // 1/den = x^-ie * sum_n u_n x^-n with u_0 = 1 (den is monic).
  std::vector<int> u(L + 1, 0);
  u[0] = 1;
  for (std::size_t n = 1; n <= L; ++n) {
    int s = 0;
    for (int j = 1; j <= ie && static_cast<std::size_t>(j) <= n; ++j) {
      s = (s + den.coeff(static_cast<std::size_t>(ie - j)) * u[n - static_cast<std::size_t>(j)]) % b;
    }
    u[n] = (b - s) % b;
  }
  // x^(e-z-1) / den = sum_n u_n x^-(n + shift)
  const std::size_t shift = static_cast<std::size_t>(ie - (e - z - 1));
  std::vector<Digit> a(L, 0);
  for (std::size_t l = 1; l <= L; ++l) {
    if (l >= shift) a[l - 1] = static_cast<Digit>(u[l - shift]);
  }
  return a;
}

}  // namespace hoqmc
