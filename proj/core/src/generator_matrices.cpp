#include "hoqmc/generator_matrices.hpp"

#include <algorithm>

#include "hoqmc/errors.hpp"

namespace hoqmc {

DigitMatrix DigitMatrix::block(std::size_t rows, std::size_t cols) const {
  DigitMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows && r < rows_; ++r) {
    for (std::size_t c = 0; c < cols && c < cols_; ++c) out(r, c) = (*this)(r, c);
  }
  return out;
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::niederreiter:
      return "niederreiter";
    case Construction::interlaced_niederreiter:
      return "interlaced-niederreiter";
    case Construction::explicit_matrices:
      return "explicit";
  }
  return "unknown";
}

Construction construction_from_string(const std::string& s) {
  if (s == "niederreiter") return Construction::niederreiter;
  if (s == "interlaced-niederreiter") return Construction::interlaced_niederreiter;
  if (s == "explicit") return Construction::explicit_matrices;
  throw UsageError("unknown construction '" + s + "'");
}

GeneratingMatrixSet::GeneratingMatrixSet(int base, std::vector<DigitMatrix> matrices, Provenance provenance)
    : base_(base), rows_(0), cols_(0), matrices_(std::move(matrices)), provenance_(provenance) {
  require_prime_base(base);
  if (matrices_.empty()) throw UsageError("a matrix set needs at least one dimension");
  rows_ = matrices_.front().rows();
  cols_ = matrices_.front().cols();
  if (rows_ == 0 || cols_ == 0) throw UsageError("generating matrices must be non-empty");
  for (const auto& mat : matrices_) {
    if (mat.rows() != rows_ || mat.cols() != cols_) {
      throw UsageError("all generating matrices must share one shape");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      for (auto v : mat.row(r)) {
        if (v >= base) throw UsageError("matrix entry out of range for F_" + std::to_string(base));
      }
    }
  }
  if (provenance_.interlace_factor < 1) throw UsageError("interlace factor must be >= 1");
}

GeneratingMatrixSet GeneratingMatrixSet::project(std::size_t s) const {
  if (s == 0 || s > dims()) throw UsageError("projection dimension out of range");
  Provenance p = provenance_;
  if (s != dims()) p.t_claimed.reset();
  return GeneratingMatrixSet(base_, std::vector<DigitMatrix>(matrices_.begin(), matrices_.begin() + static_cast<std::ptrdiff_t>(s)), p);
}

namespace {

DigitMatrix niederreiter_from_poly(const FieldPoly& p, std::size_t n, std::size_t m) {
  const int e = p.degree();
  DigitMatrix out(n, m);
  for (std::size_t k = 1; k <= n; ++k) {
    const int i = static_cast<int>((k - 1) / static_cast<std::size_t>(e)) + 1;
    const int z = static_cast<int>((k - 1) % static_cast<std::size_t>(e));
    const auto a = laurent_coeffs(p, i, z, m);
    std::copy(a.begin(), a.end(), out.row(k - 1).begin());
  }
  return out;
}

}  // namespace

DigitMatrix niederreiter_matrix(int b, int j, std::size_t n, std::size_t m) {
  if (j < 1) throw UsageError("dimension index j must be >= 1");
  if (n == 0 || m == 0) throw UsageError("matrix shape must be positive");
  const auto polys = monic_irreducibles(b, static_cast<std::size_t>(j));
  return niederreiter_from_poly(polys.back(), n, m);
}

GeneratingMatrixSet niederreiter_set(int b, std::size_t s, std::size_t n, std::size_t m) {
  if (s == 0 || n == 0 || m == 0) throw UsageError("niederreiter_set: s, n, m must be positive");
  const auto polys = monic_irreducibles(b, s);
  std::vector<DigitMatrix> mats;
  mats.reserve(s);
  for (const auto& p : polys) mats.push_back(niederreiter_from_poly(p, n, m));
  return GeneratingMatrixSet(b, std::move(mats), Provenance{Construction::niederreiter, 1, niederreiter_t(b, s)});
}

GeneratingMatrixSet interlace_matrices(const GeneratingMatrixSet& source, int d, std::size_t s, std::size_t n,
                                       std::size_t m) {
  if (d < 1) throw UsageError("interlacing order must be >= 1");
  if (s == 0 || n == 0 || m == 0) throw UsageError("interlace_matrices: s, n, m must be positive");
  if (source.provenance().interlace_factor != 1) {
    throw UsageError("interlacing source must be an order-1 (d=1) matrix set");
  }
  const auto ud = static_cast<std::size_t>(d);
  if (source.dims() < ud * s) {
    throw UsageError("interlacing needs " + std::to_string(ud * s) + " source dimensions, have " +
                     std::to_string(source.dims()));
  }
  const std::size_t needed_rows = (n + ud - 1) / ud;
  if (source.rows() < needed_rows) {
    throw UsageError("interlacing needs " + std::to_string(needed_rows) + " source rows, have " +
                     std::to_string(source.rows()));
  }
  if (source.cols() < m) {
    throw UsageError("interlacing needs " + std::to_string(m) + " source columns, have " +
                     std::to_string(source.cols()));
  }
  std::vector<DigitMatrix> out;
  out.reserve(s);
  for (std::size_t j = 0; j < s; ++j) {
    DigitMatrix mat(n, m);
    for (std::size_t row = 0; row < n; ++row) {
      const std::size_t h = row / ud;
      const std::size_t i = row % ud;
      const auto src = source.matrix(ud * j + i).row(h);
      std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(m), mat.row(row).begin());
    }
    out.push_back(std::move(mat));
  }
  Provenance p{d == 1 ? source.provenance().construction : Construction::interlaced_niederreiter, d, std::nullopt};
  if (source.provenance().construction == Construction::niederreiter) {
    p.t_claimed = t_value_bound(source.base(), d, s);
  }
  return GeneratingMatrixSet(source.base(), std::move(out), p);
}

GeneratingMatrixSet interlaced_niederreiter(int b, int d, std::size_t s, std::size_t m,
                                            std::optional<std::size_t> n) {
  if (d < 1) throw UsageError("interlacing order must be >= 1");
  const auto ud = static_cast<std::size_t>(d);
  const std::size_t rows = n.value_or(ud * m);
  const auto source = niederreiter_set(b, ud * s, (rows + ud - 1) / ud, m);
  return interlace_matrices(source, d, s, rows, m);
}

int niederreiter_t(int b, std::size_t sigma) {
  int t = 0;
  for (const auto& p : monic_irreducibles(b, sigma)) t += p.degree() - 1;
  return t;
}

int t_value_bound(int b, int d, std::size_t s) {
  if (d < 1 || s == 0) throw UsageError("t_value_bound: d and s must be positive");
  const int si = static_cast<int>(s);
  return d * niederreiter_t(b, static_cast<std::size_t>(d) * s) + si * d * (d - 1) / 2;
}

}  // namespace hoqmc
