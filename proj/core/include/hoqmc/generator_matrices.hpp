#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hoqmc/gf_arith.hpp"

namespace hoqmc {

/// Dense row-major matrix over F_b.
class DigitMatrix {
 public:
  DigitMatrix() = default;
  DigitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Digit operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Digit& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const Digit> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<Digit> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  // Upper-left block; rows/cols beyond this matrix are zero-filled.
  DigitMatrix block(std::size_t rows, std::size_t cols) const;

  friend bool operator==(const DigitMatrix&, const DigitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Digit> data_;
};

enum class Construction { niederreiter, interlaced_niederreiter, explicit_matrices };

std::string to_string(Construction c);
Construction construction_from_string(const std::string& s);

struct Provenance {
  Construction construction = Construction::explicit_matrices;
  int interlace_factor = 1;
  std::optional<int> t_claimed;
};

/// Per-dimension generating matrices C_1..C_s, each n x m over F_b.
class GeneratingMatrixSet {
 public:
  GeneratingMatrixSet(int base, std::vector<DigitMatrix> matrices, Provenance provenance);

  int base() const { return base_; }
  std::size_t dims() const { return matrices_.size(); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Provenance& provenance() const { return provenance_; }

  const DigitMatrix& matrix(std::size_t j) const { return matrices_.at(j); }
  std::span<const DigitMatrix> matrices() const { return matrices_; }

  // First s dimensions only.
  GeneratingMatrixSet project(std::size_t s) const;

 private:
  int base_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<DigitMatrix> matrices_;
  Provenance provenance_;
};

// n x m upper-left block of the generalized Niederreiter matrix C_j (j >= 1)
// built from the j-th monic irreducible over F_b.
DigitMatrix niederreiter_matrix(int b, int j, std::size_t n, std::size_t m);

// C_1..C_s at once, sharing one irreducible-polynomial search.
GeneratingMatrixSet niederreiter_set(int b, std::size_t s, std::size_t n, std::size_t m);

// Matrix-level digit interlacing: output matrix j has row d(h-1)+i equal to
// row h of source matrix d(j-1)+i (1-based h, i, j).
GeneratingMatrixSet interlace_matrices(const GeneratingMatrixSet& source, int d, std::size_t s,
                                       std::size_t n, std::size_t m);

// Order-d interlaced Niederreiter matrices with m columns and n rows
// (n defaults to d*m), provenance carrying t_value_bound(b, d, s).
GeneratingMatrixSet interlaced_niederreiter(int b, int d, std::size_t s, std::size_t m,
                                            std::optional<std::size_t> n = std::nullopt);

// t_1(sigma) = sum_{j<=sigma} (e_j - 1) for the canonical irreducible ordering.
int niederreiter_t(int b, std::size_t sigma);

// t_d(s) = d * t_1(d s) + s d (d-1) / 2.
int t_value_bound(int b, int d, std::size_t s);

}  // namespace hoqmc
