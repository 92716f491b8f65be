#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hoqmc/generator_matrices.hpp"

namespace hoqmc {

/// A point of [0,1)^s held as base-b digits, most significant digit first.
class DigitPoint {
 public:
  DigitPoint(int base, std::size_t dims, std::size_t prec);
  DigitPoint(int base, std::size_t prec, std::vector<std::vector<Digit>> coords);

  int base() const { return base_; }
  std::size_t dims() const { return dims_; }
  std::size_t prec() const { return prec_; }

  std::span<const Digit> coord(std::size_t j) const { return {digits_.data() + j * prec_, prec_}; }
  std::span<Digit> coord(std::size_t j) { return {digits_.data() + j * prec_, prec_}; }

  // Coordinate value rounded to double (exact when b = 2 and prec <= 53).
  double value(std::size_t j) const;
  // Integer a with value(j) == a / b^prec; requires b^prec < 2^63.
  std::uint64_t numerator(std::size_t j) const;

  friend bool operator==(const DigitPoint&, const DigitPoint&) = default;

 private:
  int base_;
  std::size_t dims_;
  std::size_t prec_;
  std::vector<Digit> digits_;
};

// Point h of the digital net/sequence: coordinate j has digits C_j * eta over
// F_b, eta the base-b digits of h (least significant first). Precision is
// M.rows(). Throws UsageError if h >= b^cols.
DigitPoint digital_point(const GeneratingMatrixSet& M, std::uint64_t h);

// Points h = 0..b^m-1 using the first m columns of M. Index ranges are split
// across `threads` workers; the output order never depends on the split.
std::vector<DigitPoint> net_points(const GeneratingMatrixSet& M, std::size_t m, unsigned threads = 1);

// Digit interlacing of d equal-precision digit vectors: output digit
// d*i + j (0-based) is digit i of input j.
std::vector<Digit> interlace_point(std::span<const std::vector<Digit>> xs);

// Blockwise interlacing of an (s*d)-dimensional point into s dimensions.
DigitPoint interlace_point(const DigitPoint& x, int d);

struct PointHeader {
  int base = 2;
  std::size_t dims = 1;
  std::size_t m = 0;
  int order = 1;
  std::string construction;
};

enum class PointFormat { csv, digits };

PointFormat point_format_from_string(const std::string& s);

// Decimal digits printed per coordinate in csv mode: ceil(prec*log10 b) + 2.
std::size_t csv_decimals(int base, std::size_t prec);

// Exact decimal rendering of a coordinate, rounded half-up to `decimals`
// fractional digits.
std::string format_coordinate(std::span<const Digit> digits, int base, std::size_t decimals);

void write_points(std::ostream& out, std::span<const DigitPoint> points, const PointHeader& header,
                  PointFormat format);

}  // namespace hoqmc
