#include "hoqmc/matrix_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hoqmc/errors.hpp"

namespace hoqmc {

namespace {

// Next non-comment, non-blank line; false at end of input.
bool next_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void parse_error(int line_no, const std::string& what) {
  throw UsageError("matrix file line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

GeneratingMatrixSet read_matrix_set(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_line(in, line, line_no)) throw UsageError("matrix file is empty");
  long long b = 0, s = 0, n = 0, m = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> b >> s >> n >> m)) parse_error(line_no, "expected header 'b s n m'");
    std::string extra;
    if (hdr >> extra) parse_error(line_no, "trailing data after header");
  }
  if (s <= 0 || n <= 0 || m <= 0) parse_error(line_no, "s, n and m must be positive");
  require_prime_base(static_cast<int>(b));

  std::vector<DigitMatrix> mats;
  for (long long j = 0; j < s; ++j) {
    DigitMatrix mat(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
    for (long long r = 0; r < n; ++r) {
      if (!next_line(in, line, line_no)) {
        throw UsageError("matrix file ended inside matrix " + std::to_string(j + 1));
      }
      std::istringstream row(line);
      for (long long c = 0; c < m; ++c) {
        long long v = -1;
        if (!(row >> v)) parse_error(line_no, "expected " + std::to_string(m) + " digits");
        if (v < 0 || v >= b) parse_error(line_no, "digit " + std::to_string(v) + " outside [0, b)");
        mat(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = static_cast<Digit>(v);
      }
      std::string extra;
      if (row >> extra) parse_error(line_no, "too many digits in row");
    }
    mats.push_back(std::move(mat));
  }
  if (next_line(in, line, line_no)) parse_error(line_no, "unexpected data after the last matrix");
  return GeneratingMatrixSet(static_cast<int>(b), std::move(mats), Provenance{});
}

GeneratingMatrixSet read_matrix_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open matrix file '" + path + "'");
  return read_matrix_set(in);
}

void write_matrix_set(std::ostream& out, const GeneratingMatrixSet& set) {
  const auto& prov = set.provenance();
  out << "# construction=" << to_string(prov.construction) << " d=" << prov.interlace_factor;
  if (prov.t_claimed) out << " t=" << *prov.t_claimed;
  out << '\n';
  out << set.base() << ' ' << set.dims() << ' ' << set.rows() << ' ' << set.cols() << '\n';
  for (std::size_t j = 0; j < set.dims(); ++j) {
    out << "# C_" << (j + 1) << '\n';
    const auto& mat = set.matrix(j);
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      for (std::size_t c = 0; c < mat.cols(); ++c) {
        if (c) out << ' ';
        out << static_cast<int>(mat(r, c));
      }
      out << '\n';
    }
  }
}

}  // namespace hoqmc
