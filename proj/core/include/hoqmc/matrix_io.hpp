#pragma once

#include <iosfwd>
#include <string>

#include "hoqmc/generator_matrices.hpp"

namespace hoqmc {

// Text format:
//   b s n m
//   then s blocks of n lines, each with m space-separated digits in [0, b).
// Lines starting with '#' and blank lines are ignored. Matrices read back
// carry `explicit` provenance.
GeneratingMatrixSet read_matrix_set(std::istream& in);
GeneratingMatrixSet read_matrix_set_file(const std::string& path);

void write_matrix_set(std::ostream& out, const GeneratingMatrixSet& set);

}  // namespace hoqmc
