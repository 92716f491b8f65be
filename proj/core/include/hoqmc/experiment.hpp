#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoqmc/generator_matrices.hpp"
#include "hoqmc/net_quality.hpp"

namespace hoqmc {

// One convergence experiment. Defaults: b = 2, alpha = 1, order 2*alpha + 1
// (1 for plain Niederreiter), s = 1, m = 1..8, interlaced Niederreiter.
// work_limit caps the kernel evaluations N^2 * s of the largest m.
struct ExperimentConfig {
  int base = 2;
  int alpha = 1;
  std::optional<int> order;
  std::size_t dims = 1;
  std::size_t m_min = 1;
  std::size_t m_max = 8;
  Construction construction = Construction::interlaced_niederreiter;
  std::string output;
  std::uint64_t work_limit = kDefaultWorkLimit;
  unsigned threads = 1;
  std::size_t slope_from = 4;

  int effective_order() const;
  void validate() const;
};

// Strict JSON parsing: unknown fields and ill-typed values raise UsageError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
// Compact JSON with every field spelled out (order resolved), keys sorted.
std::string config_to_json(const ExperimentConfig& cfg);

struct ConvergenceRow {
  std::size_t m = 0;
  std::uint64_t N = 0;
  double e = 0.0;
  double log_b_e = 0.0;
  double normalized = 0.0;  // e * b^(alpha m) / m^((s-1)/2)
};

// Matrices the experiment draws its points from, sized for m_max.
GeneratingMatrixSet experiment_matrices(const ExperimentConfig& cfg);

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg);

// Least-squares slope of log_b e against m over rows with m in [m_lo, m_hi].
double fit_slope(const std::vector<ConvergenceRow>& rows, std::size_t m_lo, std::size_t m_hi);

void write_convergence_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<ConvergenceRow>& rows);

}  // namespace hoqmc
