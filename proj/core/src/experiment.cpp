#include "hoqmc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hoqmc/errors.hpp"
#include "hoqmc/point_engine.hpp"
#include "hoqmc/sobolev.hpp"
#include "json.hpp"

namespace hoqmc {

using nlohmann::json;

int ExperimentConfig::effective_order() const {
  if (construction == Construction::niederreiter) return 1;
  return order.value_or(2 * alpha + 1);
}

void ExperimentConfig::validate() const {
  require_prime_base(base);
  if (alpha < 1) throw UsageError("alpha must be >= 1");
  if (dims < 1) throw UsageError("dims must be >= 1");
  if (m_min < 1) throw UsageError("m_min must be >= 1");
  if (m_min > m_max) {
    throw UsageError("m_min (" + std::to_string(m_min) + ") exceeds m_max (" + std::to_string(m_max) + ")");
  }
  if (construction == Construction::explicit_matrices) {
    throw UsageError("convergence experiments need a built-in construction");
  }
  if (construction == Construction::niederreiter && order && *order != 1) {
    throw UsageError("the niederreiter construction has order 1; use interlaced-niederreiter for order " +
                     std::to_string(*order));
  }
  if (effective_order() < 1) throw UsageError("order must be >= 1");
  if (threads < 1) throw UsageError("threads must be >= 1");
  if (work_limit < 1) throw UsageError("work_limit must be >= 1");
}

namespace {

template <typename T>
T unsigned_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) throw UsageError(std::string("config field '") + key + "' must be a nonnegative integer");
  return v.get<T>();
}

int int_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw UsageError(std::string("config field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string string_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw UsageError(std::string("config field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "base") {
      cfg.base = int_field(j, "base");
    } else if (key == "alpha") {
      cfg.alpha = int_field(j, "alpha");
    } else if (key == "order") {
      if (!value.is_null()) cfg.order = int_field(j, "order");
    } else if (key == "dims") {
      cfg.dims = unsigned_field<std::size_t>(j, "dims");
    } else if (key == "m_min") {
      cfg.m_min = unsigned_field<std::size_t>(j, "m_min");
    } else if (key == "m_max") {
      cfg.m_max = unsigned_field<std::size_t>(j, "m_max");
    } else if (key == "construction") {
      cfg.construction = construction_from_string(string_field(j, "construction"));
    } else if (key == "output") {
      cfg.output = string_field(j, "output");
    } else if (key == "work_limit") {
      cfg.work_limit = unsigned_field<std::uint64_t>(j, "work_limit");
    } else if (key == "threads") {
      cfg.threads = unsigned_field<unsigned>(j, "threads");
    } else if (key == "slope_from") {
      cfg.slope_from = unsigned_field<std::size_t>(j, "slope_from");
    } else {
      throw UsageError("unknown config field '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  // nlohmann::json objects keep keys sorted, which fixes the output order.
  json j = {
      {"base", cfg.base},
      {"alpha", cfg.alpha},
      {"order", cfg.effective_order()},
      {"dims", cfg.dims},
      {"m_min", cfg.m_min},
      {"m_max", cfg.m_max},
      {"construction", to_string(cfg.construction)},
      {"output", cfg.output},
      {"work_limit", cfg.work_limit},
      {"threads", cfg.threads},
      {"slope_from", cfg.slope_from},
  };
  return j.dump();
}

GeneratingMatrixSet experiment_matrices(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.construction == Construction::niederreiter) {
    return niederreiter_set(cfg.base, cfg.dims, cfg.m_max, cfg.m_max);
  }
  return interlaced_niederreiter(cfg.base, cfg.effective_order(), cfg.dims, cfg.m_max);
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  for (std::size_t m = cfg.m_min; m <= cfg.m_max; ++m) {
    const double N = std::pow(static_cast<double>(cfg.base), static_cast<double>(m));
    const double evals = N * N * static_cast<double>(cfg.dims);
    if (evals > static_cast<double>(cfg.work_limit)) {
      throw ResourceError("m = " + std::to_string(m) + " needs " + std::to_string(static_cast<std::uint64_t>(evals)) +
                          " kernel evaluations, over the work limit of " + std::to_string(cfg.work_limit));
    }
  }

  const auto M = experiment_matrices(cfg);
  const KernelSpec spec{cfg.alpha, cfg.dims};
  const double logb = std::log(static_cast<double>(cfg.base));
  std::vector<ConvergenceRow> rows;
  for (std::size_t m = cfg.m_min; m <= cfg.m_max; ++m) {
    const auto points = net_points(M, m, cfg.threads);
    ConvergenceRow row;
    row.m = m;
    row.N = ipow(cfg.base, static_cast<int>(m));
    row.e = wce(spec, points, cfg.threads);
    row.log_b_e = std::log(row.e) / logb;
    const double scale = std::pow(static_cast<double>(cfg.base), static_cast<double>(cfg.alpha * m));
    const double logfactor = std::pow(static_cast<double>(m), (static_cast<double>(cfg.dims) - 1.0) / 2.0);
    row.normalized = row.e * scale / logfactor;
    rows.push_back(row);
  }
  return rows;
}

double fit_slope(const std::vector<ConvergenceRow>& rows, std::size_t m_lo, std::size_t m_hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (r.m < m_lo || r.m > m_hi) continue;
    if (!(r.e > 0.0)) throw NumericalError("cannot fit a slope: e = 0 at m = " + std::to_string(r.m));
    xs.push_back(static_cast<double>(r.m));
    ys.push_back(r.log_b_e);
  }
  if (xs.size() < 3) throw UsageError("slope fit needs at least 3 rows in the window");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_convergence_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<ConvergenceRow>& rows) {
  out << "# hoqmc " << kVersion << " converge config=" << config_to_json(cfg) << '\n';
  out << "m,N,e,log_b_e,normalized\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.N << ',' << g17(r.e) << ',' << g17(r.log_b_e) << ',' << g17(r.normalized) << '\n';
  }
}

}  // namespace hoqmc
