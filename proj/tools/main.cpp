#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hoqmc/errors.hpp"
#include "hoqmc/experiment.hpp"
#include "hoqmc/generator_matrices.hpp"
#include "hoqmc/matrix_io.hpp"
#include "hoqmc/net_quality.hpp"
#include "hoqmc/point_engine.hpp"
#include "hoqmc/sobolev.hpp"
#include "hoqmc/walsh.hpp"
#include "json.hpp"

using namespace hoqmc;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kResource = 3, kNumerical = 4 };

struct Options {
  int base = 2;
  int alpha = 1;
  int order = 0;
  std::size_t dims = 1;
  std::size_t m = 0;
  std::string m_range;
  std::string config;
  std::string out;
  unsigned threads = 1;
  std::uint64_t work_limit = kDefaultWorkLimit;
  std::string matrices;
  std::string construction;
  std::string format = "csv";

  // verify
  std::optional<int> t;
  std::optional<int> rho_cap;
  // dual
  int mu1_max = -1;
  // walsh
  int levels = 3;
};

class Timer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--m-range expects lo:hi, got '" + text + "'");
  try {
    std::size_t used = 0;
    const auto lo = std::stoul(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("lo");
    const std::string rest = text.substr(colon + 1);
    const auto hi = std::stoul(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--m-range expects lo:hi, got '" + text + "'");
  }
}

// Resolves config file, then explicitly given flags on top of it.
ExperimentConfig resolve_config(const Options& o, const CLI::App& cmd) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--base")) cfg.base = o.base;
  if (given("--alpha")) cfg.alpha = o.alpha;
  if (given("--order")) cfg.order = o.order;
  if (given("--dims")) cfg.dims = o.dims;
  if (given("--construction")) cfg.construction = construction_from_string(o.construction);
  if (given("--out")) cfg.output = o.out;
  if (given("--threads")) cfg.threads = o.threads;
  if (given("--work-limit")) cfg.work_limit = o.work_limit;
  if (given("--m")) {
    cfg.m_min = o.m;
    cfg.m_max = o.m;
  }
  if (given("--m-range")) {
    const auto [lo, hi] = parse_range(o.m_range);
    cfg.m_min = lo;
    cfg.m_max = hi;
  }
  if (given("--m") && given("--m-range")) throw UsageError("--m and --m-range are mutually exclusive");
  cfg.validate();
  return cfg;
}

json config_echo(const std::string& command, const ExperimentConfig& cfg, const Options& o) {
  json j = json::parse(config_to_json(cfg));
  j["command"] = command;
  if (!o.matrices.empty()) j["matrices"] = o.matrices;
  return j;
}

// Matrices for m columns: an explicit file or the configured construction.
GeneratingMatrixSet load_matrices(const ExperimentConfig& cfg, const Options& o, const CLI::App& cmd,
                                  std::size_t m) {
  if (o.matrices.empty()) {
    ExperimentConfig sized = cfg;
    sized.m_max = std::max(m, cfg.m_min);
    return experiment_matrices(sized);
  }
  auto M = read_matrix_set_file(o.matrices);
  if (cmd.count("--base") && M.base() != cfg.base) {
    throw UsageError("--base " + std::to_string(cfg.base) + " does not match the matrix file base " +
                     std::to_string(M.base()));
  }
  if (cmd.count("--dims")) {
    if (cfg.dims > M.dims()) throw UsageError("--dims exceeds the dimensions in the matrix file");
    M = M.project(cfg.dims);
  }
  if (m > M.cols()) {
    throw UsageError("m = " + std::to_string(m) + " exceeds the " + std::to_string(M.cols()) +
                     " columns in the matrix file");
  }
  return M;
}

GeneratingMatrixSet first_columns(const GeneratingMatrixSet& M, std::size_t m) {
  std::vector<DigitMatrix> mats;
  for (const auto& C : M.matrices()) mats.push_back(C.block(M.rows(), m));
  return GeneratingMatrixSet(M.base(), std::move(mats), M.provenance());
}

std::size_t single_m(const ExperimentConfig& cfg, const CLI::App& cmd) {
  if (!cmd.count("--m") && !cmd.count("--m-range") && cfg.m_min != cfg.m_max) {
    throw UsageError("this command needs --m");
  }
  if (cfg.m_min != cfg.m_max) throw UsageError("this command takes a single m");
  return cfg.m_max;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file " + path);
  out << text;
  if (!out) throw ResourceError("failed writing " + path);
}

int run_gen(const Options& o, const CLI::App& cmd) {
  const auto cfg = resolve_config(o, cmd);
  const auto m = single_m(cfg, cmd);
  const auto M = load_matrices(cfg, o, cmd, m);
  const double n = std::pow(static_cast<double>(M.base()), static_cast<double>(m));
  if (n > static_cast<double>(cfg.work_limit)) {
    throw ResourceError("b^m = " + g17(n) + " points exceed the work limit of " + std::to_string(cfg.work_limit));
  }
  const auto points = net_points(M, m, cfg.threads);
  std::ostringstream out;
  out << "# config=" << config_echo("gen", cfg, o).dump() << '\n';
  PointHeader header{M.base(), M.dims(), m, M.provenance().interlace_factor, to_string(M.provenance().construction)};
  write_points(out, points, header, point_format_from_string(o.format));
  emit(out.str(), cfg.output);
  return kOk;
}

int run_verify(const Options& o, const CLI::App& cmd) {
  const Timer timer;
  const auto cfg = resolve_config(o, cmd);
  const auto m = single_m(cfg, cmd);
  const auto M = load_matrices(cfg, o, cmd, m);
  // Certification order: --alpha when given, else the interlacing order.
  const int alpha = cmd.count("--alpha") ? cfg.alpha : M.provenance().interlace_factor;
  int t = 0;
  if (o.t) {
    t = *o.t;
  } else if (M.provenance().t_claimed) {
    t = *M.provenance().t_claimed;
  } else {
    throw UsageError("no t-value known for these matrices; pass --t");
  }
  const auto cert = certify_order_t(M, alpha, m, M.dims(), t, cfg.work_limit);
  json j;
  j["b"] = cert.b;
  j["s"] = cert.s;
  j["m"] = cert.m;
  j["alpha"] = cert.alpha;
  j["t"] = cert.t;
  j["verdict"] = cert.verdict == Verdict::certified ? "certified" : "refuted";
  if (cert.witness) j["witness"] = *cert.witness;
  if (o.rho_cap) {
    const auto rho = rho_min(first_columns(M, m), alpha, *o.rho_cap, cfg.work_limit);
    if (rho.value) {
      j["rho_alpha"] = *rho.value;
      j["rho_proven_minimal"] = rho.proven_minimal;
    } else {
      j["rho_alpha"] = nullptr;
    }
  }
  j["elapsed_ms"] = std::llround(timer.elapsed_ms());
  emit(j.dump() + "\n", cfg.output);
  return kOk;
}

int run_dual(const Options& o, const CLI::App& cmd) {
  const auto cfg = resolve_config(o, cmd);
  const auto m = single_m(cfg, cmd);
  const auto M = first_columns(load_matrices(cfg, o, cmd, m), m);
  const int mu1_max = o.mu1_max >= 0 ? o.mu1_max : static_cast<int>(m) + 1;
  const auto duals = dual_enumerate(M, mu1_max, cfg.work_limit);
  auto echo = config_echo("dual", cfg, o);
  echo["mu1_max"] = mu1_max;
  std::ostringstream out;
  out << "# hoqmc " << kVersion << " config=" << echo.dump() << '\n';
  for (std::size_t j = 0; j < M.dims(); ++j) out << 'k' << (j + 1) << ',';
  out << "mu1,mu_alpha\n";
  for (const auto& k : duals) {
    for (auto c : k.components()) out << c << ',';
    out << mu(1, k) << ',' << mu(cfg.alpha, k) << '\n';
  }
  emit(out.str(), cfg.output);
  return kOk;
}

int run_wce(const Options& o, const CLI::App& cmd) {
  const auto cfg = resolve_config(o, cmd);
  if (!cmd.count("--m") && !cmd.count("--m-range") && o.config.empty()) throw UsageError("wce needs --m or --m-range");
  const auto M = load_matrices(cfg, o, cmd, cfg.m_max);
  const KernelSpec spec{cfg.alpha, M.dims()};
  std::ostringstream out;
  out << "# hoqmc " << kVersion << " config=" << config_echo("wce", cfg, o).dump() << '\n';
  out << "b,s,alpha,order_d,m,N,e,log_b_e,elapsed_ms\n";
  for (std::size_t m = cfg.m_min; m <= cfg.m_max; ++m) {
    const double n = std::pow(static_cast<double>(M.base()), static_cast<double>(m));
    if (n * n * static_cast<double>(M.dims()) > static_cast<double>(cfg.work_limit)) {
      throw ResourceError("m = " + std::to_string(m) + " needs more kernel evaluations than the work limit of " +
                          std::to_string(cfg.work_limit));
    }
    const Timer timer;
    const auto points = net_points(M, m, cfg.threads);
    const double e = wce(spec, points, cfg.threads);
    out << M.base() << ',' << M.dims() << ',' << cfg.alpha << ',' << M.provenance().interlace_factor << ',' << m
        << ',' << ipow(M.base(), static_cast<int>(m)) << ',' << g17(e) << ','
        << g17(std::log(e) / std::log(static_cast<double>(M.base()))) << ',' << g17(timer.elapsed_ms()) << '\n';
  }
  emit(out.str(), cfg.output);
  return kOk;
}

int run_walsh(const Options& o, const CLI::App& cmd) {
  const auto cfg = resolve_config(o, cmd);
  if (o.levels < 0) throw UsageError("--levels must be >= 0");
  const double pairs = std::pow(static_cast<double>(cfg.base), 2.0 * o.levels);
  if (pairs > static_cast<double>(cfg.work_limit)) {
    throw ResourceError("a table with b^(2*levels) = " + g17(pairs) + " pairs exceeds the work limit of " +
                        std::to_string(cfg.work_limit));
  }
  const auto table = build_walsh_table(cfg.base, cfg.alpha, o.levels, cfg.threads);
  auto echo = config_echo("walsh", cfg, o);
  echo["levels"] = o.levels;
  std::ostringstream out;
  out << "# hoqmc " << kVersion << " config=" << echo.dump() << '\n';
  out << "k,l,p,q,mu1_k,mu1_l,mu_alpha_k,mu_alpha_l,re,im,is_exact_zero\n";
  const int b = cfg.base;
  for (std::uint64_t k = 0; k < table.size(); ++k) {
    for (std::uint64_t l = 0; l < table.size(); ++l) {
      const auto& v = table.value(k, l);
      const auto type = table.type(k, l);
      const auto z = v.to_complex();
      out << k << ',' << l << ',' << type.p << ',' << type.q << ',' << mu(1, k, b) << ',' << mu(1, l, b) << ','
          << mu(cfg.alpha, k, b) << ',' << mu(cfg.alpha, l, b) << ',' << g17(z.real()) << ',' << g17(z.imag()) << ','
          << (v.is_zero() ? 1 : 0) << '\n';
    }
  }
  emit(out.str(), cfg.output);
  return kOk;
}

int run_converge(const Options& o, const CLI::App& cmd) {
  const auto cfg = resolve_config(o, cmd);
  if (!o.matrices.empty()) throw UsageError("converge builds its own matrices; --matrices is not accepted");
  const auto rows = run_convergence(cfg);
  std::ostringstream out;
  write_convergence_csv(out, cfg, rows);
  emit(out.str(), cfg.output);
  std::size_t in_window = 0;
  for (const auto& r : rows) in_window += r.m >= cfg.slope_from ? 1 : 0;
  if (in_window >= 3) {
    std::cerr << "slope over m >= " << cfg.slope_from << ": " << g17(fit_slope(rows, cfg.slope_from, cfg.m_max))
              << '\n';
  }
  return kOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--base", o.base, "Prime base b");
  cmd->add_option("--alpha", o.alpha, "Smoothness alpha");
  cmd->add_option("--order", o.order, "Interlacing order d (default 2*alpha+1)");
  cmd->add_option("--dims", o.dims, "Dimension s");
  cmd->add_option("--m", o.m, "Net size exponent m");
  cmd->add_option("--m-range", o.m_range, "Range of m as lo:hi");
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--out", o.out, "Output path (default stdout)");
  cmd->add_option("--threads", o.threads, "Worker threads");
  cmd->add_option("--work-limit", o.work_limit, "Cap on enumerated work units");
  cmd->add_option("--construction", o.construction, "niederreiter | interlaced-niederreiter");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order digital nets: generation, certification and worst-case error"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Emit the points of a digital net");
  add_common(gen, o);
  gen->add_option("--matrices", o.matrices, "Generating matrix file");
  gen->add_option("--format", o.format, "csv | digits");

  auto* verify = app.add_subcommand("verify", "Certify the order-alpha t-value of a net");
  add_common(verify, o);
  verify->add_option("--matrices", o.matrices, "Generating matrix file");
  verify->add_option("--t", o.t, "t-value to certify (default: construction bound)");
  verify->add_option("--rho-cap", o.rho_cap, "Also search rho_alpha over mu_1 shells up to this cap");

  auto* dual = app.add_subcommand("dual", "Enumerate dual-net vectors");
  add_common(dual, o);
  dual->add_option("--matrices", o.matrices, "Generating matrix file");
  dual->add_option("--mu1-max", o.mu1_max, "Largest mu_1 to enumerate (default m+1)");

  auto* wce_cmd = app.add_subcommand("wce", "Worst-case error in the Sobolev space");
  add_common(wce_cmd, o);
  wce_cmd->add_option("--matrices", o.matrices, "Generating matrix file");

  auto* walsh = app.add_subcommand("walsh", "Walsh coefficients of the reproducing kernel");
  add_common(walsh, o);
  walsh->add_option("--levels", o.levels, "Table covers k, l < b^levels");

  auto* converge = app.add_subcommand("converge", "Convergence experiment over a range of m");
  add_common(converge, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return run_gen(o, *gen);
    if (*verify) return run_verify(o, *verify);
    if (*dual) return run_dual(o, *dual);
    if (*wce_cmd) return run_wce(o, *wce_cmd);
    if (*walsh) return run_walsh(o, *walsh);
    if (*converge) return run_converge(o, *converge);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
