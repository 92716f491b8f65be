#include "hoqmc/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "hoqmc/bernoulli.hpp"
#include "hoqmc/errors.hpp"
#include "hoqmc/walsh.hpp"

namespace hoqmc {

void KernelSpec::validate() const {
  if (alpha < 1) throw UsageError("kernel smoothness alpha must be >= 1");
  if (dims < 1) throw UsageError("kernel dimension must be >= 1");
}

namespace {

constexpr double kClampTolerance = 1e-9;
constexpr std::size_t kRowBlock = 32;

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> to_double(const std::vector<mpq_class>& c) {
  std::vector<double> out;
  out.reserve(c.size());
  for (const auto& v : c) out.push_back(v.get_d());
  return out;
}

// Pieces of K_alpha - 1 in double precision.
struct KernelParts {
  int alpha;
  double sign;                            // (-1)^(alpha+1)
  std::vector<std::vector<double>> low;   // B_r/r!, r = 1..alpha
  std::vector<double> high;               // B_{2alpha}/(2alpha)!

  explicit KernelParts(int a) : alpha(a), sign(a % 2 == 1 ? 1.0 : -1.0) {
    for (int r = 1; r <= a; ++r) low.push_back(to_double(scaled_bernoulli_coeffs(r)));
    high = to_double(scaled_bernoulli_coeffs(2 * a));
  }

  double centered(double x, double y) const {
    double g = 0.0;
    for (const auto& c : low) g += horner(c, x) * horner(c, y);
    return g + sign * horner(high, std::abs(x - y));
  }
};

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

void check_points(const KernelSpec& spec, std::span<const DigitPoint> points) {
  spec.validate();
  if (points.empty()) throw UsageError("worst-case error needs at least one point");
  for (const auto& p : points) {
    if (p.dims() != spec.dims) {
      throw UsageError("point dimension " + std::to_string(p.dims()) + " does not match kernel dimension " +
                       std::to_string(spec.dims));
    }
  }
}

}  // namespace

double kernel_1d(int alpha, double x, double y) {
  if (alpha < 1) throw UsageError("kernel smoothness alpha must be >= 1");
  return 1.0 + KernelParts(alpha).centered(x, y);
}

double kernel_sd(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  spec.validate();
  if (x.size() != spec.dims || y.size() != spec.dims) throw UsageError("kernel_sd: dimension mismatch");
  const KernelParts parts(spec.alpha);
  double k = 1.0;
  for (std::size_t j = 0; j < spec.dims; ++j) k *= 1.0 + parts.centered(x[j], y[j]);
  return k;
}

mpq_class kernel_1d_exact(int alpha, const mpq_class& x, const mpq_class& y) {
  if (alpha < 1) throw UsageError("kernel smoothness alpha must be >= 1");
  mpq_class k = 0;
  for (int r = 0; r <= alpha; ++r) {
    const mpq_class f(factorial(r));
    k += bernoulli_exact(r, x) * bernoulli_exact(r, y) / (f * f);
  }
  const mpq_class d = abs(x - y);
  const mpq_class tail = bernoulli_exact(2 * alpha, d) / mpq_class(factorial(2 * alpha));
  if (alpha % 2 == 1) {
    k += tail;
  } else {
    k -= tail;
  }
  return k;
}

double wce_squared(const KernelSpec& spec, std::span<const DigitPoint> points, unsigned threads) {
  check_points(spec, points);
  const std::size_t N = points.size();
  const std::size_t s = spec.dims;
  const KernelParts parts(spec.alpha);
  const auto A = static_cast<std::size_t>(spec.alpha);

  std::vector<double> x(N * s);
  std::vector<double> low(N * s * A);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t j = 0; j < s; ++j) {
      const double v = points[n].value(j);
      x[n * s + j] = v;
      for (std::size_t r = 0; r < A; ++r) low[(n * s + j) * A + r] = horner(parts.low[r], v);
    }
  }

  auto pair_term = [&](std::size_t n, std::size_t q) {
    double P = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      const double* u = &low[(n * s + j) * A];
      const double* w = &low[(q * s + j) * A];
      double g = 0.0;
      for (std::size_t r = 0; r < A; ++r) g += u[r] * w[r];
      g += parts.sign * horner(parts.high, std::abs(x[n * s + j] - x[q * s + j]));
      P = P + g + g * P;
    }
    return P;
  };

  const std::size_t nblocks = (N + kRowBlock - 1) / kRowBlock;
  std::vector<double> block_sum(nblocks, 0.0);
  auto work = [&](std::size_t tid, std::size_t nt) {
    for (std::size_t blk = tid; blk < nblocks; blk += nt) {
      Kahan acc;
      const std::size_t hi = std::min(N, (blk + 1) * kRowBlock);
      for (std::size_t n = blk * kRowBlock; n < hi; ++n) {
        acc.add(pair_term(n, n));
        for (std::size_t q = n + 1; q < N; ++q) acc.add(2.0 * pair_term(n, q));
      }
      block_sum[blk] = acc.sum;
    }
  };
  const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(threads, nblocks));
  if (nt == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
    for (auto& th : pool) th.join();
  }
  Kahan total;
  for (double v : block_sum) total.add(v);
  const double e2 = total.sum / (static_cast<double>(N) * static_cast<double>(N));
  if (e2 < 0.0) {
    if (e2 < -kClampTolerance) {
      throw NumericalError("squared worst-case error is negative beyond roundoff: " + std::to_string(e2));
    }
    return 0.0;
  }
  return e2;
}

double wce(const KernelSpec& spec, std::span<const DigitPoint> points, unsigned threads) {
  return std::sqrt(wce_squared(spec, points, threads));
}

mpq_class wce_squared_exact(const KernelSpec& spec, std::span<const DigitPoint> points) {
  check_points(spec, points);
  if (points.size() > 64 || spec.dims > 2) {
    throw UsageError("exact worst-case error is limited to N <= 64 and s <= 2");
  }
  const std::size_t N = points.size();
  const std::size_t s = spec.dims;
  std::vector<mpq_class> x(N * s);
  for (std::size_t n = 0; n < N; ++n) {
    const auto& p = points[n];
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p.base()), static_cast<unsigned long>(p.prec()));
    for (std::size_t j = 0; j < s; ++j) {
      mpz_class num = 0;
      for (auto d : p.coord(j)) num = num * p.base() + d;
      x[n * s + j] = mpq_class(num, den);
      x[n * s + j].canonicalize();
    }
  }
  mpq_class sum = 0;
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t q = 0; q < N; ++q) {
      mpq_class k = 1;
      for (std::size_t j = 0; j < s; ++j) k *= kernel_1d_exact(spec.alpha, x[n * s + j], x[q * s + j]);
      sum += k;
    }
  }
  mpq_class e2 = sum / (mpq_class(static_cast<unsigned long>(N)) * static_cast<unsigned long>(N)) - 1;
  e2.canonicalize();
  if (sgn(e2) < 0) throw NumericalError("exact squared worst-case error is negative");
  return e2;
}

std::vector<DualTruncation> wce_dual_truncated_series(const KernelSpec& spec, const GeneratingMatrixSet& M,
                                                      std::size_t m, int max_cutoff, std::uint64_t work_limit,
                                                      unsigned threads) {
  spec.validate();
  if (M.dims() < spec.dims) throw UsageError("matrix set has fewer dimensions than the kernel");
  if (m == 0 || m > M.cols()) throw UsageError("wce_dual_truncated: m out of range for the matrix set");
  if (max_cutoff < 0) throw UsageError("wce_dual_truncated: cutoff must be >= 0");
  const int b = M.base();
  const std::size_t s = spec.dims;

  std::vector<DigitMatrix> mats;
  for (std::size_t j = 0; j < s; ++j) mats.push_back(M.matrix(j).block(M.rows(), m));
  const GeneratingMatrixSet net(b, std::move(mats), Provenance{});
  const auto duals = dual_enumerate(net, max_cutoff, work_limit);
  const std::size_t D = duals.size();
  if (static_cast<double>(D) * static_cast<double>(D) > static_cast<double>(work_limit)) {
    throw ResourceError("dual truncation needs " + std::to_string(D) + "^2 coefficient pairs, over the work limit of " +
                        std::to_string(work_limit));
  }

  // Per-coordinate coefficient tables over the component values that occur.
  std::vector<std::vector<std::uint64_t>> values(s);
  std::vector<std::map<std::uint64_t, std::size_t>> where(s);
  for (const auto& k : duals) {
    for (std::size_t j = 0; j < s; ++j) where[j].emplace(k.component(j), 0);
  }
  std::vector<std::vector<Cyclotomic>> tables(s);
  for (std::size_t j = 0; j < s; ++j) {
    for (auto& [v, pos] : where[j]) {
      pos = values[j].size();
      values[j].push_back(v);
    }
    tables[j] = khat_batch(b, spec.alpha, values[j], values[j], threads);
  }

  std::vector<Cyclotomic> bins(static_cast<std::size_t>(max_cutoff) + 1, Cyclotomic(b));
  std::vector<std::size_t> count(static_cast<std::size_t>(max_cutoff) + 1, 0);
  std::vector<int> mu1(D);
  std::vector<std::vector<std::size_t>> idx(D, std::vector<std::size_t>(s));
  for (std::size_t a = 0; a < D; ++a) {
    mu1[a] = mu(1, duals[a]);
    count[static_cast<std::size_t>(mu1[a])]++;
    for (std::size_t j = 0; j < s; ++j) idx[a][j] = where[j].at(duals[a].component(j));
  }
  for (std::size_t a = 0; a < D; ++a) {
    for (std::size_t c = 0; c < D; ++c) {
      const auto bin = static_cast<std::size_t>(std::max(mu1[a], mu1[c]));
      Cyclotomic v = tables[0][idx[a][0] * values[0].size() + idx[c][0]];
      for (std::size_t j = 1; j < s && !v.is_zero(); ++j) {
        v = v * tables[j][idx[a][j] * values[j].size() + idx[c][j]];
      }
      if (!v.is_zero()) bins[bin] += v;
    }
  }

  std::vector<DualTruncation> out;
  Cyclotomic running(b);
  std::size_t dual_count = 0;
  for (int c = 0; c <= max_cutoff; ++c) {
    running += bins[static_cast<std::size_t>(c)];
    dual_count += count[static_cast<std::size_t>(c)];
    if (!(running == running.conj())) {
      throw NumericalError("truncated dual sum has a nonzero imaginary part at cutoff " + std::to_string(c));
    }
    out.push_back({c, dual_count, running, running.to_complex().real()});
  }
  return out;
}

DualTruncation wce_dual_truncated(const KernelSpec& spec, const GeneratingMatrixSet& M, std::size_t m, int cutoff,
                                  std::uint64_t work_limit, unsigned threads) {
  return wce_dual_truncated_series(spec, M, m, cutoff, work_limit, threads).back();
}

}  // namespace hoqmc
