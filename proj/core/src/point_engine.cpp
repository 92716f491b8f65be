#include "hoqmc/point_engine.hpp"

#include <gmpxx.h>

#include <cmath>
#include <ostream>
#include <thread>

#include "hoqmc/errors.hpp"

namespace hoqmc {

DigitPoint::DigitPoint(int base, std::size_t dims, std::size_t prec)
    : base_(base), dims_(dims), prec_(prec), digits_(dims * prec, 0) {
  require_prime_base(base);
}

DigitPoint::DigitPoint(int base, std::size_t prec, std::vector<std::vector<Digit>> coords)
    : DigitPoint(base, coords.size(), prec) {
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (coords[j].size() != prec) throw UsageError("coordinate digit vectors must all have length prec");
    for (std::size_t i = 0; i < prec; ++i) {
      if (coords[j][i] >= base) throw UsageError("digit out of range for base " + std::to_string(base));
      digits_[j * prec + i] = coords[j][i];
    }
  }
}

double DigitPoint::value(std::size_t j) const {
  const auto c = coord(j);
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = (v + *it) / base_;
  return v;
}

std::uint64_t DigitPoint::numerator(std::size_t j) const {
  (void)ipow(base_, static_cast<int>(prec_));  // overflow check
  std::uint64_t a = 0;
  for (auto d : coord(j)) a = a * static_cast<std::uint64_t>(base_) + d;
  return a;
}

namespace {

void fill_point(const GeneratingMatrixSet& M, std::span<const Digit> eta, DigitPoint& out) {
  const int b = M.base();
  for (std::size_t j = 0; j < M.dims(); ++j) {
    const auto& C = M.matrix(j);
    auto xi = out.coord(j);
    for (std::size_t r = 0; r < C.rows(); ++r) {
      const auto row = C.row(r);
      unsigned acc = 0;
      for (std::size_t l = 0; l < eta.size(); ++l) acc += static_cast<unsigned>(row[l]) * eta[l];
      xi[r] = static_cast<Digit>(acc % static_cast<unsigned>(b));
    }
  }
}

}  // namespace

DigitPoint digital_point(const GeneratingMatrixSet& M, std::uint64_t h) {
  const int b = M.base();
  const auto cols = M.cols();
  const auto eta = to_digits(h, b);
  if (eta.size() > cols) {
    throw UsageError("point index " + std::to_string(h) + " needs more than the " + std::to_string(cols) +
                     " available columns");
  }
  DigitPoint out(b, M.dims(), M.rows());
  fill_point(M, eta, out);
  return out;
}

std::vector<DigitPoint> net_points(const GeneratingMatrixSet& M, std::size_t m, unsigned threads) {
  if (m > M.cols()) {
    throw UsageError("net_points: m=" + std::to_string(m) + " exceeds the " + std::to_string(M.cols()) +
                     " available columns");
  }
  const int b = M.base();
  const std::uint64_t N = ipow(b, static_cast<int>(m));
  std::vector<DigitPoint> pts(N, DigitPoint(b, M.dims(), M.rows()));

  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t h = lo; h < hi; ++h) fill_point(M, to_digits(h, b, m), pts[h]);
  };
  const std::uint64_t nt = std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, N));
  if (nt == 1) {
    work(0, N);
    return pts;
  }
  std::vector<std::thread> pool;
  for (std::uint64_t t = 0; t < nt; ++t) pool.emplace_back(work, N * t / nt, N * (t + 1) / nt);
  for (auto& th : pool) th.join();
  return pts;
}

std::vector<Digit> interlace_point(std::span<const std::vector<Digit>> xs) {
  if (xs.empty()) throw UsageError("interlace_point needs at least one input");
  const std::size_t d = xs.size();
  const std::size_t prec = xs.front().size();
  for (const auto& x : xs) {
    if (x.size() != prec) throw UsageError("interlace_point: inputs have different precisions");
  }
  std::vector<Digit> out(d * prec);
  for (std::size_t i = 0; i < prec; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[d * i + j] = xs[j][i];
  }
  return out;
}

DigitPoint interlace_point(const DigitPoint& x, int d) {
  if (d < 1) throw UsageError("interlacing order must be >= 1");
  const auto ud = static_cast<std::size_t>(d);
  if (x.dims() % ud != 0) {
    throw UsageError("point dimension " + std::to_string(x.dims()) + " is not a multiple of d=" +
                     std::to_string(d));
  }
  const std::size_t s = x.dims() / ud;
  DigitPoint out(x.base(), s, ud * x.prec());
  for (std::size_t j = 0; j < s; ++j) {
    auto dst = out.coord(j);
    for (std::size_t i = 0; i < x.prec(); ++i) {
      for (std::size_t c = 0; c < ud; ++c) dst[ud * i + c] = x.coord(ud * j + c)[i];
    }
  }
  return out;
}

PointFormat point_format_from_string(const std::string& s) {
  if (s == "csv") return PointFormat::csv;
  if (s == "digits") return PointFormat::digits;
  throw UsageError("unknown point format '" + s + "' (expected csv or digits)");
}

std::size_t csv_decimals(int base, std::size_t prec) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(prec) * std::log10(base))) + 2;
}

std::string format_coordinate(std::span<const Digit> digits, int base, std::size_t decimals) {
  mpz_class num = 0;
  mpz_class den = 1;
  for (auto d : digits) {
    num = num * base + d;
    den *= base;
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, decimals);
  const mpz_class q = (2 * num * scale + den) / (2 * den);
  const mpz_class ip = q / scale;
  std::string frac = mpz_class(q % scale).get_str();
  if (frac.size() < decimals) frac.insert(0, decimals - frac.size(), '0');
  std::string out = ip.get_str();
  if (decimals > 0) out += "." + frac;
  return out;
}

namespace {
// Covers every digit of a prime base <= 61.
constexpr char kDigitChars[] = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
}  // namespace

void write_points(std::ostream& out, std::span<const DigitPoint> points, const PointHeader& header,
                  PointFormat format) {
  out << "# hoqmc " << kVersion << " b=" << header.base << " s=" << header.dims << " m=" << header.m
      << " d=" << header.order << " construction=" << header.construction << '\n';
  for (const auto& p : points) {
    const std::size_t decimals = csv_decimals(p.base(), p.prec());
    for (std::size_t j = 0; j < p.dims(); ++j) {
      if (format == PointFormat::csv) {
        if (j) out << ',';
        out << format_coordinate(p.coord(j), p.base(), decimals);
      } else {
        if (j) out << '|';
        for (auto d : p.coord(j)) out << kDigitChars[d];
      }
    }
    out << '\n';
  }
}

}  // namespace hoqmc
