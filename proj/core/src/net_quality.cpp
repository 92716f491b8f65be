#include "hoqmc/net_quality.hpp"

#include <algorithm>

#include "hoqmc/errors.hpp"

namespace hoqmc {

std::vector<DigitTerm> digit_terms(std::uint64_t k, int b) {
  const auto digits = to_digits(k, b);
  std::vector<DigitTerm> out;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] != 0) out.push_back({digits[i], static_cast<int>(i) + 1});
  }
  return out;
}

DualIndex::DualIndex(std::vector<std::uint64_t> components, int base)
    : base_(base), components_(std::move(components)) {
  require_prime_base(base);
  terms_.reserve(components_.size());
  for (auto k : components_) terms_.push_back(digit_terms(k, base));
}

bool DualIndex::is_zero() const {
  return std::all_of(components_.begin(), components_.end(), [](std::uint64_t k) { return k == 0; });
}

namespace {

int mu_terms(int alpha, const std::vector<DigitTerm>& terms) {
  int sum = 0;
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(std::max(alpha, 0)), terms.size());
  for (std::size_t i = 0; i < top; ++i) sum += terms[i].c;
  return sum;
}

// Per-dimension syndromes C_j^T vec(k) for all k < b^zmax, flattened with
// `width` digits per entry.
struct SyndromeTable {
  std::size_t width = 0;
  std::vector<Digit> data;

  std::span<const Digit> at(std::uint64_t k) const { return {data.data() + k * width, width}; }
};

SyndromeTable build_syndromes(const DigitMatrix& C, int b, int zmax) {
  SyndromeTable t;
  t.width = C.cols();
  const std::uint64_t count = ipow(b, zmax);
  t.data.assign(count * t.width, 0);
  const auto ub = static_cast<std::uint64_t>(b);
  std::uint64_t lead = 1;  // b^(c-1) for the current digit count c
  int c = 1;
  for (std::uint64_t k = 1; k < count; ++k) {
    if (k >= lead * ub) {
      lead *= ub;
      ++c;
    }
    const auto kappa = static_cast<unsigned>(k / lead);
    const std::uint64_t rest = k - kappa * lead;
    Digit* dst = t.data.data() + k * t.width;
    const Digit* src = t.data.data() + rest * t.width;
    if (static_cast<std::size_t>(c) <= C.rows()) {
      const auto row = C.row(static_cast<std::size_t>(c) - 1);
      for (std::size_t l = 0; l < t.width; ++l) {
        dst[l] = static_cast<Digit>((src[l] + kappa * row[l]) % static_cast<unsigned>(b));
      }
    } else {
      std::copy(src, src + t.width, dst);
    }
  }
  return t;
}

class ShellEnumerator {
 public:
  ShellEnumerator(const GeneratingMatrixSet& M, int zmax, std::uint64_t limit, std::uint64_t& work)
      : M_(M), b_(M.base()), limit_(limit), work_(work) {
    if (ipow(b_, zmax) > limit_) throw_limit();
    for (std::size_t j = 0; j < M.dims(); ++j) tables_.push_back(build_syndromes(M.matrix(j), b_, zmax));
  }

  std::vector<std::vector<std::uint64_t>> shell(int z) {
    out_.clear();
    k_.assign(M_.dims(), 0);
    std::vector<int> acc(M_.cols(), 0);
    recurse(0, z, acc);
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  [[noreturn]] void throw_limit() const {
    throw ResourceError("dual enumeration exceeded the work limit of " + std::to_string(limit_) +
                        " candidate indices");
  }

  void recurse(std::size_t j, int remaining, std::vector<int>& acc) {
    const std::size_t s = M_.dims();
    const auto ub = static_cast<std::uint64_t>(b_);
    const bool last = (j + 1 == s);
    const int zlo = last ? remaining : 0;
    for (int zj = zlo; zj <= remaining; ++zj) {
      const std::uint64_t lo = zj == 0 ? 0 : ipow(b_, zj - 1);
      const std::uint64_t hi = zj == 0 ? 1 : lo * ub;
      for (std::uint64_t k = lo; k < hi; ++k) {
        const auto syn = tables_[j].at(k);
        k_[j] = k;
        if (last) {
          if (++work_ > limit_) throw_limit();
          if (remaining == 0 && std::all_of(k_.begin(), k_.end(), [](auto v) { return v == 0; })) continue;
          bool zero = true;
          for (std::size_t l = 0; l < acc.size() && zero; ++l) zero = (acc[l] + syn[l]) % b_ == 0;
          if (zero) out_.push_back(k_);
        } else {
          for (std::size_t l = 0; l < acc.size(); ++l) acc[l] += syn[l];
          recurse(j + 1, remaining - zj, acc);
          for (std::size_t l = 0; l < acc.size(); ++l) acc[l] -= syn[l];
        }
      }
    }
    k_[j] = 0;
  }

  const GeneratingMatrixSet& M_;
  int b_;
  std::uint64_t limit_;
  std::uint64_t& work_;
  std::vector<SyndromeTable> tables_;
  std::vector<std::uint64_t> k_;
  std::vector<std::vector<std::uint64_t>> out_;
};

}  // namespace

int mu(int alpha, std::uint64_t k, int b) { return mu_terms(alpha, digit_terms(k, b)); }

int mu(int alpha, const DualIndex& k) {
  int sum = 0;
  for (std::size_t j = 0; j < k.dims(); ++j) sum += mu_terms(alpha, k.terms(j));
  return sum;
}

std::vector<DualIndex> dual_shell(const GeneratingMatrixSet& M, int shell, std::uint64_t work_limit,
                                  std::uint64_t& work) {
  if (shell < 1) return {};
  ShellEnumerator en(M, shell, work_limit, work);
  std::vector<DualIndex> out;
  for (auto& k : en.shell(shell)) out.emplace_back(std::move(k), M.base());
  return out;
}

std::vector<DualIndex> dual_enumerate(const GeneratingMatrixSet& M, int mu1_max, std::uint64_t work_limit) {
  if (mu1_max < 1) return {};
  std::uint64_t work = 0;
  ShellEnumerator en(M, mu1_max, work_limit, work);
  std::vector<DualIndex> out;
  for (int z = 1; z <= mu1_max; ++z) {
    for (auto& k : en.shell(z)) out.emplace_back(std::move(k), M.base());
  }
  return out;
}

RhoResult rho_min(const GeneratingMatrixSet& M, int alpha, int search_cap, std::uint64_t work_limit) {
  if (alpha < 1) throw UsageError("rho_min: alpha must be >= 1");
  RhoResult res;
  if (search_cap < 1) return res;
  std::uint64_t work = 0;
  ShellEnumerator en(M, search_cap, work_limit, work);
  for (int z = 1; z <= search_cap; ++z) {
    res.shells_searched = z;
    for (auto& k : en.shell(z)) {
      DualIndex idx(std::move(k), M.base());
      const int v = mu(alpha, idx);
      if (!res.value || v < *res.value) {
        res.value = v;
        res.argmin = std::move(idx);
      }
    }
    if (res.value && *res.value <= z + 1) {
      res.proven_minimal = true;
      break;
    }
  }
  return res;
}

namespace {

// Rank test over F_b; rows are copied.
bool rows_independent(std::vector<std::vector<int>> rows, int b) {
  if (rows.empty()) return true;
  const std::size_t width = rows.front().size();
  if (rows.size() > width) return false;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < width && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    const int inv = field_inverse(rows[rank][col], b);
    for (auto& v : rows[rank]) v = v * inv % b;
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const int f = rows[r][col];
      if (f == 0) continue;
      for (std::size_t c = col; c < width; ++c) rows[r][c] = ((rows[r][c] - f * rows[rank][c]) % b + b) % b;
    }
    ++rank;
  }
  return rank == rows.size();
}

struct TopSet {
  std::vector<int> top;  // descending
  int weight = 0;
};

// All sets of at most alpha distinct rows from 1..n with weight <= budget,
// ordered by size, then descending-lexicographically on the sorted rows.
std::vector<TopSet> top_sets(int alpha, int n, int budget) {
  std::vector<TopSet> out;
  out.push_back({});
  for (int size = 1; size <= alpha; ++size) {
    std::vector<int> cur;
    auto rec = [&](auto&& self, int below, int weight) -> void {
      if (static_cast<int>(cur.size()) == size) {
        out.push_back({cur, weight});
        return;
      }
      const int left = size - static_cast<int>(cur.size());
      for (int r = std::min(below - 1, n); r >= left; --r) {
        if (weight + r > budget) continue;
        cur.push_back(r);
        self(self, r, weight + r);
        cur.pop_back();
      }
    };
    rec(rec, n + 1, 0);
  }
  return out;
}

}  // namespace

NetCertificate certify_order_t(const GeneratingMatrixSet& M, int alpha, std::size_t m, std::size_t s, int t,
                               std::uint64_t work_limit) {
  if (alpha < 1) throw UsageError("certify_order_t: alpha must be >= 1");
  if (t < 0) throw UsageError("certify_order_t: t must be >= 0");
  if (s == 0 || s > M.dims()) throw UsageError("certify_order_t: s out of range for the matrix set");
  if (m == 0 || m > M.cols()) throw UsageError("certify_order_t: m out of range for the matrix set");

  NetCertificate cert;
  cert.b = M.base();
  cert.m = m;
  cert.s = s;
  cert.alpha = alpha;
  cert.t = t;
  const long long budget_ll = static_cast<long long>(alpha) * static_cast<long long>(m) - t;
  if (budget_ll < 1) return cert;  // only the empty selection is admissible
  const int budget = static_cast<int>(budget_ll);
  const int n = static_cast<int>(M.rows());
  const int b = M.base();

  const auto options = top_sets(alpha, n, budget);
  std::vector<std::size_t> choice(s, 0);

  auto canonical_rows = [&](const TopSet& ts) {
    std::vector<int> rows = ts.top;
    if (static_cast<int>(ts.top.size()) == alpha) {
      for (int r = ts.top.back() - 1; r >= 1; --r) rows.push_back(r);
    }
    return rows;
  };

  bool done = false;
  auto rec = [&](auto&& self, std::size_t j, int weight, bool any) -> void {
    if (done) return;
    if (j == s) {
      if (!any) return;
      if (++cert.selections_checked > work_limit) {
        throw ResourceError("net certification exceeded the work limit of " + std::to_string(work_limit) +
                            " row selections");
      }
      std::vector<std::vector<int>> sel(s);
      std::vector<std::vector<int>> rows;
      for (std::size_t d = 0; d < s; ++d) {
        sel[d] = canonical_rows(options[choice[d]]);
        for (int r : sel[d]) {
          const auto src = M.matrix(d).row(static_cast<std::size_t>(r) - 1);
          rows.emplace_back(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(m));
        }
      }
      if (!rows_independent(std::move(rows), b)) {
        cert.verdict = Verdict::refuted;
        cert.witness = std::move(sel);
        done = true;
      }
      return;
    }
    for (std::size_t o = 0; o < options.size() && !done; ++o) {
      if (weight + options[o].weight > budget) continue;
      choice[j] = o;
      self(self, j + 1, weight + options[o].weight, any || !options[o].top.empty());
    }
  };
  rec(rec, 0, 0, false);
  return cert;
}

NetCertificate propagation_check(const GeneratingMatrixSet& M, int alpha, int alpha_prime, std::size_t m,
                                 std::size_t s, int t, std::uint64_t work_limit) {
  if (alpha_prime < 1 || alpha_prime >= alpha) {
    throw UsageError("propagation_check requires 1 <= alpha' < alpha");
  }
  const int t_prime = (t * alpha_prime + alpha - 1) / alpha;
  return certify_order_t(M, alpha_prime, m, s, t_prime, work_limit);
}

mpq_class interpolation_gap(int alpha, const DualIndex& k) {
  if (alpha < 2) throw UsageError("interpolation_gap requires alpha >= 2");
  mpq_class A(mpz_class(alpha - 1), mpz_class(2 * alpha));
  mpq_class B(mpz_class(alpha + 1), mpz_class(2 * alpha));
  A.canonicalize();
  B.canonicalize();
  mpq_class gap = mpq_class(mu(alpha, k)) - A * mu(2 * alpha + 1, k) - B * mu(1, k);
  gap.canonicalize();
  return gap;
}

}  // namespace hoqmc
