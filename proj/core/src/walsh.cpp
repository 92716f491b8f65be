#include "hoqmc/walsh.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hoqmc/bernoulli.hpp"
#include "hoqmc/errors.hpp"
#include "hoqmc/net_quality.hpp"

namespace hoqmc {

int walsh_exponent(int b, std::uint64_t k, std::span<const Digit> x) {
  const auto ub = static_cast<std::uint64_t>(b);
  int e = 0;
  for (std::size_t i = 0; k != 0 && i < x.size(); ++i, k /= ub) {
    e = (e + static_cast<int>(k % ub) * x[i]) % b;
  }
  return e;
}

int walsh_exponent(std::span<const std::uint64_t> k, const DigitPoint& x) {
  if (k.size() != x.dims()) throw UsageError("walsh_exponent: index and point dimensions differ");
  int e = 0;
  for (std::size_t j = 0; j < k.size(); ++j) e = (e + walsh_exponent(x.base(), k[j], x.coord(j))) % x.base();
  return e;
}

WalshPairType classify_type(int b, std::uint64_t k, std::uint64_t l) {
  if (k == l) return {0, 0};
  const auto tk = digit_terms(k, b);
  const auto tl = digit_terms(l, b);
  std::size_t common = 0;
  while (common < tk.size() && common < tl.size() &&
         tk[tk.size() - 1 - common] == tl[tl.size() - 1 - common]) {
    ++common;
  }
  return {static_cast<int>(tk.size() - common), static_cast<int>(tl.size() - common)};
}

namespace {

using CVec = std::vector<Cyclotomic>;

int num_digits(std::uint64_t k, int b) {
  int c = 0;
  for (; k != 0; k /= static_cast<std::uint64_t>(b)) ++c;
  return c;
}

int mod_b(int j, int b) {
  j %= b;
  return j < 0 ? j + b : j;
}

// Self-similarity of Walsh functions on the b sub-intervals [tau/b, (tau+1)/b):
//   m_i(k)    = int x^i conj(wal_k(x)) dx
//   T_ij(k,l) = int int_{y<x} x^i y^j conj(wal_k(x)) wal_l(y) dy dx
// at index k = kappa + b k' are polynomial combinations of the same quantities
// at k', starting from m_i(0) = 1/(i+1) and T_ij(0,0) = 1/((j+1)(i+j+2)).
// Only the downward closed set i + j <= R is ever needed.
class Recursion {
 public:
  Recursion(int b, int R) : b_(b), R_(R), W_(static_cast<std::size_t>(R) + 1) {
    coef_.resize(W_ * W_ * static_cast<std::size_t>(b));
    for (int i = 0; i <= R; ++i) {
      mpz_class binom = 1;
      for (int e = i; e >= 0; --e) {
        // binom = C(i, e) for the current e, built from e = i downwards
        for (int tau = 0; tau < b; ++tau) {
          mpz_class p;
          mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(tau), static_cast<unsigned long>(i - e));
          coef_[(static_cast<std::size_t>(i) * W_ + static_cast<std::size_t>(e)) * static_cast<std::size_t>(b) +
                static_cast<std::size_t>(tau)] = mpq_class(binom * p);
        }
        if (e > 0) binom = binom * e / (i - e + 1);
      }
    }
    inv_pow_.resize(static_cast<std::size_t>(2 * R + 3));
    mpq_class p = 1;
    for (auto& v : inv_pow_) {
      v = p;
      p /= b;
    }
  }

  int b() const { return b_; }
  int R() const { return R_; }
  std::size_t W() const { return W_; }
  std::size_t ij(int i, int j) const { return static_cast<std::size_t>(i) * W_ + static_cast<std::size_t>(j); }
  const mpq_class& inv_pow(int n) const { return inv_pow_[static_cast<std::size_t>(n)]; }

  // C(i,e) tau^(i-e)
  const mpq_class& c(int i, int e, int tau) const {
    return coef_[(static_cast<std::size_t>(i) * W_ + static_cast<std::size_t>(e)) * static_cast<std::size_t>(b_) +
                 static_cast<std::size_t>(tau)];
  }

  CVec zeros(std::size_t n) const { return CVec(n, Cyclotomic(b_)); }

  CVec base_moments() const {
    CVec m = zeros(W_);
    for (int i = 0; i <= R_; ++i) m[static_cast<std::size_t>(i)] = Cyclotomic(b_, mpq_class(1, i + 1));
    return m;
  }

  CVec base_triangle() const {
    CVec T = zeros(W_ * W_);
    for (int i = 0; i <= R_; ++i) {
      for (int j = 0; i + j <= R_; ++j) {
        mpq_class v(1, (j + 1) * (i + j + 2));
        v.canonicalize();
        T[ij(i, j)] = Cyclotomic(b_, v);
      }
    }
    return T;
  }

  // A[tau][i] = int_0^1 ((tau + x)^i) conj(wal_k'(x)) dx = sum_e C(i,e) tau^(i-e) m_e(k')
  CVec sub_moments(const CVec& m) const {
    CVec A = zeros(static_cast<std::size_t>(b_) * W_);
    for (int tau = 0; tau < b_; ++tau) {
      for (int i = 0; i <= R_; ++i) {
        auto& dst = A[static_cast<std::size_t>(tau) * W_ + static_cast<std::size_t>(i)];
        if (tau == 0) {
          dst = m[static_cast<std::size_t>(i)];
          continue;
        }
        for (int e = 0; e <= i; ++e) dst.add_scaled(m[static_cast<std::size_t>(e)], c(i, e, tau));
      }
    }
    return A;
  }

  // m_i(kappa + b k') = b^(-i-1) sum_tau omega^(-kappa tau) A[tau][i]
  CVec child_moments(const CVec& A, int kappa) const {
    CVec m = zeros(W_);
    for (int i = 0; i <= R_; ++i) {
      auto& dst = m[static_cast<std::size_t>(i)];
      for (int tau = 0; tau < b_; ++tau) {
        dst.add_scaled(A[static_cast<std::size_t>(tau) * W_ + static_cast<std::size_t>(i)], inv_pow(i + 1),
                       -kappa * tau);
      }
    }
    return m;
  }

  // G[sigma][i] = sum_{tau > sigma} omega^(-kappa tau) A[tau][i], sigma < b-1
  CVec upper_terms(const CVec& A, int kappa) const {
    CVec G = zeros(static_cast<std::size_t>(b_ - 1) * W_);
    const mpq_class one = 1;
    for (int i = 0; i <= R_; ++i) {
      Cyclotomic acc(b_);
      for (int tau = b_ - 1; tau >= 1; --tau) {
        acc.add_scaled(A[static_cast<std::size_t>(tau) * W_ + static_cast<std::size_t>(i)], one, -kappa * tau);
        G[static_cast<std::size_t>(tau - 1) * W_ + static_cast<std::size_t>(i)] = acc;
      }
    }
    return G;
  }

  // H[sigma][j] = omega^(lambda sigma) conj(A[sigma][j]), sigma < b-1
  CVec lower_terms(const CVec& A, int lambda) const {
    CVec H = zeros(static_cast<std::size_t>(b_ - 1) * W_);
    for (int sigma = 0; sigma + 1 < b_; ++sigma) {
      for (int j = 0; j <= R_; ++j) {
        const std::size_t at = static_cast<std::size_t>(sigma) * W_ + static_cast<std::size_t>(j);
        H[at] = A[at].conj().rotate(lambda * sigma);
      }
    }
    return H;
  }

  // V[delta][ij] = sum_tau omega^(delta tau) sum_{e<=i, f<=j} C(i,e) C(j,f) tau^(i-e+j-f) T[ef]
  CVec diagonal_terms(const CVec& T) const {
    const std::size_t WW = W_ * W_;
    CVec V = zeros(static_cast<std::size_t>(b_) * WW);
    CVec Y = zeros(WW);
    CVec S = zeros(WW);
    const mpq_class one = 1;
    for (int tau = 0; tau < b_; ++tau) {
      const CVec* St = &T;
      if (tau != 0) {
        // Y[e][j] = sum_{f<=j} C(j,f) tau^(j-f) T[e][f]
        for (int e = 0; e <= R_; ++e) {
          for (int j = 0; e + j <= R_; ++j) {
            Cyclotomic acc(b_);
            for (int f = 0; f <= j; ++f) acc.add_scaled(T[ij(e, f)], c(j, f, tau));
            Y[ij(e, j)] = std::move(acc);
          }
        }
        // S[i][j] = sum_{e<=i} C(i,e) tau^(i-e) Y[e][j]
        for (int i = 0; i <= R_; ++i) {
          for (int j = 0; i + j <= R_; ++j) {
            Cyclotomic acc(b_);
            for (int e = 0; e <= i; ++e) acc.add_scaled(Y[ij(e, j)], c(i, e, tau));
            S[ij(i, j)] = std::move(acc);
          }
        }
        St = &S;
      }
      for (int delta = 0; delta < b_; ++delta) {
        for (int i = 0; i <= R_; ++i) {
          for (int j = 0; i + j <= R_; ++j) {
            V[static_cast<std::size_t>(delta) * WW + ij(i, j)].add_scaled((*St)[ij(i, j)], one, delta * tau);
          }
        }
      }
    }
    return V;
  }

  // T_ij(kappa + b k', lambda + b l') = b^(-i-j-2) (sum_sigma G[sigma][i] H[sigma][j] + V[delta][ij])
  CVec child_triangle(const CVec& G, const CVec& H, const CVec& V, int delta) const {
    const std::size_t WW = W_ * W_;
    CVec T = zeros(WW);
    for (int i = 0; i <= R_; ++i) {
      for (int j = 0; i + j <= R_; ++j) {
        Cyclotomic acc = V[static_cast<std::size_t>(delta) * WW + ij(i, j)];
        for (int sigma = 0; sigma + 1 < b_; ++sigma) {
          acc.add_product(G[static_cast<std::size_t>(sigma) * W_ + static_cast<std::size_t>(i)],
                          H[static_cast<std::size_t>(sigma) * W_ + static_cast<std::size_t>(j)]);
        }
        acc *= inv_pow(i + j + 2);
        T[ij(i, j)] = std::move(acc);
      }
    }
    return T;
  }

 private:
  int b_;
  int R_;
  std::size_t W_;
  std::vector<mpq_class> coef_;
  std::vector<mpq_class> inv_pow_;
};

// value(k,l) = sum_ij c_ij T_ij(k,l) + sum_ij d_ij m_i(k) conj(m_j(l)), with
// (R+1)^2 row-major rational coefficient arrays.
struct Functional {
  int R = 0;
  std::vector<mpq_class> c;
  std::vector<mpq_class> d;
};

mpz_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// Coefficients of B_r(.)/r! as a bivariate polynomial in (x, y), once on the
// region x >= y (argument x - y) and once on x < y (argument y - x for the
// absolute rule, x - y + 1 for the periodic rule).
std::pair<std::vector<mpq_class>, std::vector<mpq_class>> diagonal_split(int r, int R, DiagonalRule rule) {
  const std::size_t W = static_cast<std::size_t>(R) + 1;
  std::vector<mpq_class> above(W * W), below(W * W);
  const auto beta = scaled_bernoulli_coeffs(r);
  for (int n = 0; n <= r; ++n) {
    const mpq_class& bn = beta[static_cast<std::size_t>(n)];
    if (sgn(bn) == 0) continue;
    for (int i = 0; i <= n; ++i) {
      const int j = n - i;
      const mpq_class term = bn * mpq_class(binomial(n, i)) * ((j % 2) ? -1 : 1);
      above[static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j)] += term;
      if (rule == DiagonalRule::absolute) {
        // (y - x)^n: x^i y^j with sign (-1)^i
        const mpq_class t2 = bn * mpq_class(binomial(n, i)) * ((i % 2) ? -1 : 1);
        below[static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j)] += t2;
      }
    }
    if (rule == DiagonalRule::periodic) {
      // (x - y + 1)^n = sum n!/(i! j! c!) x^i (-y)^j
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
          const mpz_class multi = binomial(n, i) * binomial(n - i, j);
          below[static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j)] +=
              bn * mpq_class(multi) * ((j % 2) ? -1 : 1);
        }
      }
    }
  }
  return {above, below};
}

Functional periodic_functional(int r, DiagonalRule rule) {
  Functional F;
  F.R = r;
  auto [above, below] = diagonal_split(r, r, rule);
  F.c.resize(above.size());
  for (std::size_t i = 0; i < above.size(); ++i) F.c[i] = above[i] - below[i];
  F.d = std::move(below);
  return F;
}

Functional kernel_functional(int alpha) {
  const int R = 2 * alpha;
  Functional F = periodic_functional(R, DiagonalRule::absolute);
  const int sign = (alpha % 2 == 1) ? 1 : -1;  // (-1)^(alpha+1)
  for (auto& v : F.c) v *= sign;
  for (auto& v : F.d) v *= sign;
  const std::size_t W = static_cast<std::size_t>(R) + 1;
  for (int r = 0; r <= alpha; ++r) {
    const auto beta = scaled_bernoulli_coeffs(r);
    for (int i = 0; i <= r; ++i) {
      for (int j = 0; j <= r; ++j) {
        F.d[static_cast<std::size_t>(i) * W + static_cast<std::size_t>(j)] +=
            beta[static_cast<std::size_t>(i)] * beta[static_cast<std::size_t>(j)];
      }
    }
  }
  return F;
}

Cyclotomic evaluate(const Recursion& rec, const Functional& F, const CVec& T, const CVec& mk, const CVec& ml) {
  Cyclotomic out(rec.b());
  for (int i = 0; i <= F.R; ++i) {
    for (int j = 0; i + j <= F.R; ++j) {
      const auto& cij = F.c[rec.ij(i, j)];
      if (sgn(cij) != 0) out.add_scaled(T[rec.ij(i, j)], cij);
    }
  }
  for (int i = 0; i <= F.R; ++i) {
    Cyclotomic w(rec.b());
    for (int j = 0; j <= F.R; ++j) {
      const auto& dij = F.d[rec.ij(i, j)];
      if (sgn(dij) != 0) w.add_scaled(ml[static_cast<std::size_t>(j)].conj(), dij);
    }
    if (!w.is_zero()) out.add_product(mk[static_cast<std::size_t>(i)], w);
  }
  return out;
}

int digit_at_level(std::uint64_t k, int b, int g, int t) {
  // least significant digit of the level-t prefix k / b^(g-t)
  const std::uint64_t p = k / ipow(b, g - t);
  return static_cast<int>(p % static_cast<std::uint64_t>(b));
}

Cyclotomic eval_chain(const Recursion& rec, const Functional& F, std::uint64_t k, std::uint64_t l) {
  const int b = rec.b();
  const int g = std::max(num_digits(k, b), num_digits(l, b));
  CVec mk = rec.base_moments();
  CVec ml = mk;
  CVec T = rec.base_triangle();
  for (int t = 1; t <= g; ++t) {
    const int kappa = digit_at_level(k, b, g, t);
    const int lambda = digit_at_level(l, b, g, t);
    const CVec Ak = rec.sub_moments(mk);
    const CVec Al = rec.sub_moments(ml);
    const CVec V = rec.diagonal_terms(T);
    T = rec.child_triangle(rec.upper_terms(Ak, kappa), rec.lower_terms(Al, lambda), V, mod_b(lambda - kappa, b));
    mk = rec.child_moments(Ak, kappa);
    ml = rec.child_moments(Al, lambda);
  }
  return evaluate(rec, F, T, mk, ml);
}

CVec moments_of(const Recursion& rec, std::uint64_t k) {
  const int b = rec.b();
  const int g = num_digits(k, b);
  CVec m = rec.base_moments();
  for (int t = 1; t <= g; ++t) m = rec.child_moments(rec.sub_moments(m), digit_at_level(k, b, g, t));
  return m;
}

// Depth-first traversal of the pair tree (k', l') -> (kappa + b k', lambda + b l')
// visiting only prefixes of requested pairs. Per-index quantities are tabulated
// per level; the triangle state lives on the recursion stack.
class BatchEvaluator {
 public:
  BatchEvaluator(const Recursion& rec, const Functional& F, std::span<const std::uint64_t> ks,
                 std::span<const std::uint64_t> ls)
      : rec_(rec), F_(F), b_(rec.b()), nl_(ls.size()) {
    g_ = 0;
    for (auto k : ks) g_ = std::max(g_, num_digits(k, b_));
    for (auto l : ls) g_ = std::max(g_, num_digits(l, b_));
    const std::uint64_t top = ipow(b_, g_);
    kpos_.assign(top, -1);
    lpos_.assign(top, -1);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (kpos_[ks[i]] >= 0) throw UsageError("batch Walsh indices must be distinct");
      kpos_[ks[i]] = static_cast<std::int64_t>(i);
    }
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (lpos_[ls[i]] >= 0) throw UsageError("batch Walsh indices must be distinct");
      lpos_[ls[i]] = static_cast<std::int64_t>(i);
    }
    tabulate(ks, ls);
  }

  void run(std::vector<Cyclotomic>& out, unsigned threads) {
    const CVec T0 = rec_.base_triangle();
    if (g_ == 0) {
      out[0] = evaluate(rec_, F_, T0, mom_[0][0], mom_[0][0]);
      return;
    }
    if (g_ == 1) {
      visit(0, 0, 0, T0, out);
      return;
    }
    const CVec V = rec_.diagonal_terms(T0);
    std::vector<std::pair<int, int>> roots;
    for (int kappa = 0; kappa < b_; ++kappa) {
      for (int lambda = 0; lambda < b_; ++lambda) {
        if (needk_[1][static_cast<std::size_t>(kappa)] && needl_[1][static_cast<std::size_t>(lambda)]) {
          roots.emplace_back(kappa, lambda);
        }
      }
    }
    auto work = [&](std::size_t tid, std::size_t nt) {
      for (std::size_t r = tid; r < roots.size(); r += nt) {
        const auto [kappa, lambda] = roots[r];
        const CVec T = rec_.child_triangle(G_[1][static_cast<std::size_t>(kappa)], H_[1][static_cast<std::size_t>(lambda)],
                                           V, mod_b(lambda - kappa, b_));
        visit(1, static_cast<std::uint64_t>(kappa), static_cast<std::uint64_t>(lambda), T, out);
      }
    };
    const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(threads, roots.size()));
    if (nt == 1) {
      work(0, 1);
      return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
    for (auto& th : pool) th.join();
  }

 private:
  void tabulate(std::span<const std::uint64_t> ks, std::span<const std::uint64_t> ls) {
    const auto ub = static_cast<std::uint64_t>(b_);
    needk_.resize(static_cast<std::size_t>(g_) + 1);
    needl_.resize(static_cast<std::size_t>(g_) + 1);
    for (int t = 0; t <= g_; ++t) {
      const std::uint64_t n = ipow(b_, t);
      needk_[static_cast<std::size_t>(t)].assign(n, false);
      needl_[static_cast<std::size_t>(t)].assign(n, false);
    }
    for (auto k : ks) {
      for (int t = g_; t >= 0; --t, k /= ub) needk_[static_cast<std::size_t>(t)][k] = true;
    }
    for (auto l : ls) {
      for (int t = g_; t >= 0; --t, l /= ub) needl_[static_cast<std::size_t>(t)][l] = true;
    }

    mom_.resize(static_cast<std::size_t>(g_) + 1);
    G_.resize(static_cast<std::size_t>(g_) + 1);
    H_.resize(static_cast<std::size_t>(g_) + 1);
    mom_[0].push_back(rec_.base_moments());
    std::vector<CVec> A_prev{rec_.sub_moments(mom_[0][0])};
    for (int t = 1; t <= g_; ++t) {
      const auto st = static_cast<std::size_t>(t);
      const std::uint64_t n = ipow(b_, t);
      mom_[st].assign(n, CVec{});
      G_[st].assign(n, CVec{});
      H_[st].assign(n, CVec{});
      std::vector<CVec> A_cur(t < g_ ? n : 0);
      for (std::uint64_t p = 0; p < n; ++p) {
        const bool nk = needk_[st][p];
        const bool nl = needl_[st][p];
        if (!nk && !nl) continue;
        const CVec& A = A_prev[p / ub];
        const int digit = static_cast<int>(p % ub);
        mom_[st][p] = rec_.child_moments(A, digit);
        if (nk) G_[st][p] = rec_.upper_terms(A, digit);
        if (nl) H_[st][p] = rec_.lower_terms(A, digit);
        if (t < g_) A_cur[p] = rec_.sub_moments(mom_[st][p]);
      }
      A_prev = std::move(A_cur);
    }

    // Leaf-level contractions with the functional.
    const std::size_t W = rec_.W();
    const auto sg = static_cast<std::size_t>(g_);
    const std::uint64_t top = ipow(b_, g_);
    Hc_.assign(top, CVec{});
    Wl_.assign(top, CVec{});
    for (std::uint64_t l = 0; l < top; ++l) {
      if (!needl_[sg][l]) continue;
      CVec hc = rec_.zeros(static_cast<std::size_t>(b_ - 1) * W);
      if (g_ > 0) {
        for (int sigma = 0; sigma + 1 < b_; ++sigma) {
          for (int i = 0; i <= F_.R; ++i) {
            auto& dst = hc[static_cast<std::size_t>(sigma) * W + static_cast<std::size_t>(i)];
            for (int j = 0; i + j <= F_.R; ++j) {
              const auto& cij = F_.c[rec_.ij(i, j)];
              if (sgn(cij) == 0) continue;
              dst.add_scaled(H_[sg][l][static_cast<std::size_t>(sigma) * W + static_cast<std::size_t>(j)],
                             cij * rec_.inv_pow(i + j + 2));
            }
          }
        }
      }
      Hc_[l] = std::move(hc);
      CVec w = rec_.zeros(W);
      for (int i = 0; i <= F_.R; ++i) {
        for (int j = 0; j <= F_.R; ++j) {
          const auto& dij = F_.d[rec_.ij(i, j)];
          if (sgn(dij) != 0) w[static_cast<std::size_t>(i)].add_scaled(mom_[sg][l][static_cast<std::size_t>(j)].conj(), dij);
        }
      }
      Wl_[l] = std::move(w);
    }
  }

  void visit(int t, std::uint64_t kp, std::uint64_t lp, const CVec& T, std::vector<Cyclotomic>& out) const {
    const CVec V = rec_.diagonal_terms(T);
    const auto ub = static_cast<std::uint64_t>(b_);
    const auto st1 = static_cast<std::size_t>(t + 1);
    const std::size_t W = rec_.W();
    const std::size_t WW = W * W;
    if (t + 1 == g_) {
      CVec Vc = rec_.zeros(static_cast<std::size_t>(b_));
      for (int delta = 0; delta < b_; ++delta) {
        for (int i = 0; i <= F_.R; ++i) {
          for (int j = 0; i + j <= F_.R; ++j) {
            const auto& cij = F_.c[rec_.ij(i, j)];
            if (sgn(cij) == 0) continue;
            Vc[static_cast<std::size_t>(delta)].add_scaled(V[static_cast<std::size_t>(delta) * WW + rec_.ij(i, j)],
                                                           cij * rec_.inv_pow(i + j + 2));
          }
        }
      }
      for (int kappa = 0; kappa < b_; ++kappa) {
        const std::uint64_t k = static_cast<std::uint64_t>(kappa) + ub * kp;
        if (kpos_[k] < 0) continue;
        for (int lambda = 0; lambda < b_; ++lambda) {
          const std::uint64_t l = static_cast<std::uint64_t>(lambda) + ub * lp;
          if (lpos_[l] < 0) continue;
          Cyclotomic val = Vc[static_cast<std::size_t>(mod_b(lambda - kappa, b_))];
          const CVec& G = G_[st1][k];
          const CVec& Hc = Hc_[l];
          for (std::size_t a = 0; a < G.size(); ++a) val.add_product(G[a], Hc[a]);
          const CVec& mk = mom_[st1][k];
          const CVec& w = Wl_[l];
          for (std::size_t i = 0; i < W; ++i) val.add_product(mk[i], w[i]);
          out[static_cast<std::size_t>(kpos_[k]) * nl_ + static_cast<std::size_t>(lpos_[l])] = std::move(val);
        }
      }
      return;
    }
    for (int kappa = 0; kappa < b_; ++kappa) {
      const std::uint64_t k = static_cast<std::uint64_t>(kappa) + ub * kp;
      if (!needk_[st1][k]) continue;
      for (int lambda = 0; lambda < b_; ++lambda) {
        const std::uint64_t l = static_cast<std::uint64_t>(lambda) + ub * lp;
        if (!needl_[st1][l]) continue;
        const CVec child = rec_.child_triangle(G_[st1][k], H_[st1][l], V, mod_b(lambda - kappa, b_));
        visit(t + 1, k, l, child, out);
      }
    }
  }

  const Recursion& rec_;
  const Functional& F_;
  int b_;
  std::size_t nl_;
  int g_ = 0;
  std::vector<std::int64_t> kpos_, lpos_;
  std::vector<std::vector<bool>> needk_, needl_;
  std::vector<std::vector<CVec>> mom_, G_, H_;
  std::vector<CVec> Hc_, Wl_;
};

std::vector<Cyclotomic> eval_batch(const Recursion& rec, const Functional& F, std::span<const std::uint64_t> ks,
                                   std::span<const std::uint64_t> ls, unsigned threads) {
  std::vector<Cyclotomic> out(ks.size() * ls.size(), Cyclotomic(rec.b()));
  if (out.empty()) return out;
  BatchEvaluator ev(rec, F, ks, ls);
  ev.run(out, threads);
  return out;
}

void require_alpha(int alpha) {
  if (alpha < 1) throw UsageError("smoothness alpha must be >= 1");
}

}  // namespace

Cyclotomic bhat_r(int b, int r, std::uint64_t k) {
  require_prime_base(b);
  if (r < 0) throw UsageError("bhat_r: r must be >= 0");
  const Recursion rec(b, r);
  const CVec m = moments_of(rec, k);
  const auto beta = scaled_bernoulli_coeffs(r);
  Cyclotomic out(b);
  for (int i = 0; i <= r; ++i) out.add_scaled(m[static_cast<std::size_t>(i)], beta[static_cast<std::size_t>(i)]);
  return out;
}

Cyclotomic bhat_r_per(int b, int r, std::uint64_t k, std::uint64_t l, DiagonalRule rule) {
  require_prime_base(b);
  if (r < 2) throw UsageError("bhat_r_per requires r >= 2");
  const Recursion rec(b, r);
  return eval_chain(rec, periodic_functional(r, rule), k, l);
}

Cyclotomic bhat_r_per_grid(int b, int r, std::uint64_t k, std::uint64_t l) {
  require_prime_base(b);
  if (r < 2) throw UsageError("bhat_r_per_grid requires r >= 2");
  const int g = std::max(num_digits(k, b), num_digits(l, b));
  const std::uint64_t N = ipow(b, g);
  if (N > 8192) throw ResourceError("bhat_r_per_grid: grid of " + std::to_string(N) + " cells per axis is too large");

  // Exponent of wal on each cell, cell u covering [u/N, (u+1)/N).
  auto cell_exponents = [&](std::uint64_t idx) {
    std::vector<int> e(N);
    std::vector<Digit> xi(static_cast<std::size_t>(g));
    for (std::uint64_t u = 0; u < N; ++u) {
      std::uint64_t v = u;
      for (int i = g - 1; i >= 0; --i) {
        xi[static_cast<std::size_t>(i)] = static_cast<Digit>(v % static_cast<std::uint64_t>(b));
        v /= static_cast<std::uint64_t>(b);
      }
      e[u] = walsh_exponent(b, idx, xi);
    }
    return e;
  };
  const auto ek = cell_exponents(k);
  const auto el = cell_exponents(l);

  std::vector<std::uint64_t> cnt(N * static_cast<std::uint64_t>(b), 0);
  for (std::uint64_t u = 0; u < N; ++u) {
    for (std::uint64_t v = 0; v < N; ++v) {
      const std::uint64_t delta = u > v ? u - v : v - u;
      cnt[delta * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(mod_b(el[v] - ek[u], b))]++;
    }
  }

  // Cell-pair integral of P(|x - y|), P = B_r/r!, depends only on the offset
  // delta: with R2 = B_{r+2}/(r+2)! and Q = B_{r+1}/(r+1)!,
  //   delta >= 1: R2((delta+1)h) - 2 R2(delta h) + R2((delta-1)h)
  //   delta == 0: 2 (R2(h) - R2(0) - h Q(0))
  const auto r2 = scaled_bernoulli_coeffs(r + 2);
  const auto q1 = scaled_bernoulli_coeffs(r + 1);
  auto poly = [](const std::vector<mpq_class>& c, const mpq_class& x) {
    mpq_class v = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
  };
  const mpq_class h(mpz_class(1), mpz_class(static_cast<unsigned long>(N)));
  Cyclotomic out(b);
  for (std::uint64_t delta = 0; delta < N; ++delta) {
    Cyclotomic acc(b);
    bool any = false;
    for (int e = 0; e < b; ++e) {
      const auto c = cnt[delta * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(e)];
      if (c == 0) continue;
      any = true;
      acc.add_scaled(Cyclotomic(b, mpq_class(1)), mpq_class(mpz_class(static_cast<unsigned long>(c))), e);
    }
    if (!any) continue;
    mpq_class I;
    if (delta == 0) {
      I = 2 * (poly(r2, h) - poly(r2, 0) - h * poly(q1, 0));
    } else {
      const mpq_class x = h * mpq_class(mpz_class(static_cast<unsigned long>(delta)));
      I = poly(r2, x + h) - 2 * poly(r2, x) + poly(r2, x - h);
    }
    out.add_scaled(acc, I);
  }
  return out;
}

Cyclotomic khat(int b, int alpha, std::uint64_t k, std::uint64_t l) {
  require_prime_base(b);
  require_alpha(alpha);
  const Recursion rec(b, 2 * alpha);
  return eval_chain(rec, kernel_functional(alpha), k, l);
}

Cyclotomic khat_s(int b, int alpha, std::span<const std::uint64_t> k, std::span<const std::uint64_t> l) {
  if (k.size() != l.size()) throw UsageError("khat_s: index vectors differ in dimension");
  Cyclotomic out(b, mpq_class(1));
  for (std::size_t j = 0; j < k.size(); ++j) {
    out = out * khat(b, alpha, k[j], l[j]);
    if (out.is_zero()) break;
  }
  return out;
}

std::vector<Cyclotomic> khat_batch(int b, int alpha, std::span<const std::uint64_t> ks,
                                   std::span<const std::uint64_t> ls, unsigned threads) {
  require_prime_base(b);
  require_alpha(alpha);
  const Recursion rec(b, 2 * alpha);
  return eval_batch(rec, kernel_functional(alpha), ks, ls, threads);
}

std::vector<Cyclotomic> bhat_r_per_batch(int b, int r, std::span<const std::uint64_t> ks,
                                         std::span<const std::uint64_t> ls, unsigned threads) {
  require_prime_base(b);
  if (r < 2) throw UsageError("bhat_r_per requires r >= 2");
  const Recursion rec(b, r);
  return eval_batch(rec, periodic_functional(r, DiagonalRule::absolute), ks, ls, threads);
}

WalshCoeffTable::WalshCoeffTable(int base, int alpha, int levels, std::vector<Cyclotomic> values,
                                 std::vector<std::vector<Cyclotomic>> bhat)
    : base_(base),
      alpha_(alpha),
      levels_(levels),
      size_(ipow(base, levels)),
      values_(std::move(values)),
      bhat_(std::move(bhat)) {
  if (values_.size() != size_ * size_) throw UsageError("Walsh table has the wrong number of entries");
}

WalshCoeffTable build_walsh_table(int b, int alpha, int levels, unsigned threads) {
  require_prime_base(b);
  require_alpha(alpha);
  if (levels < 0) throw UsageError("Walsh table levels must be >= 0");
  const std::uint64_t n = ipow(b, levels);
  std::vector<std::uint64_t> idx(n);
  for (std::uint64_t k = 0; k < n; ++k) idx[k] = k;
  auto values = khat_batch(b, alpha, idx, idx, threads);

  const Recursion rec(b, alpha);
  std::vector<std::vector<Cyclotomic>> bhat(static_cast<std::size_t>(alpha) + 1);
  std::vector<std::vector<mpq_class>> beta;
  for (int r = 0; r <= alpha; ++r) beta.push_back(scaled_bernoulli_coeffs(r));
  for (std::uint64_t k = 0; k < n; ++k) {
    const CVec m = moments_of(rec, k);
    for (int r = 0; r <= alpha; ++r) {
      Cyclotomic v(b);
      for (int i = 0; i <= r; ++i) {
        v.add_scaled(m[static_cast<std::size_t>(i)], beta[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)]);
      }
      bhat[static_cast<std::size_t>(r)].push_back(std::move(v));
    }
  }
  return WalshCoeffTable(b, alpha, levels, std::move(values), std::move(bhat));
}

SparsityReport check_sparsity(const WalshCoeffTable& table) {
  SparsityReport rep;
  const std::uint64_t n = table.size();
  for (std::uint64_t k = 0; k < n; ++k) {
    for (std::uint64_t l = 0; l < n; ++l) {
      ++rep.pairs;
      const auto ty = table.type(k, l);
      if (ty.p + ty.q <= 2 * table.alpha()) continue;
      ++rep.over_budget;
      if (!table.value(k, l).is_zero()) {
        ++rep.nonzero_over_budget;
        if (!rep.first_violation) rep.first_violation = std::make_pair(k, l);
      }
    }
  }
  return rep;
}

DecayScan decay_scan(const WalshCoeffTable& table) {
  const int b = table.base();
  DecayScan scan;
  scan.sup_by_level.assign(static_cast<std::size_t>(table.levels()) + 1, 0.0);
  const std::uint64_t n = table.size();
  for (std::uint64_t k = 0; k < n; ++k) {
    for (std::uint64_t l = 0; l < n; ++l) {
      const auto& v = table.value(k, l);
      if (v.is_zero()) continue;
      const int weight = mu(table.alpha(), k, b) + mu(table.alpha(), l, b);
      const double ratio = std::abs(v.to_complex()) * std::pow(static_cast<double>(b), weight);
      const auto lvl = static_cast<std::size_t>(std::max(num_digits(k, b), num_digits(l, b)));
      scan.sup_by_level[lvl] = std::max(scan.sup_by_level[lvl], ratio);
    }
  }
  for (std::size_t t = 1; t < scan.sup_by_level.size(); ++t) {
    scan.sup_by_level[t] = std::max(scan.sup_by_level[t], scan.sup_by_level[t - 1]);
  }
  scan.sup = scan.sup_by_level.back();
  return scan;
}

namespace {

// ceil(b^(z-1) (b-1)) and ceil(b^(z-1)); both equal 1 at z = 0.
std::uint64_t ceil_lead(int b, int z) { return z == 0 ? 1 : ipow(b, z - 1) * static_cast<std::uint64_t>(b - 1); }
std::uint64_t ceil_pow(int b, int z) { return z == 0 ? 1 : ipow(b, z - 1); }

}  // namespace

std::uint64_t type_count_formula_literal(int b, int p, int q, int z1, int z2) {
  require_prime_base(b);
  if (z1 < 0 || z2 < 0) throw UsageError("count_type_pairs: z1, z2 must be >= 0");
  if (p < q) return type_count_formula_literal(b, q, p, z2, z1);
  const auto ub1 = static_cast<std::uint64_t>(b - 1);
  if (p == 0 && q == 0) return z1 != z2 ? 0 : ceil_lead(b, z1);
  if (p == 1 && q == 0) return z1 <= z2 ? 0 : ceil_lead(b, z2) * ub1;
  if (p == 2 && q == 0) {
    return z1 <= z2 + 1 ? 0 : ceil_lead(b, z2) * ub1 * ub1 * static_cast<std::uint64_t>(z1 - z2 - 1);
  }
  if (p == 1 && q == 1) {
    const int zmin = std::min(z1, z2);
    return z1 == z2 ? ceil_pow(b, zmin) * ub1 * static_cast<std::uint64_t>(b - 2) : ceil_pow(b, zmin) * ub1 * ub1;
  }
  throw UsageError("no closed-form count for type (" + std::to_string(p) + "," + std::to_string(q) + ")");
}

std::uint64_t count_type_pairs(int b, int p, int q, int z1, int z2, CountMode mode) {
  require_prime_base(b);
  if (z1 < 0 || z2 < 0) throw UsageError("count_type_pairs: z1, z2 must be >= 0");
  if (p < 0 || q < 0) throw UsageError("count_type_pairs: p, q must be >= 0");
  if (mode == CountMode::formula) {
    if (p == 1 && q == 1 && std::min(z1, z2) == 0) return 0;
    return type_count_formula_literal(b, p, q, z1, z2);
  }
  auto range = [&](int z) -> std::pair<std::uint64_t, std::uint64_t> {
    if (z == 0) return {0, 1};
    const std::uint64_t lo = ipow(b, z - 1);
    return {lo, lo * static_cast<std::uint64_t>(b)};
  };
  const auto [klo, khi] = range(z1);
  const auto [llo, lhi] = range(z2);
  std::uint64_t count = 0;
  for (std::uint64_t k = klo; k < khi; ++k) {
    for (std::uint64_t l = llo; l < lhi; ++l) {
      const auto ty = classify_type(b, k, l);
      if (ty.p == p && ty.q == q) ++count;
    }
  }
  return count;
}

}  // namespace hoqmc
