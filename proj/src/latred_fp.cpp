#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ecleak/bigint.hpp"
#include "ecleak/latred.hpp"
#include "ecleak/rng.hpp"

namespace ecleak {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Floating-point Gram-Schmidt over an exactly maintained integer Gram
// matrix. Row operations update the Gram matrix exactly; mu/r/B are derived
// in long double on demand, so fp error never accumulates across row ops.
class FpGso {
 public:
  FpGso(Basis& basis, Basis* transform)
      : b_(basis), u_(transform), m_(basis.size()) {
    if (u_ && u_->size() != m_)
      throw std::invalid_argument("reduce: transform shape");
    g_.assign(m_, std::vector<mpz_class>(m_));
    for (size_t i = 0; i < m_; ++i)
      for (size_t j = 0; j <= i; ++j) {
        g_[i][j] = dot_rows(b_[i], b_[j]);
        g_[j][i] = g_[i][j];
      }
    mu_.assign(m_, std::vector<long double>(m_, 0));
    r_.assign(m_, std::vector<long double>(m_, 0));
    B_.assign(m_, 0);
  }

  size_t rows() const { return m_; }
  long double B(size_t i) const { return B_[i]; }
  long double mu(size_t i, size_t j) const { return mu_[i][j]; }
  const mpz_class& gram(size_t i, size_t j) const { return g_[i][j]; }

  // Recompute fp GSO for row k from the exact Gram matrix; rows < k must be
  // current.
  void refresh(size_t k) {
    for (size_t j = 0; j <= k; ++j) {
      long double s = ld_of(g_[k][j]);
      for (size_t l = 0; l < j; ++l) s -= mu_[j][l] * r_[k][l];
      r_[k][j] = s;
      if (j < k) mu_[k][j] = (B_[j] != 0.0L) ? s / B_[j] : 0.0L;
    }
    B_[k] = r_[k][k];
    mu_[k][k] = 1.0L;
  }

  void refresh_upto(size_t hi) {
    for (size_t k = 0; k < hi; ++k) refresh(k);
  }

  // b_k -= q * b_j, with exact Gram update.
  void row_sub(size_t k, size_t j, const mpz_class& q) {
    if (sgn(q) == 0) return;
    // order matters: g[k][k] uses the old g[k][j]
    g_[k][k] += q * q * g_[j][j] - 2 * q * g_[k][j];
    for (size_t i = 0; i < m_; ++i) {
      if (i == k) continue;
      mpz_submul(g_[k][i].get_mpz_t(), q.get_mpz_t(), g_[j][i].get_mpz_t());
      g_[i][k] = g_[k][i];
    }
    auto& rk = b_[k];
    const auto& rj = b_[j];
    for (size_t i = 0; i < rk.size(); ++i)
      mpz_submul(rk[i].get_mpz_t(), q.get_mpz_t(), rj[i].get_mpz_t());
    if (u_) {
      auto& uk = (*u_)[k];
      const auto& uj = (*u_)[j];
      for (size_t i = 0; i < uk.size(); ++i)
        mpz_submul(uk[i].get_mpz_t(), q.get_mpz_t(), uj[i].get_mpz_t());
    }
  }

  void swap_rows(size_t k) {
    std::swap(b_[k], b_[k - 1]);
    if (u_) std::swap((*u_)[k], (*u_)[k - 1]);
    std::swap(g_[k], g_[k - 1]);
    for (size_t i = 0; i < m_; ++i) std::swap(g_[i][k], g_[i][k - 1]);
  }

  // Insert v (a combination of existing rows with coefficients coeffs over
  // rows [kappa, kappa+len)) as a new row at position kappa.
  void insert_combination(size_t kappa, size_t len,
                          const std::vector<mpz_class>& coeffs) {
    std::vector<mpz_class> v(b_[0].size(), 0);
    for (size_t i = 0; i < len; ++i)
      if (sgn(coeffs[i]) != 0)
        for (size_t c = 0; c < v.size(); ++c)
          mpz_addmul(v[c].get_mpz_t(), coeffs[i].get_mpz_t(),
                     b_[kappa + i][c].get_mpz_t());
    // Gram entries of v against existing rows from existing Gram entries.
    std::vector<mpz_class> gv(m_ + 1, 0);
    for (size_t jj = 0; jj < m_; ++jj) {
      for (size_t i = 0; i < len; ++i)
        mpz_addmul(gv[jj].get_mpz_t(), coeffs[i].get_mpz_t(),
                   g_[kappa + i][jj].get_mpz_t());
    }
    mpz_class gvv = 0;
    for (size_t i = 0; i < len; ++i)
      for (size_t l = 0; l < len; ++l)
        gvv += coeffs[i] * coeffs[l] * g_[kappa + i][kappa + l];

    b_.insert(b_.begin() + kappa, std::move(v));
    for (size_t i = 0; i < m_; ++i)
      g_[i].insert(g_[i].begin() + kappa, std::move(gv[i]));
    std::vector<mpz_class> newrow(m_ + 1);
    for (size_t i = 0; i < m_; ++i) newrow[i < kappa ? i : i + 1] = g_[i][kappa];
    newrow[kappa] = std::move(gvv);
    g_.insert(g_.begin() + kappa, std::move(newrow));
    ++m_;
    for (auto& row : mu_) row.resize(m_, 0);
    mu_.resize(m_, std::vector<long double>(m_, 0));
    for (auto& row : r_) row.resize(m_, 0);
    r_.resize(m_, std::vector<long double>(m_, 0));
    B_.resize(m_, 0);
  }

  void remove_row(size_t k) {
    b_.erase(b_.begin() + k);
    g_.erase(g_.begin() + k);
    for (auto& row : g_) row.erase(row.begin() + k);
    --m_;
  }

  bool row_is_zero(size_t k) const { return sgn(g_[k][k]) == 0; }

  Basis& basis() { return b_; }

 private:
  Basis& b_;
  Basis* u_;
  size_t m_;
  std::vector<std::vector<mpz_class>> g_;
  std::vector<std::vector<long double>> mu_, r_;
  std::vector<long double> B_;
};

constexpr long double kEta = 0.52L;

mpz_class mu_round(long double mu) {
  if (std::fabs(mu) < 9.0e18L) return mpz_class(static_cast<long>(llroundl(mu)));
  return mpz_of_ld(mu);
}

struct LllCore {
  FpGso& gso;
  double delta;
  ReduceStats& stats;
  Clock::time_point t0;
  double budget;

  bool out_of_time() const { return budget > 0 && since(t0) > budget; }

  // Iterated size reduction of row k against rows < k. Returns false on a
  // row that stubbornly refuses to reduce (fp trouble).
  bool size_reduce(size_t k) {
    for (int pass = 0; pass < 64; ++pass) {
      gso.refresh(k);
      bool any = false;
      for (size_t j = k; j-- > 0;) {
        long double m = gso.mu(k, j);
        if (std::fabs(m) <= kEta) continue;
        gso.row_sub(k, j, mu_round(m));
        ++stats.size_reductions;
        any = true;
      }
      if (!any) return true;
    }
    return false;
  }

  // LLL over rows [0, hi). Throws when a row reduces to exactly zero
  // (dependent input).
  void run(size_t hi) {
    if (hi > gso.rows()) hi = gso.rows();
    gso.refresh_upto(hi);
    size_t k = 1;
    uint64_t guard = 0;
    const uint64_t guard_max = 2000000 + 8000ull * hi * hi;
    while (k < hi) {
      if (!size_reduce(k)) {
        // fp failure: treated as a budget stop; caller may fall back
        stats.partial = true;
        return;
      }
      if (gso.row_is_zero(k))
        throw std::runtime_error("reduce: rank deficiency in Gram-Schmidt");
      gso.refresh(k);
      long double mukk1 = gso.mu(k, k - 1);
      long double lhs = gso.B(k);
      long double rhs =
          (static_cast<long double>(delta) - mukk1 * mukk1) * gso.B(k - 1);
      if (lhs >= rhs) {
        ++k;
      } else {
        gso.swap_rows(k);
        ++stats.swaps;
        gso.refresh(k - 1);
        gso.refresh(k);
        k = k > 1 ? k - 1 : 1;
      }
      if (++guard % 512 == 0 && out_of_time()) {
        stats.partial = true;
        return;
      }
      if (guard > guard_max) {
        stats.partial = true;
        return;
      }
    }
  }
};

// Bounded Schnorr-Euchner enumeration over the projected block
// [kappa, kappa+blk). Returns coefficients of a vector with projected norm
// strictly below radius2, or nullopt. Nodes capped; best found kept.
// prune in (0,1] scales the radius at partial depth: with k of blk
// coordinates assigned the bound is radius2 * (prune + (1-prune)*k/blk),
// i.e. 1.0 enumerates exactly and smaller values give the usual linear
// pruning profile (full radius only at the leaves).
std::optional<std::vector<long>> enumerate_block(const FpGso& gso, size_t kappa,
                                                 size_t blk, long double radius2,
                                                 uint64_t node_cap, double prune,
                                                 uint64_t& nodes_out) {
  std::vector<long double> rho(blk + 1, 0), c(blk, 0);
  std::vector<long> x(blk, 0), step(blk, 0), base(blk, 0);
  std::vector<int> side(blk, 1);
  std::vector<long double> pf(blk, 1.0L);
  if (prune < 1.0) {
    for (size_t i = 0; i < blk; ++i)
      pf[i] = static_cast<long double>(prune) +
              (1.0L - static_cast<long double>(prune)) *
                  static_cast<long double>(blk - i) / static_cast<long double>(blk);
  }
  std::vector<long> best;
  long double bound = radius2;
  uint64_t nodes = 0;

  auto center = [&](size_t i) {
    long double s = 0;
    for (size_t j = i + 1; j < blk; ++j)
      s -= static_cast<long double>(x[j]) * gso.mu(kappa + j, kappa + i);
    return s;
  };
  auto next_x = [&](size_t i) {
    // visiting order base, base+s, base-s, base+2s, ... (top level: 0,1,2,..)
    ++step[i];
    if (i + 1 == blk) {
      x[i] = base[i] + step[i];
      return;
    }
    long k = (step[i] + 1) / 2;
    x[i] = base[i] + (step[i] % 2 ? side[i] * k : -side[i] * k);
  };

  size_t i = blk - 1;
  c[i] = 0;
  base[i] = 0;
  step[i] = 0;
  x[i] = 0;

  for (;;) {
    if (nodes++ > node_cap) break;
    long double diff = static_cast<long double>(x[i]) - c[i];
    long double r = rho[i + 1] + diff * diff * gso.B(kappa + i);
    if (r < bound * pf[i]) {
      if (i == 0) {
        bool nonzero = false;
        for (auto v : x)
          if (v) nonzero = true;
        if (nonzero) {
          bound = r;
          best.assign(x.begin(), x.end());
        }
        next_x(i);
      } else {
        rho[i] = r;
        --i;
        c[i] = center(i);
        base[i] = static_cast<long>(llroundl(c[i]));
        side[i] = (c[i] >= static_cast<long double>(base[i])) ? 1 : -1;
        step[i] = 0;
        x[i] = base[i];
      }
    } else {
      ++i;
      if (i >= blk) break;
      next_x(i);
    }
  }
  nodes_out += nodes;
  if (best.empty()) return std::nullopt;
  return best;
}

// After insert_combination the rows [kappa, kappa+len) carry the known
// dependency sum(coeffs[i] * row[kappa+i]) == 0 with coeffs[0] == 1 on the
// inserted row. Unimodular ops among the old rows (index 0 never touched)
// shrink their coefficients gcd-style until a single one is left; the
// relation then reads v + g*b == 0, so the inserted v is an integer
// multiple of the surviving row b and can be dropped without changing the
// lattice. b (= -v/g, at least as short as v) is moved to the block front.
void remove_dependency(FpGso& gso, size_t kappa, std::vector<mpz_class> coeffs) {
  const size_t len = coeffs.size();
  if (len < 2 || coeffs[0] != 1)
    throw std::logic_error("reduce: dependency must carry the inserted row");
  for (;;) {
    size_t nz = 0, small = 0;
    for (size_t i = 1; i < len; ++i) {
      if (sgn(coeffs[i]) == 0) continue;
      ++nz;
      if (small == 0 ||
          mpz_cmpabs(coeffs[i].get_mpz_t(), coeffs[small].get_mpz_t()) < 0)
        small = i;
    }
    if (nz == 0) throw std::runtime_error("reduce: degenerate dependency");
    if (nz == 1) {
      gso.remove_row(kappa);
      for (size_t pos = kappa + small - 1; pos > kappa; --pos)
        gso.swap_rows(pos);
      return;
    }
    // reduce every other tail coefficient modulo the smallest; the update
    // pairs c_i -= q*c_small with b_small += q*b_i, which preserves
    // sum(c*b).
    mpz_class cs = coeffs[small];
    mpz_class acs = abs(cs);
    for (size_t i = 1; i < len; ++i) {
      if (i == small || sgn(coeffs[i]) == 0) continue;
      mpz_class q = round_div(sgn(cs) > 0 ? coeffs[i] : mpz_class(-coeffs[i]), acs);
      if (sgn(q) == 0) continue;
      gso.row_sub(kappa + small, kappa + i, mpz_class(-q));
      coeffs[i] -= q * cs;
    }
  }
}

}  // namespace

ReduceStats lll_fp(Basis& b, double delta, Basis* transform,
                   double time_budget_s) {
  if (delta <= 0.25 || delta >= 1.0)
    throw std::invalid_argument("lll_fp: delta out of (1/4, 1)");
  ReduceStats stats;
  auto t0 = Clock::now();
  if (transform && transform->empty()) {
    transform->assign(b.size(), std::vector<mpz_class>(b.size(), 0));
    for (size_t i = 0; i < b.size(); ++i) (*transform)[i][i] = 1;
  }
  if (b.size() > 1) {
    FpGso gso(b, transform);
    LllCore core{gso, delta, stats, t0, time_budget_s};
    core.run(b.size());
  }
  stats.seconds = since(t0);
  return stats;
}

ReduceStats bkz_fp(Basis& b, const ReduceOptions& opt) {
  if (opt.block < 2) throw std::invalid_argument("bkz: block must be >= 2");
  if (opt.enum_prune < 0.0 || opt.enum_prune > 1.0)
    throw std::invalid_argument("bkz: enum_prune must be in [0, 1]");
  if (opt.enum_retries < 0)
    throw std::invalid_argument("bkz: enum_retries must be >= 0");
  ReduceStats stats;
  auto t0 = Clock::now();
  const size_t m = b.size();
  if (m <= 1) return stats;

  Rng shake(0x7e11a9);  // fixed seed, reduction stays deterministic
  FpGso gso(b, nullptr);
  LllCore core{gso, opt.delta, stats, t0, opt.time_budget_s};
  core.run(m);
  if (stats.partial) {
    stats.seconds = since(t0);
    return stats;
  }

  int rounds = 0;
  bool improved = true;
  // Rerandomized retries only arm once a vanilla tour stalls: tours stay
  // cheap while plain enumeration makes progress, and the expensive rescue
  // attempts concentrate on the fixpoint they exist to break.
  bool armed = false;
  while (rounds < opt.max_rounds) {
    improved = false;
    for (size_t kappa = 0; kappa + 1 < m; ++kappa) {
      if (core.out_of_time()) {
        stats.partial = true;
        break;
      }
      size_t blk = std::min<size_t>(opt.block, m - kappa);
      if (blk < 2) continue;
      gso.refresh_upto(kappa + blk);
      long double radius2 =
          static_cast<long double>(opt.delta) * gso.B(kappa);
      auto u = enumerate_block(gso, kappa, blk, radius2, opt.enum_node_cap,
                               opt.enum_prune, stats.enum_nodes);
      // Pruned or capped enumeration misses vectors. Rerandomizing the rows
      // behind the block head and re-reducing gives the next attempt a
      // different pruning tree over the same block lattice; the head row is
      // untouched, so the radius never loosens.
      int tries = armed ? opt.enum_retries : 0;
      for (int retry = 0; !u && retry < tries && blk >= 4; ++retry) {
        if (core.out_of_time()) {
          stats.partial = true;
          break;
        }
        for (size_t op = 0; op < blk; ++op) {
          size_t i = kappa + 1 + shake.u64() % (blk - 1);
          size_t j = kappa + 1 + shake.u64() % (blk - 1);
          if (i == j) continue;
          gso.row_sub(i, j, (shake.u64() & 1) ? mpz_class(1) : mpz_class(-1));
        }
        core.run(std::min(m, kappa + blk));
        if (stats.partial) break;
        radius2 = static_cast<long double>(opt.delta) * gso.B(kappa);
        u = enumerate_block(gso, kappa, blk, radius2, opt.enum_node_cap,
                            opt.enum_prune, stats.enum_nodes);
      }
      if (stats.partial) break;
      if (!u) continue;
      // coefficients of the short vector over rows [kappa, kappa+blk)
      std::vector<mpz_class> coeffs(blk + 1);
      coeffs[0] = 0;  // placeholder for the inserted row itself
      bool trivial = true;
      for (size_t i = 0; i < blk; ++i) {
        coeffs[i + 1] = (*u)[i];
        if (i > 0 && (*u)[i] != 0) trivial = false;
      }
      if (trivial && std::abs((*u)[0]) == 1) continue;  // +-b_kappa, no gain
      std::vector<mpz_class> ins(coeffs.begin() + 1, coeffs.end());
      gso.insert_combination(kappa, blk, ins);
      // dependency: 1*new_row - sum(u_i * b_i) == 0 over rows
      // [kappa, kappa+blk+1)
      coeffs[0] = 1;
      for (size_t i = 0; i < blk; ++i) coeffs[i + 1] = -ins[i];
      remove_dependency(gso, kappa, std::move(coeffs));
      size_t hi = std::min(m, kappa + blk + 1);
      core.run(hi);
      improved = true;
      if (stats.partial) break;
    }
    ++rounds;
    if (stats.partial) break;
    if (improved) {
      armed = false;
      continue;
    }
    if (opt.enum_retries > 0 && !armed) {
      armed = true;
      continue;
    }
    break;
  }
  stats.rounds = rounds;
  if (rounds >= opt.max_rounds && improved) stats.partial = true;
  // final full pass
  core.run(m);
  stats.seconds = since(t0);
  return stats;
}

ReduceStats reduce_basis(Basis& b, const ReduceOptions& opt, Basis* transform) {
  if (opt.exact || opt.algorithm == "exact") {
    ReduceStats stats;
    long num = std::lround(opt.delta * 1000.0);
    num = std::min(999L, std::max(251L, num));
    lll_exact(b, num, 1000, transform, &stats);
    return stats;
  }
  if (opt.algorithm == "lll") return lll_fp(b, opt.delta, transform, opt.time_budget_s);
  if (opt.algorithm == "bkz") {
    if (transform)
      throw std::invalid_argument("reduce: transform unsupported for bkz");
    return bkz_fp(b, opt);
  }
  throw std::invalid_argument("reduce: unknown algorithm " + opt.algorithm);
}

}  // namespace ecleak
