#include <chrono>
#include <stdexcept>

#include "ecleak/bigint.hpp"
#include "ecleak/latred.hpp"

namespace ecleak {

mpz_class dot_rows(const std::vector<mpz_class>& a,
                   const std::vector<mpz_class>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  mpz_class acc = 0;
  for (size_t i = 0; i < a.size(); ++i)
    mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  return acc;
}

mpz_class norm2_row(const std::vector<mpz_class>& a) { return dot_rows(a, a); }

// All-integer LLL after de Weger: Gram-Schmidt state kept as integers
// dd[i] = det of the leading i x i Gram block (dd[0] = 1) and
// lam[i][j] = dd[j+1] * mu_{i,j}. Every division below is exact.
void lll_exact(Basis& b, long delta_num, long delta_den, Basis* transform,
               ReduceStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  const size_t m = b.size();
  if (transform && transform->empty()) {
    transform->assign(m, std::vector<mpz_class>(m, 0));
    for (size_t i = 0; i < m; ++i) (*transform)[i][i] = 1;
  }
  if (transform && transform->size() != m)
    throw std::invalid_argument("lll_exact: transform shape");
  if (delta_num <= 0 || delta_den <= 0 || 4 * delta_num <= delta_den ||
      delta_num >= delta_den)
    throw std::invalid_argument("lll_exact: delta out of (1/4, 1)");
  ReduceStats local;
  local.used_exact = true;
  if (m <= 1) {
    if (stats) *stats = local;
    return;
  }

  std::vector<mpz_class> dd(m + 1);
  dd[0] = 1;
  std::vector<std::vector<mpz_class>> lam(m, std::vector<mpz_class>(m, 0));

  auto gso_row = [&](size_t k) {
    for (size_t j = 0; j <= k; ++j) {
      mpz_class u = dot_rows(b[k], b[j]);
      for (size_t i = 0; i < j; ++i) {
        u = dd[i + 1] * u - lam[k][i] * lam[j][i];
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), dd[i].get_mpz_t());
      }
      if (j < k)
        lam[k][j] = u;
      else {
        if (sgn(u) == 0)
          throw std::runtime_error("lll_exact: rank deficiency in Gram-Schmidt");
        dd[k + 1] = u;
      }
    }
  };

  auto red = [&](size_t k, size_t l) {
    // |lam[k][l]| <= dd[l+1]/2 afterwards
    mpz_class two_lam = 2 * lam[k][l];
    if (mpz_cmpabs(two_lam.get_mpz_t(), dd[l + 1].get_mpz_t()) <= 0) return;
    mpz_class q = round_div(lam[k][l], dd[l + 1]);
    for (size_t i = 0; i < b[k].size(); ++i)
      mpz_submul(b[k][i].get_mpz_t(), q.get_mpz_t(), b[l][i].get_mpz_t());
    if (transform)
      for (size_t i = 0; i < (*transform)[k].size(); ++i)
        mpz_submul((*transform)[k][i].get_mpz_t(), q.get_mpz_t(),
                   (*transform)[l][i].get_mpz_t());
    mpz_submul(lam[k][l].get_mpz_t(), q.get_mpz_t(), dd[l + 1].get_mpz_t());
    for (size_t i = 0; i < l; ++i)
      mpz_submul(lam[k][i].get_mpz_t(), q.get_mpz_t(), lam[l][i].get_mpz_t());
    ++local.size_reductions;
  };

  size_t kmax = 0;
  gso_row(0);

  auto do_swap = [&](size_t k) {
    std::swap(b[k], b[k - 1]);
    if (transform) std::swap((*transform)[k], (*transform)[k - 1]);
    for (size_t j = 0; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    mpz_class lmb = lam[k][k - 1];
    mpz_class BB = dd[k - 1] * dd[k + 1] + lmb * lmb;
    mpz_divexact(BB.get_mpz_t(), BB.get_mpz_t(), dd[k].get_mpz_t());
    for (size_t i = k + 1; i <= kmax; ++i) {
      mpz_class t = lam[i][k];
      lam[i][k] = dd[k + 1] * lam[i][k - 1] - lmb * t;
      mpz_divexact(lam[i][k].get_mpz_t(), lam[i][k].get_mpz_t(), dd[k].get_mpz_t());
      lam[i][k - 1] = BB * t + lmb * lam[i][k];
      mpz_divexact(lam[i][k - 1].get_mpz_t(), lam[i][k - 1].get_mpz_t(),
                   dd[k + 1].get_mpz_t());
    }
    dd[k] = BB;
    ++local.swaps;
  };

  size_t k = 1;
  while (k < m) {
    if (k > kmax) {
      kmax = k;
      gso_row(k);
    }
    red(k, k - 1);
    // swap when delta*dd[k]^2 > dd[k+1]*dd[k-1] + lam^2
    mpz_class lhs = delta_num * dd[k] * dd[k];
    mpz_class rhs = delta_den * (dd[k + 1] * dd[k - 1] + lam[k][k - 1] * lam[k][k - 1]);
    if (lhs > rhs) {
      do_swap(k);
      k = k > 1 ? k - 1 : 1;
    } else {
      for (size_t l = k - 1; l-- > 0;) red(k, l);
      ++k;
    }
  }
  local.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = local;
}

mpz_class det_bareiss(Basis a) {
  const size_t m = a.size();
  for (const auto& row : a)
    if (row.size() != m) throw std::invalid_argument("det: not square");
  if (m == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < m; ++k) {
    if (sgn(a[k][k]) == 0) {
      size_t piv = k + 1;
      while (piv < m && sgn(a[piv][k]) == 0) ++piv;
      if (piv == m) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < m; ++i) {
      for (size_t j = k + 1; j < m; ++j) {
        a[i][j] = a[k][k] * a[i][j] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[m - 1][m - 1];
}

bool lll_bound_ok(const Basis& b, const mpz_class& abs_det) {
  const size_t m = b.size();
  if (m == 0) return true;
  // ||b_0||^2 <= 2^((m-1)/2) * det^(2/m)
  // <=> (||b_0||^2)^(2m) <= 2^(m(m-1)) * det^4
  mpz_class n2 = norm2_row(b[0]);
  mpz_class lhs, rhs;
  mpz_pow_ui(lhs.get_mpz_t(), n2.get_mpz_t(), 2 * m);
  mpz_class d4;
  mpz_pow_ui(d4.get_mpz_t(), abs_det.get_mpz_t(), 4);
  rhs = d4 << (m * (m - 1));
  return lhs <= rhs;
}

bool is_unimodular(const Basis& u) {
  if (u.empty()) return true;
  for (const auto& row : u)
    if (row.size() != u.size()) return false;
  mpz_class d = det_bareiss(u);
  return d == 1 || d == -1;
}

}  // namespace ecleak
