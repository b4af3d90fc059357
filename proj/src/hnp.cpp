#include "ecleak/hnp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "ecleak/bigint.hpp"

namespace ecleak {

const char* hnp_variant_name(HnpVariant v) {
  return v == HnpVariant::full ? "full" : "eliminated";
}

bool hnp_variant_from(const std::string& name, HnpVariant& out) {
  if (name == "full") out = HnpVariant::full;
  else if (name == "eliminated") out = HnpVariant::eliminated;
  else return false;
  return true;
}

HnpInstance build_hnp(const Curve& curve, Scheme scheme,
                      const std::vector<TimedSample>& samples, int assumed_lzb,
                      HnpVariant variant, bool recenter) {
  const mpz_class& n = curve.n;
  if (samples.size() < 2)
    throw std::invalid_argument("build_hnp: need at least 2 samples");
  if (assumed_lzb <= 0 || assumed_lzb >= curve.bits)
    throw std::invalid_argument("build_hnp: assumed_lzb out of range");

  std::set<std::pair<mpz_class, mpz_class>> seen;
  for (const auto& s : samples) {
    if (!seen.insert({s.sig.r, s.sig.msg}).second)
      throw std::invalid_argument("build_hnp: duplicate sample");
    if (s.sig.r <= 0 || s.sig.r >= n || sgn(s.sig.r % n) == 0)
      throw std::invalid_argument("build_hnp: r not invertible mod n");
    if (s.sig.s <= 0 || s.sig.s >= n)
      throw std::invalid_argument("build_hnp: s not invertible mod n");
  }

  HnpInstance inst;
  inst.scheme = scheme;
  inst.variant = variant;
  inst.recentered = recenter;
  inst.n = n;
  inst.assumed_lzb = assumed_lzb;
  inst.K = n >> assumed_lzb;
  inst.scalar_bits = curve.bits;
  for (const auto& s : samples) inst.sample_ids.push_back(s.id);

  mpz_class half = inst.K >> 1;

  auto reduced = [&](mpz_class v) {
    v %= n;
    if (sgn(v) < 0) v += n;
    return v;
  };

  if (variant == HnpVariant::full) {
    for (const auto& s : samples) {
      mpz_class A, B;
      if (scheme == Scheme::ecdsa) {
        // s*k = h + r*d  =>  k - s^-1*r*d - s^-1*h = 0
        mpz_class si = mod_inv(s.sig.s, n);
        A = reduced(-(si * s.sig.r));
        B = reduced(-(si * (s.sig.msg % n)));
      } else {
        // s = k + r*d  =>  k + r*d - s = 0
        A = reduced(s.sig.r);
        B = reduced(-s.sig.s);
      }
      if (recenter) B = reduced(B + half);
      inst.A.push_back(A);
      inst.B.push_back(B);
    }
    return inst;
  }

  // eliminated: pivot = fastest sample, ties by id
  size_t piv = 0;
  for (size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[piv];
    if (a.cycles < b.cycles || (a.cycles == b.cycles && a.id < b.id)) piv = i;
  }
  const auto& p = samples[piv];
  inst.pivot_r = p.sig.r;
  inst.pivot_s = p.sig.s;
  inst.pivot_msg = p.sig.msg;
  inst.pivot_id = p.id;

  mpz_class r0i = mod_inv(p.sig.r, n);
  mpz_class h0 = p.sig.msg % n;

  for (size_t i = 0; i < samples.size(); ++i) {
    if (i == piv) continue;
    const auto& s = samples[i];
    mpz_class A, B;
    if (scheme == Scheme::ecdsa) {
      // Eliminate d between s_i*k_i = h_i + r_i*d and s_0*k_0 = h_0 + r_0*d:
      //   k_i - s_0*r_0^-1*s_i^-1*r_i * k_0 + s_i^-1*(r_i*r_0^-1*h_0 - h_i) = 0
      mpz_class si = mod_inv(s.sig.s, n);
      A = reduced(-(p.sig.s * r0i % n * si % n * s.sig.r));
      B = reduced(si * (s.sig.r * r0i % n * h0 - s.sig.msg % n));
    } else {
      // From s_i = k_i + r_i*d and s_0 = k_0 + r_0*d:
      //   k_i - r_0^-1*r_i * k_0 + (r_i*r_0^-1*s_0 - s_i) = 0
      A = reduced(-(r0i * s.sig.r));
      B = reduced(s.sig.r * r0i % n * p.sig.s - s.sig.s);
    }
    if (recenter) B = reduced(B + half + A * half);
    inst.A.push_back(A);
    inst.B.push_back(B);
  }
  return inst;
}

Basis hnp_basis(const HnpInstance& inst) {
  size_t m = inst.A.size();  // relation count
  if (m == 0) throw std::invalid_argument("hnp_basis: empty instance");
  size_t dim = m + 2;
  Basis b(dim, std::vector<mpz_class>(dim, 0));
  if (inst.variant == HnpVariant::eliminated) {
    // columns 0..m-1: relations; column m: k_0; column m+1: tie weight K
    for (size_t i = 0; i < m; ++i) b[i][i] = inst.n;
    for (size_t j = 0; j < m; ++j) b[m][j] = inst.A[j];
    b[m][m] = 1;
    for (size_t j = 0; j < m; ++j) b[m + 1][j] = inst.B[j];
    b[m + 1][m + 1] = inst.K;
  } else {
    // scaled by n: columns 0..m-1 relations (weight n each), column m the
    // key coordinate (weight K), column m+1 the tie weight n*K
    for (size_t i = 0; i < m; ++i) b[i][i] = inst.n * inst.n;
    for (size_t j = 0; j < m; ++j) b[m][j] = inst.n * inst.A[j];
    b[m][m] = inst.K;
    for (size_t j = 0; j < m; ++j) b[m + 1][j] = inst.n * inst.B[j];
    b[m + 1][m + 1] = inst.n * inst.K;
  }
  return b;
}

mpz_class hnp_det(const HnpInstance& inst) {
  size_t m = inst.A.size();
  mpz_class det;
  if (inst.variant == HnpVariant::eliminated) {
    mpz_pow_ui(det.get_mpz_t(), inst.n.get_mpz_t(), m);
    det *= inst.K;
  } else {
    mpz_pow_ui(det.get_mpz_t(), inst.n.get_mpz_t(), 2 * m + 1);
    det *= inst.K * inst.K;
  }
  return det;
}

}  // namespace ecleak
