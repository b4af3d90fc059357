#include <algorithm>

#include "ecleak/bigint.hpp"
#include "ecleak/latred.hpp"

namespace ecleak {

namespace {

// Candidate private key from the k_0 coordinate of a tie row (eliminated
// variant). Returns 0 when the coordinate cannot decode to a valid key.
mpz_class key_from_pivot_nonce(const HnpInstance& inst, mpz_class k0) {
  const mpz_class& n = inst.n;
  if (inst.recentered) k0 += inst.K >> 1;
  k0 %= n;
  if (sgn(k0) < 0) k0 += n;
  if (sgn(k0) == 0) return 0;
  mpz_class r0i = mod_inv(inst.pivot_r, n);
  mpz_class d;
  if (inst.scheme == Scheme::ecdsa) {
    // s0*k0 = h0 + r0*d  =>  d = r0^-1 (s0*k0 - h0)
    d = r0i * (inst.pivot_s * k0 - inst.pivot_msg % n) % n;
  } else {
    // s0 = k0 + r0*d  =>  d = r0^-1 (s0 - k0)
    d = r0i * (inst.pivot_s - k0) % n;
  }
  if (sgn(d) < 0) d += n;
  return d;
}

}  // namespace

ExtractResult extract_keys(const Curve& curve, const Point& pub,
                           const HnpInstance& inst, const Basis& reduced) {
  ExtractResult res;
  const mpz_class& n = inst.n;
  const size_t m = inst.A.size();
  const size_t dim = m + 2;
  mpz_class tie = inst.variant == HnpVariant::eliminated ? inst.K : n * inst.K;

  std::vector<mpz_class> seen;
  auto consider = [&](mpz_class d) {
    if (sgn(d) == 0 || d >= n) return;
    if (std::find(seen.begin(), seen.end(), d) != seen.end()) return;
    seen.push_back(d);
    if (verify_key(curve, pub, d))
      res.verified.push_back(d);
    else
      res.unverified.push_back(d);
  };

  for (const auto& row : reduced) {
    if (row.size() != dim) continue;
    const mpz_class& last = row[dim - 1];
    int neg;
    if (last == tie)
      neg = 0;
    else if (last == -tie)
      neg = 1;
    else
      continue;
    res.tie_row_found = true;
    mpz_class coord = neg ? mpz_class(-row[dim - 2]) : row[dim - 2];
    if (inst.variant == HnpVariant::eliminated) {
      consider(key_from_pivot_nonce(inst, coord));
    } else {
      // coordinate is K*d exactly (scaled lattice); reject non-multiples
      if (sgn(inst.K) != 0 && mpz_divisible_p(coord.get_mpz_t(), inst.K.get_mpz_t())) {
        mpz_class d = coord / inst.K;
        d %= n;
        if (sgn(d) < 0) d += n;
        consider(std::move(d));
      }
    }
  }
  return res;
}

bool verify_key(const Curve& curve, const Point& pub, const mpz_class& d) {
  if (d <= 0 || d >= curve.n) return false;
  return scalar_mul_base(curve, d) == pub;
}

}  // namespace ecleak
