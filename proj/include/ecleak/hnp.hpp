#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "ecleak/filtering.hpp"

namespace ecleak {

// Lattice formulation of key recovery from biased nonces. Each signature i
// yields a relation  k_i + A_i*x + B_i = 0 (mod n)  with |k_i| small:
//  - full:        x = d (the private key), one relation per signature.
//  - eliminated:  x = k_0, the nonce of a pivot signature; d is eliminated
//    from every relation, dropping the lattice dimension by one.
// recentered shifts each bounded nonce by K/2 so the unknowns live in
// [-K/2, K/2] instead of [0, K], which halves the effective bound.
enum class HnpVariant { full, eliminated };

const char* hnp_variant_name(HnpVariant v);
bool hnp_variant_from(const std::string& name, HnpVariant& out);

struct HnpInstance {
  Scheme scheme = Scheme::ecdsa;
  HnpVariant variant = HnpVariant::eliminated;
  bool recentered = false;
  mpz_class n;
  int assumed_lzb = 0;
  mpz_class K;  // floor(n / 2^assumed_lzb), bound on the biased nonces
  int scalar_bits = 0;
  std::vector<mpz_class> A, B;  // relation coefficients, reduced mod n
  // Pivot signature (eliminated variant) for recovering d from k_0.
  mpz_class pivot_r, pivot_s, pivot_msg;
  uint64_t pivot_id = 0;
  std::vector<uint64_t> sample_ids;  // all consumed samples incl. pivot
};

// Builds the relation system from filtered samples. For the eliminated
// variant the pivot is the fastest sample (ties by id). Throws
// std::invalid_argument on: fewer than 2 samples, duplicate (r, msg) pairs,
// r or s not invertible mod n, or assumed_lzb outside (0, scalar_bits).
HnpInstance build_hnp(const Curve& curve, Scheme scheme,
                      const std::vector<TimedSample>& samples, int assumed_lzb,
                      HnpVariant variant, bool recenter);

using Basis = std::vector<std::vector<mpz_class>>;

// Integer lattice containing the short target vector that encodes the
// unknowns. Eliminated: dim t+1 for t samples. Full: dim t+2, scaled by n
// throughout so the fractional weight K/n becomes integral.
Basis hnp_basis(const HnpInstance& inst);

// |det| of the lattice spanned by hnp_basis(inst); the construction is
// triangular so this is exact and cheap.
mpz_class hnp_det(const HnpInstance& inst);

}  // namespace ecleak
