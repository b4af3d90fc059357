#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "ecleak/bigint.hpp"
#include "ecleak/hnp.hpp"
#include "ecleak/latred.hpp"

using namespace ecleak;

namespace {

struct Planted {
  std::vector<TimedSample> samples;
  std::vector<mpz_class> nonces;  // aligned with samples
  mpz_class d;
};

// t signatures with uniform nonces; cycles descend with the sample index so
// the last sample is the fastest.
Planted plant(const Curve& c, Scheme sch, size_t t, uint64_t seed,
              int max_nonce_bits = 0) {
  Planted p;
  Rng rng(seed);
  p.d = rng.scalar(c.n);
  uint64_t id = 0;
  while (p.samples.size() < t) {
    mpz_class k = max_nonce_bits ? rng.bits(max_nonce_bits) : rng.scalar(c.n);
    if (sgn(k) == 0) continue;
    auto sig = sign_with_nonce(c, sch, p.d, rng.bits(c.bits), k);
    if (!sig) continue;
    TimedSample s;
    s.sig = *sig;
    s.cycles = 1000 - static_cast<int64_t>(p.samples.size());
    s.id = id++;
    p.samples.push_back(s);
    p.nonces.push_back(k);
  }
  return p;
}

mpz_class modn(mpz_class v, const mpz_class& n) {
  v %= n;
  if (sgn(v) < 0) v += n;
  return v;
}

}  // namespace

TEST_CASE("relation substitution holds for every variant") {
  // With ground-truth nonces, every emitted relation must vanish:
  //   k_i + A_i*x + B_i == 0 (mod n),
  // where x = d (full) or the pivot nonce (eliminated), all shifted by K/2
  // when recentered.
  for (const Curve* cp : {&curve_toy(), &curve_p256()}) {
    const Curve& c = *cp;
    for (Scheme sch : {Scheme::ecdsa, Scheme::ecschnorr}) {
      for (HnpVariant var : {HnpVariant::full, HnpVariant::eliminated}) {
        for (bool recenter : {false, true}) {
          Planted p = plant(c, sch, 6, 101 + (cp == &curve_toy()));
          HnpInstance inst = build_hnp(c, sch, p.samples, 4, var, recenter);
          mpz_class half = recenter ? mpz_class(inst.K >> 1) : mpz_class(0);

          // locate pivot (fastest = last planted) and the unknown x
          size_t piv = p.samples.size() - 1;
          mpz_class x;
          if (var == HnpVariant::full) {
            x = p.d;
            REQUIRE(inst.A.size() == p.samples.size());
          } else {
            CHECK(inst.pivot_id == p.samples[piv].id);
            CHECK(inst.pivot_r == p.samples[piv].sig.r);
            x = p.nonces[piv] - half;
            REQUIRE(inst.A.size() == p.samples.size() - 1);
          }

          size_t rel = 0;
          for (size_t i = 0; i < p.samples.size(); ++i) {
            if (var == HnpVariant::eliminated && i == piv) continue;
            mpz_class ki = p.nonces[i] - half;
            CHECK(modn(ki + inst.A[rel] * x + inst.B[rel], c.n) == 0);
            ++rel;
          }
          CHECK(inst.K == c.n >> 4);
          CHECK(inst.scalar_bits == c.bits);
          CHECK(inst.sample_ids.size() == p.samples.size());
        }
      }
    }
  }
}

TEST_CASE("pivot is the fastest sample with id tie-break") {
  const Curve& c = curve_toy();
  Planted p = plant(c, Scheme::ecdsa, 5, 7);
  p.samples[1].cycles = 10;  // make sample 1 fastest
  HnpInstance inst =
      build_hnp(c, Scheme::ecdsa, p.samples, 4, HnpVariant::eliminated, false);
  CHECK(inst.pivot_id == p.samples[1].id);

  p.samples[3].cycles = 10;  // tie: lower id (sample 1) still wins
  inst = build_hnp(c, Scheme::ecdsa, p.samples, 4, HnpVariant::eliminated, false);
  CHECK(inst.pivot_id == p.samples[1].id);
}

TEST_CASE("build_hnp input validation") {
  const Curve& c = curve_toy();
  Planted p = plant(c, Scheme::ecdsa, 4, 13);

  std::vector<TimedSample> one{p.samples[0]};
  CHECK_THROWS_AS(build_hnp(c, Scheme::ecdsa, one, 4, HnpVariant::full, false),
                  std::invalid_argument);

  auto dup = p.samples;
  dup.push_back(p.samples[2]);
  CHECK_THROWS_AS(build_hnp(c, Scheme::ecdsa, dup, 4, HnpVariant::full, false),
                  std::invalid_argument);

  auto bad = p.samples;
  bad[0].sig.r = 0;
  CHECK_THROWS_AS(build_hnp(c, Scheme::ecdsa, bad, 4, HnpVariant::full, false),
                  std::invalid_argument);
  bad = p.samples;
  bad[0].sig.s = c.n;
  CHECK_THROWS_AS(build_hnp(c, Scheme::ecdsa, bad, 4, HnpVariant::full, false),
                  std::invalid_argument);

  CHECK_THROWS_AS(build_hnp(c, Scheme::ecdsa, p.samples, 0, HnpVariant::full, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      build_hnp(c, Scheme::ecdsa, p.samples, c.bits, HnpVariant::full, false),
      std::invalid_argument);
}

TEST_CASE("recentering shifts the constant terms") {
  const Curve& c = curve_toy();
  Planted p = plant(c, Scheme::ecdsa, 5, 19);
  for (HnpVariant var : {HnpVariant::full, HnpVariant::eliminated}) {
    HnpInstance plain = build_hnp(c, Scheme::ecdsa, p.samples, 4, var, false);
    HnpInstance rec = build_hnp(c, Scheme::ecdsa, p.samples, 4, var, true);
    mpz_class half = plain.K >> 1;
    REQUIRE(plain.A.size() == rec.A.size());
    for (size_t i = 0; i < plain.A.size(); ++i) {
      CHECK(rec.A[i] == plain.A[i]);
      mpz_class want = var == HnpVariant::full
                           ? mpz_class(plain.B[i] + half)
                           : mpz_class(plain.B[i] + half + plain.A[i] * half);
      CHECK(rec.B[i] == modn(want, c.n));
    }
  }
}

TEST_CASE("basis shape and determinant") {
  const Curve& c = curve_toy();
  Planted p = plant(c, Scheme::ecdsa, 5, 23);
  for (HnpVariant var : {HnpVariant::eliminated, HnpVariant::full}) {
    HnpInstance inst = build_hnp(c, Scheme::ecdsa, p.samples, 4, var, true);
    Basis b = hnp_basis(inst);
    size_t m = inst.A.size();
    REQUIRE(b.size() == m + 2);
    for (const auto& row : b) REQUIRE(row.size() == m + 2);
    // diagonal relation rows, then the unknown row and the constant row
    mpz_class diag = var == HnpVariant::eliminated ? inst.n : inst.n * inst.n;
    for (size_t i = 0; i < m; ++i) {
      CHECK(b[i][i] == diag);
      CHECK(b[i][m] == 0);
      CHECK(b[i][m + 1] == 0);
    }
    CHECK(b[m][m] == (var == HnpVariant::eliminated ? mpz_class(1) : inst.K));
    CHECK(b[m][m + 1] == 0);
    CHECK(b[m + 1][m] == 0);
    CHECK(b[m + 1][m + 1] ==
          (var == HnpVariant::eliminated ? inst.K : inst.n * inst.K));

    CHECK(abs(det_bareiss(b)) == hnp_det(inst));
  }
}

TEST_CASE("target vector lies in the lattice and is short") {
  // Combine basis rows with the ground-truth coefficients; the result must
  // be exactly (-k'_1, ..., -k'_m, x', K) (eliminated) and its entries stay
  // within the nonce bound.
  const Curve& c = curve_toy();
  for (Scheme sch : {Scheme::ecdsa, Scheme::ecschnorr}) {
    // true nonces < 2^9, assumed bias 4 bits: K = n>>4 = 625 > 512
    Planted p = plant(c, sch, 6, 31, 9);
    const int lzb = 4;
    for (bool recenter : {false, true}) {
      HnpInstance inst =
          build_hnp(c, sch, p.samples, lzb, HnpVariant::eliminated, recenter);
      Basis b = hnp_basis(inst);
      size_t m = inst.A.size();
      mpz_class half = recenter ? mpz_class(inst.K >> 1) : mpz_class(0);

      size_t piv = p.samples.size() - 1;
      mpz_class x = p.nonces[piv] - half;

      // integer row coefficients: one per relation row, then x and 1 for
      // the unknown and constant rows
      std::vector<mpz_class> coeff(m + 2, 0);
      std::vector<mpz_class> kprime;
      size_t rel = 0;
      for (size_t i = 0; i < p.samples.size(); ++i) {
        if (i == piv) continue;
        mpz_class kj = p.nonces[i] - half;
        kprime.push_back(kj);
        mpz_class num = kj + inst.A[rel] * x + inst.B[rel];
        REQUIRE(num % inst.n == 0);
        coeff[rel] = -num / inst.n;
        ++rel;
      }
      coeff[m] = x;
      coeff[m + 1] = 1;

      std::vector<mpz_class> comb(m + 2, 0);
      for (size_t row = 0; row < m + 2; ++row)
        for (size_t col = 0; col < m + 2; ++col)
          comb[col] += coeff[row] * b[row][col];

      for (size_t j = 0; j < m; ++j) {
        CHECK(comb[j] == -kprime[j]);
        // shortness: recentered entries live in [-K/2, K/2]
        if (recenter) CHECK(2 * abs(comb[j]) <= inst.K + 1);
      }
      CHECK(comb[m] == x);
      CHECK(comb[m + 1] == inst.K);
    }
  }
}

TEST_CASE("variant names round-trip") {
  HnpVariant v;
  CHECK(hnp_variant_from("full", v));
  CHECK(v == HnpVariant::full);
  CHECK(hnp_variant_from("eliminated", v));
  CHECK(v == HnpVariant::eliminated);
  CHECK_FALSE(hnp_variant_from("partial", v));
  CHECK(std::string(hnp_variant_name(HnpVariant::full)) == "full");
  CHECK(std::string(hnp_variant_name(HnpVariant::eliminated)) == "eliminated");
}
