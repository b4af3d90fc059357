#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "ecleak/rng.hpp"

namespace ecleak {

struct Curve {
  std::string name;
  mpz_class p, a, b;   // y^2 = x^3 + ax + b over F_p
  mpz_class n;         // group order (prime)
  mpz_class gx, gy;    // base point
  int bits;            // scalar register width used by the leakage models
};

// NIST P-256.
const Curve& curve_p256();
// Small curve with prime order 10007; cheap enough for exhaustive checks.
const Curve& curve_toy();
const Curve* find_curve(const std::string& name);

struct Point {
  mpz_class x, y;
  bool inf = true;

  static Point infinity() { return Point{}; }
  static Point affine(mpz_class px, mpz_class py) {
    Point q;
    q.x = std::move(px);
    q.y = std::move(py);
    q.inf = false;
    return q;
  }
  bool operator==(const Point& o) const {
    if (inf || o.inf) return inf == o.inf;
    return x == o.x && y == o.y;
  }
};

bool on_curve(const Curve& c, const Point& pt);
Point point_add(const Curve& c, const Point& p, const Point& q);
Point point_neg(const Curve& c, const Point& p);
Point scalar_mul(const Curve& c, const mpz_class& k, const Point& p);
Point scalar_mul_base(const Curve& c, const mpz_class& k);

struct KeyPair {
  mpz_class d;
  Point pub;
};
KeyPair keygen(const Curve& c, Rng& rng);

enum class Scheme { ecdsa, ecschnorr };
const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from(const std::string& name);

struct Signature {
  mpz_class r, s;
  // 32-byte message value, big-endian integer form. For ECDSA this is the
  // message digest H(m); for ECSchnorr it is the message fed to the
  // commitment hash.
  mpz_class msg;
};

// nullopt when the nonce yields r == 0 or s == 0 and must be redrawn.
std::optional<Signature> sign_with_nonce(const Curve& c, Scheme scheme,
                                         const mpz_class& d,
                                         const mpz_class& msg,
                                         const mpz_class& k);
bool verify(const Curve& c, Scheme scheme, const Point& pub,
            const Signature& sig);
// Nonce from signature plus private key; throws std::invalid_argument when
// the signature is inconsistent with d.
mpz_class recover_nonce(const Curve& c, Scheme scheme, const Signature& sig,
                        const mpz_class& d);

}  // namespace ecleak
