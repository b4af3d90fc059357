#include "ecleak/ec.hpp"

#include <stdexcept>

#include "ecleak/bigint.hpp"
#include "ecleak/hash.hpp"

namespace ecleak {

const Curve& curve_p256() {
  static const Curve c = [] {
    Curve v;
    v.name = "p256";
    v.p = from_hex("ffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
    v.a = v.p - 3;
    v.b = from_hex("5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b");
    v.n = from_hex("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551");
    v.gx = from_hex("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296");
    v.gy = from_hex("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5");
    v.bits = 256;
    return v;
  }();
  return c;
}

const Curve& curve_toy() {
  static const Curve c = [] {
    Curve v;
    v.name = "toy";
    v.p = 9839;
    v.a = 9836;  // -3
    v.b = 88;
    v.n = 10007;
    v.gx = 2;
    v.gy = 3834;
    v.bits = 16;
    return v;
  }();
  return c;
}

const Curve* find_curve(const std::string& name) {
  if (name == "p256") return &curve_p256();
  if (name == "toy") return &curve_toy();
  return nullptr;
}

const char* scheme_name(Scheme s) {
  return s == Scheme::ecdsa ? "ecdsa" : "ecschnorr";
}

std::optional<Scheme> scheme_from(const std::string& name) {
  if (name == "ecdsa") return Scheme::ecdsa;
  if (name == "ecschnorr") return Scheme::ecschnorr;
  return std::nullopt;
}

namespace {

// Jacobian coordinates: (X, Y, Z) with x = X/Z^2, y = Y/Z^3; Z = 0 encodes
// the point at infinity. All temporaries live in a scratch context so the
// hot loop does no allocation after warmup.
struct JPoint {
  mpz_class X, Y, Z;
};

struct Ctx {
  const Curve& c;
  mpz_class t0, t1, t2, t3, t4, t5, t6, t7, t8;

  explicit Ctx(const Curve& curve) : c(curve) {}

  void redp(mpz_class& v) { mpz_mod(v.get_mpz_t(), v.get_mpz_t(), c.p.get_mpz_t()); }
};

bool jis_inf(const JPoint& p) { return sgn(p.Z) == 0; }

void jset_inf(JPoint& p) {
  p.X = 1;
  p.Y = 1;
  p.Z = 0;
}

void jfrom_affine(JPoint& out, const Point& p) {
  if (p.inf) {
    jset_inf(out);
    return;
  }
  out.X = p.x;
  out.Y = p.y;
  out.Z = 1;
}

// General Jacobian doubling (any a).
void jdbl(Ctx& cx, JPoint& r, const JPoint& p) {
  if (jis_inf(p) || sgn(p.Y) == 0) {
    jset_inf(r);
    return;
  }
  mpz_class& XX = cx.t0;
  mpz_class& YY = cx.t1;
  mpz_class& YYYY = cx.t2;
  mpz_class& ZZ = cx.t3;
  mpz_class& S = cx.t4;
  mpz_class& M = cx.t5;
  mpz_class& T = cx.t6;
  mpz_class& U = cx.t7;

  XX = p.X * p.X;
  cx.redp(XX);
  YY = p.Y * p.Y;
  cx.redp(YY);
  YYYY = YY * YY;
  cx.redp(YYYY);
  ZZ = p.Z * p.Z;
  cx.redp(ZZ);
  // S = 2((X+YY)^2 - XX - YYYY)
  S = p.X + YY;
  U = S * S;
  cx.redp(U);
  S = U - XX - YYYY;
  S <<= 1;
  cx.redp(S);
  // M = 3XX + a ZZ^2
  M = ZZ * ZZ;
  cx.redp(M);
  M *= cx.c.a;
  cx.redp(M);
  M += 3 * XX;
  cx.redp(M);
  // Z3 = (Y+Z)^2 - YY - ZZ  (compute before X/Y overwrite p via aliasing)
  T = p.Y + p.Z;
  U = T * T;
  cx.redp(U);
  U -= YY;
  U -= ZZ;
  cx.redp(U);
  // X3 = M^2 - 2S
  T = M * M;
  cx.redp(T);
  T -= S;
  T -= S;
  cx.redp(T);
  // Y3 = M(S - X3) - 8 YYYY
  r.Y = S - T;
  r.Y *= M;
  r.Y -= YYYY << 3;
  cx.redp(r.Y);
  r.X = T;
  r.Z = U;
}

// General Jacobian addition; falls back to doubling when p == q.
void jadd(Ctx& cx, JPoint& r, const JPoint& p, const JPoint& q) {
  if (jis_inf(p)) {
    r = q;
    return;
  }
  if (jis_inf(q)) {
    r = p;
    return;
  }
  mpz_class& Z1Z1 = cx.t0;
  mpz_class& Z2Z2 = cx.t1;
  mpz_class& U1 = cx.t2;
  mpz_class& U2 = cx.t3;
  mpz_class& S1 = cx.t4;
  mpz_class& S2 = cx.t5;
  mpz_class& H = cx.t6;
  mpz_class& RR = cx.t7;
  mpz_class& V = cx.t8;

  Z1Z1 = p.Z * p.Z;
  cx.redp(Z1Z1);
  Z2Z2 = q.Z * q.Z;
  cx.redp(Z2Z2);
  U1 = p.X * Z2Z2;
  cx.redp(U1);
  U2 = q.X * Z1Z1;
  cx.redp(U2);
  S1 = q.Z * Z2Z2;
  cx.redp(S1);
  S1 *= p.Y;
  cx.redp(S1);
  S2 = p.Z * Z1Z1;
  cx.redp(S2);
  S2 *= q.Y;
  cx.redp(S2);
  if (U1 == U2) {
    if (S1 != S2) {
      jset_inf(r);
      return;
    }
    JPoint t = p;
    jdbl(cx, r, t);
    return;
  }
  H = U2 - U1;
  cx.redp(H);
  // I = (2H)^2, J = H*I
  mpz_class I = H << 1;
  cx.redp(I);
  I *= I;
  cx.redp(I);
  mpz_class J = H * I;
  cx.redp(J);
  RR = S2 - S1;
  RR <<= 1;
  cx.redp(RR);
  V = U1 * I;
  cx.redp(V);
  // X3 = RR^2 - J - 2V
  mpz_class X3 = RR * RR;
  cx.redp(X3);
  X3 -= J;
  X3 -= V;
  X3 -= V;
  cx.redp(X3);
  // Y3 = RR(V - X3) - 2 S1 J
  mpz_class Y3 = V - X3;
  Y3 *= RR;
  cx.redp(Y3);
  S1 *= J;
  cx.redp(S1);
  Y3 -= S1 << 1;
  cx.redp(Y3);
  // Z3 = ((Z1+Z2)^2 - Z1Z1 - Z2Z2) * H
  mpz_class Z3 = p.Z + q.Z;
  Z3 *= Z3;
  cx.redp(Z3);
  Z3 -= Z1Z1;
  Z3 -= Z2Z2;
  cx.redp(Z3);
  Z3 *= H;
  cx.redp(Z3);
  r.X = std::move(X3);
  r.Y = std::move(Y3);
  r.Z = std::move(Z3);
}

Point jto_affine(Ctx& cx, const JPoint& p) {
  if (jis_inf(p)) return Point::infinity();
  mpz_class zi = mod_inv(p.Z, cx.c.p);
  mpz_class zi2 = zi * zi;
  cx.redp(zi2);
  mpz_class x = p.X * zi2;
  cx.redp(x);
  mpz_class y = p.Y * zi2;
  cx.redp(y);
  y *= zi;
  cx.redp(y);
  return Point::affine(std::move(x), std::move(y));
}

// Fixed 4-bit window, left to right.
Point windowed_mul(const Curve& c, const mpz_class& k, const Point& p) {
  if (sgn(k) == 0 || p.inf) return Point::infinity();
  if (sgn(k) < 0) {
    Point r = windowed_mul(c, mpz_class(-k), p);
    return point_neg(c, r);
  }
  Ctx cx(c);
  JPoint table[16];
  jfrom_affine(table[1], p);
  jdbl(cx, table[2], table[1]);
  for (int i = 3; i < 16; ++i) jadd(cx, table[i], table[i - 1], table[1]);

  int nb = bit_length(k);
  int nwin = (nb + 3) / 4;
  JPoint acc;
  jset_inf(acc);
  for (int w = nwin - 1; w >= 0; --w) {
    for (int d = 0; d < 4; ++d) jdbl(cx, acc, acc);
    unsigned long digit = 0;
    for (int bit = 3; bit >= 0; --bit)
      digit = (digit << 1) | mpz_tstbit(k.get_mpz_t(), 4 * w + bit);
    if (digit) jadd(cx, acc, acc, table[digit]);
  }
  return jto_affine(cx, acc);
}

}  // namespace

bool on_curve(const Curve& c, const Point& pt) {
  if (pt.inf) return true;
  if (sgn(pt.x) < 0 || pt.x >= c.p || sgn(pt.y) < 0 || pt.y >= c.p) return false;
  mpz_class lhs = pt.y * pt.y % c.p;
  mpz_class rhs = (pt.x * pt.x % c.p * pt.x + c.a * pt.x + c.b) % c.p;
  return lhs == rhs;
}

Point point_neg(const Curve& c, const Point& p) {
  if (p.inf) return p;
  return Point::affine(p.x, (c.p - p.y) % c.p);
}

Point point_add(const Curve& c, const Point& p, const Point& q) {
  if (p.inf) return q;
  if (q.inf) return p;
  mpz_class lam;
  if (p.x == q.x) {
    if ((p.y + q.y) % c.p == 0) return Point::infinity();
    lam = (3 * p.x * p.x + c.a) % c.p * mod_inv(2 * p.y % c.p, c.p) % c.p;
  } else {
    mpz_class dx = (q.x - p.x) % c.p;
    if (sgn(dx) < 0) dx += c.p;
    lam = (q.y - p.y) % c.p * mod_inv(dx, c.p) % c.p;
    if (sgn(lam) < 0) lam += c.p;
  }
  mpz_class x3 = (lam * lam - p.x - q.x) % c.p;
  if (sgn(x3) < 0) x3 += c.p;
  mpz_class y3 = (lam * (p.x - x3) - p.y) % c.p;
  if (sgn(y3) < 0) y3 += c.p;
  return Point::affine(std::move(x3), std::move(y3));
}

Point scalar_mul(const Curve& c, const mpz_class& k, const Point& p) {
  return windowed_mul(c, k, p);
}

Point scalar_mul_base(const Curve& c, const mpz_class& k) {
  return windowed_mul(c, k, Point::affine(c.gx, c.gy));
}

KeyPair keygen(const Curve& c, Rng& rng) {
  KeyPair kp;
  kp.d = rng.scalar(c.n);
  kp.pub = scalar_mul_base(c, kp.d);
  return kp;
}

namespace {

// r component of an ECSchnorr signature: H(x_R || msg) mod n, both operands
// as 32-byte big-endian strings.
mpz_class schnorr_r(const Curve& c, const mpz_class& xr, const mpz_class& msg) {
  uint8_t buf[64];
  mpz_to_be(xr, buf, 32);
  mpz_to_be(msg, buf + 32, 32);
  return sha256_int(buf, 64) % c.n;
}

}  // namespace

std::optional<Signature> sign_with_nonce(const Curve& c, Scheme scheme,
                                         const mpz_class& d,
                                         const mpz_class& msg,
                                         const mpz_class& k) {
  if (k <= 0 || k >= c.n) throw std::invalid_argument("sign: nonce out of range");
  if (d <= 0 || d >= c.n) throw std::invalid_argument("sign: key out of range");
  Point R = scalar_mul_base(c, k);
  if (R.inf) return std::nullopt;
  Signature sig;
  sig.msg = msg;
  if (scheme == Scheme::ecdsa) {
    sig.r = R.x % c.n;
    if (sgn(sig.r) == 0) return std::nullopt;
    mpz_class e = msg % c.n;
    sig.s = mod_inv(k, c.n) * ((e + sig.r * d) % c.n) % c.n;
    if (sgn(sig.s) == 0) return std::nullopt;
  } else {
    sig.r = schnorr_r(c, R.x, msg);
    if (sgn(sig.r) == 0) return std::nullopt;
    sig.s = (k + sig.r * d) % c.n;
    if (sgn(sig.s) == 0) return std::nullopt;
  }
  return sig;
}

bool verify(const Curve& c, Scheme scheme, const Point& pub,
            const Signature& sig) {
  if (pub.inf || !on_curve(c, pub)) return false;
  if (sig.r <= 0 || sig.r >= c.n || sig.s <= 0 || sig.s >= c.n) return false;
  if (scheme == Scheme::ecdsa) {
    mpz_class e = sig.msg % c.n;
    mpz_class w = mod_inv(sig.s, c.n);
    mpz_class u1 = e * w % c.n;
    mpz_class u2 = sig.r * w % c.n;
    Point X = point_add(c, scalar_mul_base(c, u1), scalar_mul(c, u2, pub));
    if (X.inf) return false;
    return X.x % c.n == sig.r;
  }
  // R' = s*G - r*Q; accept iff H(x_R' || msg) mod n == r.
  Point R = point_add(c, scalar_mul_base(c, sig.s),
                      scalar_mul(c, mpz_class(c.n - sig.r), pub));
  if (R.inf) return false;
  return schnorr_r(c, R.x, sig.msg) == sig.r;
}

mpz_class recover_nonce(const Curve& c, Scheme scheme, const Signature& sig,
                        const mpz_class& d) {
  mpz_class k;
  if (scheme == Scheme::ecdsa) {
    mpz_class e = sig.msg % c.n;
    k = mod_inv(sig.s, c.n) * ((e + sig.r * d) % c.n) % c.n;
  } else {
    k = (sig.s - sig.r * d) % c.n;
    if (sgn(k) < 0) k += c.n;
  }
  if (sgn(k) == 0) throw std::invalid_argument("recover_nonce: zero nonce");
  Point R = scalar_mul_base(c, k);
  bool ok;
  if (scheme == Scheme::ecdsa)
    ok = !R.inf && R.x % c.n == sig.r;
  else
    ok = !R.inf && schnorr_r(c, R.x, sig.msg) == sig.r;
  if (!ok)
    throw std::invalid_argument("recover_nonce: signature inconsistent with key");
  return k;
}

}  // namespace ecleak
