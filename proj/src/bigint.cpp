#include "ecleak/bigint.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ecleak {

void mpz_to_be(const mpz_class& v, uint8_t* out, size_t len) {
  if (sgn(v) < 0) throw std::invalid_argument("mpz_to_be: negative value");
  size_t need = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (sgn(v) == 0) need = 0;
  if (need > len) throw std::invalid_argument("mpz_to_be: value too wide");
  std::memset(out, 0, len);
  size_t written = 0;
  mpz_export(out + (len - need), &written, 1, 1, 1, 0, v.get_mpz_t());
}

mpz_class mpz_from_be(const uint8_t* data, size_t len) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, data);
  return v;
}

std::string to_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class from_hex(const std::string& s) {
  std::string t = s;
  if (t.rfind("0x", 0) == 0 || t.rfind("0X", 0) == 0) t = t.substr(2);
  mpz_class v;
  if (t.empty() || mpz_set_str(v.get_mpz_t(), t.c_str(), 16) != 0)
    throw std::invalid_argument("from_hex: bad literal: " + s);
  return v;
}

std::string to_dec(const mpz_class& v) { return v.get_str(10); }

mpz_class from_dec(const std::string& s) {
  mpz_class v;
  if (s.empty() || mpz_set_str(v.get_mpz_t(), s.c_str(), 10) != 0)
    throw std::invalid_argument("from_dec: bad literal: " + s);
  return v;
}

mpz_class mod_inv(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inv: not invertible");
  return r;
}

mpz_class round_div(const mpz_class& num, const mpz_class& den) {
  if (sgn(den) <= 0) throw std::invalid_argument("round_div: den must be > 0");
  mpz_class q;
  mpz_class t = 2 * num + den;
  mpz_fdiv_q(q.get_mpz_t(), t.get_mpz_t(), mpz_class(2 * den).get_mpz_t());
  return q;
}

int bit_length(const mpz_class& v) {
  if (sgn(v) == 0) return 0;
  return static_cast<int>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

long double ld_of(const mpz_class& v) {
  int s = sgn(v);
  if (s == 0) return 0.0L;
  mpz_class a = abs(v);
  size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
  if (bits <= 64) {
    unsigned long lo = mpz_get_ui(a.get_mpz_t());
    long double r = static_cast<long double>(lo);
    if (bits > 8 * sizeof(unsigned long)) r = ldexpl(1.0L, (int)bits);  // unreachable on LP64
    return s < 0 ? -r : r;
  }
  mpz_class top = a >> (bits - 64);
  long double r = ldexpl(static_cast<long double>(mpz_get_ui(top.get_mpz_t())),
                         static_cast<int>(bits - 64));
  return s < 0 ? -r : r;
}

mpz_class mpz_of_ld(long double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("mpz_of_ld: non-finite");
  if (std::fabs(x) < 0.5L) return 0;
  int e = 0;
  long double m = frexpl(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
  if (e <= 60) return mpz_class(static_cast<long>(llroundl(x)));
  long long top = llroundl(ldexpl(m, 63));
  mpz_class r(static_cast<long>(top));
  return r << (e - 63);
}

}  // namespace ecleak
