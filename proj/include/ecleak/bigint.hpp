#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>

namespace ecleak {

// Fixed-width big-endian serialization. Throws if v < 0 or v needs more than
// len bytes.
void mpz_to_be(const mpz_class& v, uint8_t* out, size_t len);
mpz_class mpz_from_be(const uint8_t* data, size_t len);

// Lowercase hex without 0x prefix; from_hex accepts optional 0x and upper case.
std::string to_hex(const mpz_class& v);
mpz_class from_hex(const std::string& s);
std::string to_dec(const mpz_class& v);
mpz_class from_dec(const std::string& s);

// Modular inverse; throws std::domain_error when gcd(a, m) != 1.
mpz_class mod_inv(const mpz_class& a, const mpz_class& m);

// Nearest-integer division, den > 0, ties round toward +infinity.
mpz_class round_div(const mpz_class& num, const mpz_class& den);

// Bit length; 0 has length 0.
int bit_length(const mpz_class& v);

// Conversions between mpz and long double keeping ~64 mantissa bits.
// ld_of truncates toward zero; mpz_of_ld rounds to nearest.
long double ld_of(const mpz_class& v);
mpz_class mpz_of_ld(long double x);

}  // namespace ecleak
