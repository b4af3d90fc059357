#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <random>

#include "ecleak/bigint.hpp"

namespace ecleak {

// Deterministic RNG. Every draw consumes a fixed number of engine words so
// identical seeds replay identical streams regardless of call mix.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

  uint64_t u64() { return gen_(); }

  // Uniform in [0,1) with 53 random bits.
  double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Box-Muller; consumes exactly two engine words per call (modulo the
  // astronomically rare zero rejection).
  double gauss(double sigma) {
    double u1 = unit();
    while (u1 == 0.0) u1 = unit();
    double u2 = unit();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  // Uniform in [0, 2^nbits).
  mpz_class bits(int nbits) {
    mpz_class v = 0;
    int full = nbits / 64, rem = nbits % 64;
    for (int i = 0; i < full; ++i) {
      v <<= 64;
      v += mpz_class(static_cast<unsigned long>(u64()));
    }
    if (rem > 0) {
      v <<= rem;
      v += mpz_class(static_cast<unsigned long>(u64() >> (64 - rem)));
    }
    return v;
  }

  // Uniform in [1, n) by rejection.
  mpz_class scalar(const mpz_class& n) {
    if (n <= 1) throw std::invalid_argument("Rng::scalar: n must be > 1");
    int nb = bit_length(n);
    for (;;) {
      mpz_class v = bits(nb);
      if (v >= 1 && v < n) return v;
    }
  }

  std::array<uint8_t, 32> msg32() {
    std::array<uint8_t, 32> m{};
    for (int i = 0; i < 4; ++i) {
      uint64_t w = u64();
      for (int j = 0; j < 8; ++j) m[8 * i + j] = static_cast<uint8_t>(w >> (56 - 8 * j));
    }
    return m;
  }

  // Independent child stream; deterministic in (seed, stream).
  Rng fork(uint64_t stream) const {
    uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x = x ^ (x >> 31);
    return Rng(x);
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace ecleak
