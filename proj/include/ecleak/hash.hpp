#pragma once

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ecleak {

std::array<uint8_t, 32> sha256_bytes(const uint8_t* data, size_t len);

inline std::array<uint8_t, 32> sha256_bytes(const std::vector<uint8_t>& v) {
  return sha256_bytes(v.data(), v.size());
}

// Digest interpreted as a big-endian integer.
mpz_class sha256_int(const uint8_t* data, size_t len);

}  // namespace ecleak
