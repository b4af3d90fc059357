#include "ecleak/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "ecleak/bigint.hpp"

namespace ecleak {

std::array<uint8_t, 32> sha256_bytes(const uint8_t* data, size_t len) {
  std::array<uint8_t, 32> out{};
  unsigned int outlen = 0;
  if (EVP_Digest(data, len, out.data(), &outlen, EVP_sha256(), nullptr) != 1 ||
      outlen != 32)
    throw std::runtime_error("sha256: EVP_Digest failed");
  return out;
}

mpz_class sha256_int(const uint8_t* data, size_t len) {
  auto d = sha256_bytes(data, len);
  return mpz_from_be(d.data(), d.size());
}

}  // namespace ecleak
