#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecleak/leakage.hpp"

namespace ecleak {

// Datagram layouts (big-endian integers):
//   request:  magic "TPMF" | request_id (8) | msg_hash (32)        = 44 bytes
//   response: magic "TPMF" | request_id (8) | r (32) | s (32)      = 76 bytes
constexpr std::array<uint8_t, 4> kWireMagic{0x54, 0x50, 0x4D, 0x46};
constexpr size_t kRequestSize = 44;
constexpr size_t kResponseSize = 76;

struct SignRequest {
  uint64_t request_id = 0;
  std::array<uint8_t, 32> msg_hash{};
};

struct SignResponse {
  uint64_t request_id = 0;
  std::array<uint8_t, 32> r{}, s{};
};

std::vector<uint8_t> encode_request(const SignRequest& rq);
std::vector<uint8_t> encode_response(const SignResponse& rs);
// nullopt on wrong size or bad magic (malformed datagrams are dropped).
std::optional<SignRequest> decode_request(const uint8_t* data, size_t len);
std::optional<SignResponse> decode_response(const uint8_t* data, size_t len);

// UDP signing service. Each valid request is signed by the device; the
// response is delayed by cycles/freq_hz of wall-clock sleep before being
// sent. Malformed datagrams are dropped silently.
class SigningServer {
 public:
  // bind: "host:port"; port 0 picks a free port (see bound_port()).
  SigningServer(const std::string& bind, LeakyDevice device);
  ~SigningServer();

  SigningServer(const SigningServer&) = delete;
  SigningServer& operator=(const SigningServer&) = delete;

  // Blocks until stop() is called from another thread.
  void serve();
  void stop();

  uint16_t bound_port() const { return port_; }
  uint64_t requests_served() const { return served_.load(); }
  uint64_t malformed_dropped() const { return malformed_.load(); }
  const Point& pub() const { return device_.pub(); }

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
  LeakyDevice device_;
  std::atomic<bool> running_{false};
  std::atomic<uint64_t> served_{0}, malformed_{0};
};

struct CollectOptions {
  size_t count = 0;
  int timeout_ms = 1000;
  int max_consecutive_timeouts = 10;  // abort threshold
  double freq_hz = 3.6e9;             // RTT seconds -> cycles conversion
  double net_sigma_cycles = 0;        // extra client-side jitter (simulated)
  uint64_t seed = 1;
};

struct CollectOutcome {
  std::vector<TimedSample> samples;
  uint64_t requests_sent = 0;  // every request costs the device a signature
  uint64_t retries = 0;        // timed-out requests that were re-issued
};

// Collects `count` timed signatures from a remote signer. Each timeout
// re-issues a fresh request (new id, new message); the timed-out sample's
// timing is discarded. Aborts with std::runtime_error after
// max_consecutive_timeouts timeouts in a row.
CollectOutcome collect_remote(const std::string& target,
                              const CollectOptions& opt);

}  // namespace ecleak
