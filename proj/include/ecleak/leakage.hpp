#pragma once

#include <cstdint>
#include <string>

#include "ecleak/ec.hpp"
#include "ecleak/rng.hpp"

namespace ecleak {

// Timing models for the simulated signers:
//  - intel_window: cost drops by per_window_cycles for each all-zero leading
//    w-bit window of the nonce (fixed-window scalar multiplication that skips
//    leading zero windows).
//  - st_linear: cost drops by per_bit_cycles for each leading zero bit
//    (bit-serial scalar multiplication over the nonce's bit length).
//  - constant_time: no nonce dependence.
enum class LeakModel { intel_window, st_linear, constant_time };

const char* leak_model_name(LeakModel m);
bool leak_model_from(const std::string& name, LeakModel& out);

struct LeakProfile {
  LeakModel model = LeakModel::intel_window;
  double base_cycles = 4.82e8;
  double per_window_cycles = 4.0e6;  // intel_window
  int window_bits = 4;               // intel_window
  double per_bit_cycles = 2.0e5;     // st_linear
  double sigma_cycles = 0.0;         // gaussian noise, 0 = deterministic
  double offset_cycles = 0.0;        // constant additive shift (e.g. user-space measurement)
  double freq_hz = 3.6e9;            // device clock; converts cycles to wall time
};

// Presets. The *_system profiles model direct cycle-accurate measurement on
// the device; intel_user adds the constant offset and extra jitter of
// user-space round-trip measurement.
LeakProfile intel_system_profile();
LeakProfile intel_user_profile();
LeakProfile st_system_profile();
LeakProfile constant_time_profile();

// Consecutive all-zero w-bit windows at the most significant end of a
// total_bits-wide register holding k. k = 0 gives total_bits/w.
int zero_msw_windows(const mpz_class& k, int total_bits, int w);
// total_bits - bitlength(k); k = 0 gives total_bits.
int leading_zero_bits(const mpz_class& k, int total_bits);

// Simulated signing latency in cycles, >= 1. sigma == 0 consumes no RNG
// draws, so deterministic streams stay aligned.
int64_t simulate_cycles(const LeakProfile& prof, const mpz_class& k,
                        int scalar_bits, Rng& rng);

struct TimedSample {
  Signature sig;
  int64_t cycles = 0;
  uint64_t id = 0;
  // Ground-truth leading-zero-bit count of the nonce. Known only when the
  // collector owns the key (profiling); -1 otherwise.
  int true_lzb = -1;
};

// A signing device with the timing side channel attached.
class LeakyDevice {
 public:
  LeakyDevice(const Curve& curve, Scheme scheme, mpz_class d,
              const LeakProfile& prof, uint64_t seed);

  // Signs msg with a fresh uniform nonce; redraws internally on the
  // (negligible outside the toy curve) r == 0 / s == 0 rejections.
  TimedSample sign(const mpz_class& msg);

  const Point& pub() const { return pub_; }
  const Curve& curve() const { return *curve_; }
  Scheme scheme() const { return scheme_; }
  const LeakProfile& profile() const { return prof_; }
  uint64_t signed_count() const { return next_id_; }

 private:
  const Curve* curve_;
  Scheme scheme_;
  mpz_class d_;
  Point pub_;
  LeakProfile prof_;
  Rng rng_;
  uint64_t next_id_ = 0;
};

}  // namespace ecleak
