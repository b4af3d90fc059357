#include "ecleak/leakage.hpp"

#include <cmath>
#include <stdexcept>

#include "ecleak/bigint.hpp"

namespace ecleak {

const char* leak_model_name(LeakModel m) {
  switch (m) {
    case LeakModel::intel_window: return "intel_window";
    case LeakModel::st_linear: return "st_linear";
    case LeakModel::constant_time: return "constant_time";
  }
  return "?";
}

bool leak_model_from(const std::string& name, LeakModel& out) {
  if (name == "intel_window") out = LeakModel::intel_window;
  else if (name == "st_linear") out = LeakModel::st_linear;
  else if (name == "constant_time") out = LeakModel::constant_time;
  else return false;
  return true;
}

LeakProfile intel_system_profile() {
  LeakProfile p;
  p.model = LeakModel::intel_window;
  p.base_cycles = 4.82e8;
  p.per_window_cycles = 4.0e6;
  p.window_bits = 4;
  p.sigma_cycles = 5.0e5;
  p.offset_cycles = 0.0;
  return p;
}

LeakProfile intel_user_profile() {
  LeakProfile p = intel_system_profile();
  p.offset_cycles = 1.5e7;
  p.sigma_cycles = 3.0e6;
  return p;
}

LeakProfile st_system_profile() {
  LeakProfile p;
  p.model = LeakModel::st_linear;
  p.base_cycles = 8.7e7;
  p.per_bit_cycles = 2.0e5;
  p.sigma_cycles = 1.2e5;
  return p;
}

LeakProfile constant_time_profile() {
  LeakProfile p;
  p.model = LeakModel::constant_time;
  p.base_cycles = 4.82e8;
  p.sigma_cycles = 5.0e5;
  return p;
}

int zero_msw_windows(const mpz_class& k, int total_bits, int w) {
  if (w <= 0 || total_bits % w != 0)
    throw std::invalid_argument("zero_msw_windows: register width not a multiple of w");
  int nwin = total_bits / w;
  int bl = bit_length(k);
  if (bl > total_bits)
    throw std::invalid_argument("zero_msw_windows: scalar wider than register");
  int used = (bl + w - 1) / w;
  return nwin - used;
}

int leading_zero_bits(const mpz_class& k, int total_bits) {
  int bl = bit_length(k);
  if (bl > total_bits)
    throw std::invalid_argument("leading_zero_bits: scalar wider than register");
  return total_bits - bl;
}

int64_t simulate_cycles(const LeakProfile& prof, const mpz_class& k,
                        int scalar_bits, Rng& rng) {
  double t = prof.base_cycles;
  switch (prof.model) {
    case LeakModel::intel_window:
      t -= zero_msw_windows(k, scalar_bits, prof.window_bits) * prof.per_window_cycles;
      break;
    case LeakModel::st_linear:
      t -= leading_zero_bits(k, scalar_bits) * prof.per_bit_cycles;
      break;
    case LeakModel::constant_time:
      break;
  }
  t += prof.offset_cycles;
  if (prof.sigma_cycles > 0.0) t += rng.gauss(prof.sigma_cycles);
  int64_t cycles = llround(t);
  return cycles < 1 ? 1 : cycles;
}

LeakyDevice::LeakyDevice(const Curve& curve, Scheme scheme, mpz_class d,
                         const LeakProfile& prof, uint64_t seed)
    : curve_(&curve),
      scheme_(scheme),
      d_(std::move(d)),
      prof_(prof),
      rng_(seed) {
  if (d_ <= 0 || d_ >= curve.n)
    throw std::invalid_argument("LeakyDevice: key out of range");
  pub_ = scalar_mul_base(curve, d_);
}

TimedSample LeakyDevice::sign(const mpz_class& msg) {
  for (;;) {
    mpz_class k = rng_.scalar(curve_->n);
    auto sig = sign_with_nonce(*curve_, scheme_, d_, msg, k);
    if (!sig) continue;
    TimedSample out;
    out.sig = std::move(*sig);
    out.cycles = simulate_cycles(prof_, k, curve_->bits, rng_);
    out.id = next_id_++;
    out.true_lzb = leading_zero_bits(k, curve_->bits);
    return out;
  }
}

}  // namespace ecleak
