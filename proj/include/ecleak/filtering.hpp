#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecleak/leakage.hpp"

namespace ecleak {

// A timing window believed to contain signatures whose nonces have at least
// assumed_lzb leading zero bits. lower is normally 0: anything faster than
// the targeted class comes from a deeper (even more biased) class and still
// satisfies the assumption.
struct BiasClass {
  int assumed_lzb = 0;
  int64_t lower = 0;
  int64_t upper = 0;
};

struct ClassStat {
  int class_lzb = 0;  // intel: zero windows * w; st/constant: exact lzb
  size_t count = 0;
  double median = 0, q1 = 0, q3 = 0;
};

struct ProfileReport {
  LeakModel model = LeakModel::intel_window;
  std::vector<ClassStat> classes;  // ascending class_lzb
  // Median center drop per one class step (w bits for intel, 1 bit for st).
  double unit_spacing = 0;
  // Robust per-class noise scale (median IQR / 1.349).
  double sigma_hat = 0;
  // Set when class centers do not separate beyond the noise scale; a
  // constant-time device yields this.
  bool no_separation = false;
  std::vector<BiasClass> recommended;
};

// Phase 1: samples must carry ground-truth nonce info (true_lzb >= 0),
// obtained by signing with a known key. Throws std::invalid_argument on
// unlabeled samples and std::runtime_error when a targeted class has fewer
// than min_class_count samples.
ProfileReport profile_samples(const std::vector<TimedSample>& labeled,
                              LeakModel model, int scalar_bits, int window_bits,
                              const std::vector<int>& targeted_lzbs,
                              size_t min_class_count = 30,
                              double purity_z = 0.0);

// Window for one class out of an existing report. purity_z > 0 pulls the
// upper edge down by that many sigma_hat for purity at the cost of yield.
BiasClass recommend_class(const ProfileReport& report, int assumed_lzb,
                          double purity_z = 0.0);

// Phase 2: keep samples with lower <= cycles <= upper.
std::vector<TimedSample> classify(const std::vector<TimedSample>& samples,
                                  const BiasClass& cls);

// Fastest m samples, ascending by (cycles, id). Throws when m > samples.
std::vector<TimedSample> sort_fastest(const std::vector<TimedSample>& samples,
                                      size_t m);

// Rescale a window between settings whose timing scales differ (e.g. other
// clock): multiply both edges by ratio.
BiasClass scale_class(const BiasClass& cls, double ratio);

// Attach ground-truth lzb labels by recovering nonces with the private key.
// Throws when any signature is inconsistent with d.
void label_nonces(std::vector<TimedSample>& samples, const Curve& curve,
                  Scheme scheme, const mpz_class& d);

}  // namespace ecleak
