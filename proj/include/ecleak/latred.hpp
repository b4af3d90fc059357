#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ecleak/hnp.hpp"

namespace ecleak {

struct ReduceOptions {
  std::string algorithm = "lll";  // "lll" | "bkz"
  double delta = 0.99;            // Lovász parameter, (0.25, 1)
  int block = 30;                 // BKZ block size
  int max_rounds = 32;            // BKZ tour limit
  double time_budget_s = 0;       // 0 = unlimited; exceeded => partial result
  bool exact = false;             // force the all-integer LLL path
  uint64_t enum_node_cap = 3000000;  // per-block enumeration budget
  // [0,1]: 1 enumerates blocks exactly, smaller values apply a linear
  // pruning profile (radius scaled down at shallow depths; 0 = pure linear)
  double enum_prune = 1.0;
  // re-attempts per block after a failed enumeration: rerandomize the rows
  // behind the block head with unimodular ops, re-LLL, enumerate again.
  // Recovers most of the quality lost to pruning at a fraction of the cost
  // of a larger block.
  int enum_retries = 0;
};

struct ReduceStats {
  bool partial = false;  // stopped by time/round/node budget before converging
  bool used_exact = false;
  uint64_t swaps = 0;
  uint64_t size_reductions = 0;
  uint64_t enum_nodes = 0;
  int rounds = 0;
  double seconds = 0;
};

// All-integer LLL (exact rational arithmetic via integer Gram/lambda tables).
// delta = delta_num/delta_den. transform, when given, receives the unimodular
// row operations; it must start as the identity (an empty basis is
// initialized to one). Throws std::runtime_error on rank deficiency.
void lll_exact(Basis& b, long delta_num = 99, long delta_den = 100,
               Basis* transform = nullptr, ReduceStats* stats = nullptr);

// Floating-point LLL over an exactly maintained integer Gram matrix.
ReduceStats lll_fp(Basis& b, double delta = 0.99, Basis* transform = nullptr,
                   double time_budget_s = 0);

// BKZ: LLL preprocessing plus bounded Schnorr-Euchner enumeration per block
// with exact unimodular block updates. No transform tracking.
ReduceStats bkz_fp(Basis& b, const ReduceOptions& opt);

// Dispatch on opt.algorithm / opt.exact.
ReduceStats reduce_basis(Basis& b, const ReduceOptions& opt,
                         Basis* transform = nullptr);

mpz_class dot_rows(const std::vector<mpz_class>& a,
                   const std::vector<mpz_class>& b);
mpz_class norm2_row(const std::vector<mpz_class>& a);

// Exact determinant by fraction-free elimination; intended for small bases.
mpz_class det_bareiss(Basis b);

// ||b_0|| <= 2^((m-1)/4) * |det|^(1/m), checked in exact integer arithmetic.
bool lll_bound_ok(const Basis& b, const mpz_class& abs_det);

bool is_unimodular(const Basis& u);

// Key extraction from a reduced basis. Rows (and their negations) whose tie
// coordinate equals the instance weight are decoded to candidate keys; each
// candidate is checked against the public key.
struct ExtractResult {
  std::vector<mpz_class> verified;    // d with d*G == pub
  std::vector<mpz_class> unverified;  // decoded but failed the check
  bool tie_row_found = false;
};
ExtractResult extract_keys(const Curve& curve, const Point& pub,
                           const HnpInstance& inst, const Basis& reduced);

bool verify_key(const Curve& curve, const Point& pub, const mpz_class& d);

}  // namespace ecleak
