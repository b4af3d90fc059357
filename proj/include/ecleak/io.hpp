#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ecleak/filtering.hpp"
#include "ecleak/hnp.hpp"
#include "ecleak/latred.hpp"

namespace ecleak {

// Samples: one JSON object per line, {"r","s","msg_hash" (hex), "cycles",
// optional "lzb"}. Unknown keys rejected on read.
void write_samples_jsonl(std::ostream& os, const std::vector<TimedSample>& v);
std::vector<TimedSample> read_samples_jsonl(std::istream& is);
void save_samples(const std::string& path, const std::vector<TimedSample>& v);
std::vector<TimedSample> load_samples(const std::string& path);

// Key file: JSON {"curve","d" (hex, optional),"qx","qy"}.
struct KeyFile {
  std::string curve = "p256";
  bool has_private = false;
  mpz_class d;
  mpz_class qx, qy;
};
void save_key(const std::string& path, const KeyFile& k);
KeyFile load_key(const std::string& path);

// Leak profile as key=value lines with decimal numbers.
std::string profile_to_text(const LeakProfile& p);
LeakProfile profile_from_text(const std::string& text);
void save_profile(const std::string& path, const LeakProfile& p);
LeakProfile load_profile(const std::string& path);

// Profile report as CSV: class_lzb,count,median,q1,q3 rows plus a trailing
// comment with spacing/sigma/no_separation.
void write_profile_csv(std::ostream& os, const ProfileReport& rep);

// HNP instance as JSON (hex-encoded big integers).
std::string instance_to_json(const HnpInstance& inst);
HnpInstance instance_from_json(const std::string& text);

// Basis: first line is the dimension, then one row per line of decimal
// integers.
void write_basis(std::ostream& os, const Basis& b);
Basis read_basis(std::istream& is);
void save_basis(const std::string& path, const Basis& b);
Basis load_basis(const std::string& path);

// Run manifest written next to outputs: configuration echo, seed, versions.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& config_json, uint64_t seed);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ecleak
