#include "ecleak/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ecleak/bigint.hpp"

namespace ecleak {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

json sample_to_json(const TimedSample& s) {
  json j;
  j["r"] = to_hex(s.sig.r);
  j["s"] = to_hex(s.sig.s);
  j["msg_hash"] = to_hex(s.sig.msg);
  j["cycles"] = s.cycles;
  if (s.true_lzb >= 0) j["lzb"] = s.true_lzb;
  return j;
}

TimedSample sample_from_json(const json& j, uint64_t id) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "r" && k != "s" && k != "msg_hash" && k != "cycles" && k != "lzb")
      throw std::runtime_error("samples: unknown field: " + k);
  }
  TimedSample s;
  s.sig.r = from_hex(j.at("r").get<std::string>());
  s.sig.s = from_hex(j.at("s").get<std::string>());
  s.sig.msg = from_hex(j.at("msg_hash").get<std::string>());
  s.cycles = j.at("cycles").get<int64_t>();
  if (s.cycles <= 0) throw std::runtime_error("samples: cycles must be positive");
  s.true_lzb = j.contains("lzb") ? j["lzb"].get<int>() : -1;
  s.id = id;
  return s;
}

}  // namespace

void write_samples_jsonl(std::ostream& os, const std::vector<TimedSample>& v) {
  for (const auto& s : v) os << sample_to_json(s).dump() << "\n";
}

std::vector<TimedSample> read_samples_jsonl(std::istream& is) {
  std::vector<TimedSample> v;
  std::string line;
  uint64_t id = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    v.push_back(sample_from_json(json::parse(line), id++));
  }
  return v;
}

void save_samples(const std::string& path, const std::vector<TimedSample>& v) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_samples_jsonl(f, v);
}

std::vector<TimedSample> load_samples(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return read_samples_jsonl(f);
}

void save_key(const std::string& path, const KeyFile& k) {
  json j;
  j["curve"] = k.curve;
  if (k.has_private) j["d"] = to_hex(k.d);
  j["qx"] = to_hex(k.qx);
  j["qy"] = to_hex(k.qy);
  write_text_file(path, j.dump(2) + "\n");
}

KeyFile load_key(const std::string& path) {
  json j = json::parse(read_text_file(path));
  KeyFile k;
  k.curve = j.at("curve").get<std::string>();
  if (j.contains("d")) {
    k.has_private = true;
    k.d = from_hex(j["d"].get<std::string>());
  }
  k.qx = from_hex(j.at("qx").get<std::string>());
  k.qy = from_hex(j.at("qy").get<std::string>());
  return k;
}

namespace {

std::string fmt_decimal(double v) {
  if (v == static_cast<double>(llround(v)) && std::fabs(v) < 9e15)
    return std::to_string(llround(v));
  char buf[64];
  snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string profile_to_text(const LeakProfile& p) {
  std::ostringstream os;
  os << "model=" << leak_model_name(p.model) << "\n"
     << "base_cycles=" << fmt_decimal(p.base_cycles) << "\n"
     << "per_window_cycles=" << fmt_decimal(p.per_window_cycles) << "\n"
     << "window_bits=" << p.window_bits << "\n"
     << "per_bit_cycles=" << fmt_decimal(p.per_bit_cycles) << "\n"
     << "sigma_cycles=" << fmt_decimal(p.sigma_cycles) << "\n"
     << "offset_cycles=" << fmt_decimal(p.offset_cycles) << "\n"
     << "freq_hz=" << fmt_decimal(p.freq_hz) << "\n";
  return os.str();
}

LeakProfile profile_from_text(const std::string& text) {
  LeakProfile p;
  bool saw_model = false, saw_base = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("profile: expected key=value, got: " + line);
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "model") {
      if (!leak_model_from(val, p.model))
        throw std::runtime_error("profile: unknown model: " + val);
      saw_model = true;
    } else if (key == "base_cycles") {
      p.base_cycles = std::stod(val);
      saw_base = true;
    } else if (key == "per_window_cycles") {
      p.per_window_cycles = std::stod(val);
    } else if (key == "window_bits") {
      p.window_bits = std::stoi(val);
    } else if (key == "per_bit_cycles") {
      p.per_bit_cycles = std::stod(val);
    } else if (key == "sigma_cycles") {
      p.sigma_cycles = std::stod(val);
    } else if (key == "offset_cycles") {
      p.offset_cycles = std::stod(val);
    } else if (key == "freq_hz") {
      p.freq_hz = std::stod(val);
    } else {
      throw std::runtime_error("profile: unknown key: " + key);
    }
  }
  if (!saw_model || !saw_base)
    throw std::runtime_error("profile: model and base_cycles are required");
  if (p.base_cycles <= 0 || p.freq_hz <= 0 || p.sigma_cycles < 0 ||
      p.window_bits <= 0)
    throw std::runtime_error("profile: invalid parameters");
  return p;
}

void save_profile(const std::string& path, const LeakProfile& p) {
  write_text_file(path, profile_to_text(p));
}

LeakProfile load_profile(const std::string& path) {
  return profile_from_text(read_text_file(path));
}

void write_profile_csv(std::ostream& os, const ProfileReport& rep) {
  os << "class_lzb,count,median,q1,q3\n";
  for (const auto& c : rep.classes)
    os << c.class_lzb << "," << c.count << "," << c.median << "," << c.q1 << ","
       << c.q3 << "\n";
  os << "# model=" << leak_model_name(rep.model)
     << " unit_spacing=" << rep.unit_spacing << " sigma_hat=" << rep.sigma_hat
     << " no_separation=" << (rep.no_separation ? 1 : 0) << "\n";
}

std::string instance_to_json(const HnpInstance& inst) {
  json j;
  j["scheme"] = scheme_name(inst.scheme);
  j["variant"] = hnp_variant_name(inst.variant);
  j["recentered"] = inst.recentered;
  j["n"] = to_hex(inst.n);
  j["assumed_lzb"] = inst.assumed_lzb;
  j["scalar_bits"] = inst.scalar_bits;
  json A = json::array(), B = json::array();
  for (const auto& a : inst.A) A.push_back(to_hex(a));
  for (const auto& b : inst.B) B.push_back(to_hex(b));
  j["A"] = A;
  j["B"] = B;
  j["pivot"] = {{"r", to_hex(inst.pivot_r)},
                {"s", to_hex(inst.pivot_s)},
                {"msg_hash", to_hex(inst.pivot_msg)},
                {"id", inst.pivot_id}};
  j["sample_ids"] = inst.sample_ids;
  return j.dump(2) + "\n";
}

HnpInstance instance_from_json(const std::string& text) {
  json j = json::parse(text);
  HnpInstance inst;
  auto sch = scheme_from(j.at("scheme").get<std::string>());
  if (!sch) throw std::runtime_error("instance: unknown scheme");
  inst.scheme = *sch;
  if (!hnp_variant_from(j.at("variant").get<std::string>(), inst.variant))
    throw std::runtime_error("instance: unknown variant");
  inst.recentered = j.at("recentered").get<bool>();
  inst.n = from_hex(j.at("n").get<std::string>());
  inst.assumed_lzb = j.at("assumed_lzb").get<int>();
  inst.scalar_bits = j.at("scalar_bits").get<int>();
  inst.K = inst.n >> inst.assumed_lzb;
  for (const auto& a : j.at("A")) inst.A.push_back(from_hex(a.get<std::string>()));
  for (const auto& b : j.at("B")) inst.B.push_back(from_hex(b.get<std::string>()));
  if (inst.A.size() != inst.B.size())
    throw std::runtime_error("instance: A/B length mismatch");
  const auto& p = j.at("pivot");
  inst.pivot_r = from_hex(p.at("r").get<std::string>());
  inst.pivot_s = from_hex(p.at("s").get<std::string>());
  inst.pivot_msg = from_hex(p.at("msg_hash").get<std::string>());
  inst.pivot_id = p.at("id").get<uint64_t>();
  if (j.contains("sample_ids"))
    inst.sample_ids = j["sample_ids"].get<std::vector<uint64_t>>();
  return inst;
}

void write_basis(std::ostream& os, const Basis& b) {
  os << b.size() << "\n";
  for (const auto& row : b) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << " ";
      os << to_dec(row[i]);
    }
    os << "\n";
  }
}

Basis read_basis(std::istream& is) {
  size_t dim = 0;
  if (!(is >> dim)) throw std::runtime_error("basis: missing dimension header");
  Basis b(dim, std::vector<mpz_class>(dim));
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) {
      std::string tok;
      if (!(is >> tok)) throw std::runtime_error("basis: truncated matrix");
      b[i][j] = from_dec(tok);
    }
  return b;
}

void save_basis(const std::string& path, const Basis& b) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_basis(f, b);
}

Basis load_basis(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  return read_basis(f);
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& config_json, uint64_t seed) {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["gmp_version"] = gmp_version;
  try {
    j["config"] = json::parse(config_json);
  } catch (...) {
    j["config"] = config_json;
  }
  write_text_file(out_path + ".manifest.json", j.dump(2) + "\n");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace ecleak
