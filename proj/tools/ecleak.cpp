// Command-line front end: key setup, leakage profiling, signature
// collection (local simulation or UDP), filtering, lattice attacks and the
// supporting reports. Every file-producing run drops a manifest next to its
// output.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ecleak/bigint.hpp"
#include "ecleak/ec.hpp"
#include "ecleak/io.hpp"
#include "ecleak/net.hpp"
#include "ecleak/pipeline.hpp"

using namespace ecleak;

namespace {

SigningServer* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

std::string flags_json(std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ",";
    first = false;
    os << "\"" << k << "\":" << v;
  }
  os << "}";
  return os.str();
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

AttackConfig load_config(const std::string& path) {
  return attack_config_from_json(read_text_file(path));
}

// Phase-2 filtering as the attack performs it, for commands that need the
// filtered pool itself (curve).
std::vector<TimedSample> filter_pool(const AttackConfig& cfg,
                                     const std::vector<TimedSample>& pool) {
  if (cfg.filter.mode == "fastest") return sort_fastest(pool, cfg.filter.fastest_m);
  if (cfg.filter.mode == "window") {
    BiasClass bc;
    bc.assumed_lzb = cfg.filter.assumed_lzb;
    bc.lower = cfg.filter.lower;
    bc.upper = cfg.filter.upper;
    return classify(pool, bc);
  }
  if (cfg.filter.mode == "profile") {
    const Curve& curve = *find_curve(cfg.curve);
    auto labeled = collect_phase1_labeled(cfg);
    ProfileReport rep =
        profile_samples(labeled, cfg.profile.model, curve.bits,
                        cfg.profile.window_bits, {cfg.filter.assumed_lzb}, 30,
                        cfg.filter.purity_z);
    if (rep.no_separation)
      throw std::runtime_error("no timing separation between classes");
    return classify(pool, rep.recommended.at(0));
  }
  throw std::runtime_error("unknown filter mode " + cfg.filter.mode);
}

int cmd_keygen(const std::string& curve_name, uint64_t seed,
               const std::string& out) {
  const Curve* c = find_curve(curve_name);
  if (!c) throw std::runtime_error("unknown curve " + curve_name);
  Rng rng(seed);
  KeyPair kp = keygen(*c, rng);
  KeyFile kf;
  kf.curve = c->name;
  kf.has_private = true;
  kf.d = kp.d;
  kf.qx = kp.pub.x;
  kf.qy = kp.pub.y;
  save_key(out, kf);
  write_manifest(out, "keygen",
                 flags_json({{"curve", quoted(c->name)}}), seed);
  std::cout << "wrote " << out << "  Qx=" << to_hex(kf.qx) << "\n";
  return 0;
}

int cmd_serve(const std::string& bind, const std::string& scheme_str,
              const std::string& profile_path, const std::string& key_path,
              double freq_hz, uint64_t seed) {
  auto scheme = scheme_from(scheme_str);
  if (!scheme) throw std::runtime_error("unknown scheme " + scheme_str);
  LeakProfile prof = load_profile(profile_path);
  if (freq_hz > 0) prof.freq_hz = freq_hz;
  KeyFile kf = load_key(key_path);
  if (!kf.has_private) throw std::runtime_error("key file has no private key");
  const Curve* c = find_curve(kf.curve);
  if (!c) throw std::runtime_error("unknown curve " + kf.curve);

  LeakyDevice dev(*c, *scheme, kf.d, prof, seed);
  SigningServer server(bind, std::move(dev));
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  std::cout << "serving " << scheme_str << " on port " << server.bound_port()
            << " (" << leak_model_name(prof.model) << " profile)\n"
            << std::flush;
  server.serve();
  std::cout << "served " << server.requests_served() << " requests, dropped "
            << server.malformed_dropped() << " malformed\n";
  return 0;
}

int cmd_collect(const std::string& config_path, const std::string& target,
                const std::string& key_path, const std::string& profile_path,
                const std::string& scheme_str, size_t count, uint64_t seed,
                int timeout_ms, double freq_hz, double net_sigma,
                const std::string& out) {
  AttackConfig cfg;
  cfg.t = 2;  // unused; keeps the config echo valid for re-parsing
  if (!config_path.empty()) cfg = load_config(config_path);
  if (!target.empty()) {
    cfg.collect.mode = "remote";
    cfg.collect.target = target;
  } else if (config_path.empty()) {
    if (key_path.empty() || profile_path.empty())
      throw std::runtime_error(
          "local collection needs --key-file and --profile (or --config)");
    cfg.collect.mode = "local";
    KeyFile kf = load_key(key_path);
    if (!kf.has_private) throw std::runtime_error("key file has no private key");
    cfg.curve = kf.curve;
    cfg.device_d = kf.d;
    cfg.pub = Point::affine(kf.qx, kf.qy);
    cfg.profile = load_profile(profile_path);
    auto scheme = scheme_from(scheme_str);
    if (!scheme) throw std::runtime_error("unknown scheme " + scheme_str);
    cfg.scheme = *scheme;
  }
  if (count > 0) cfg.collect.count = count;
  if (seed > 0) cfg.seed = seed;
  if (timeout_ms > 0) cfg.collect.timeout_ms = timeout_ms;
  if (freq_hz > 0) cfg.collect.freq_hz = freq_hz;
  if (net_sigma >= 0) cfg.collect.net_sigma_cycles = net_sigma;
  if (cfg.collect.count == 0) throw std::runtime_error("--count must be > 0");

  uint64_t sent = 0;
  auto samples = collect_samples(cfg, &sent);
  save_samples(out, samples);
  write_manifest(out, "collect", attack_config_to_json(cfg), cfg.seed);
  std::cout << "collected " << samples.size() << " samples (" << sent
            << " requests) -> " << out << "\n";
  return 0;
}

int cmd_profile(const std::string& config_path, size_t count,
                std::vector<int> lzbs, size_t min_count,
                const std::string& out) {
  AttackConfig cfg = load_config(config_path);
  if (count > 0) cfg.filter.profile_count = count;
  if (lzbs.empty()) lzbs = {cfg.filter.assumed_lzb};
  const Curve& curve = *find_curve(cfg.curve);

  auto labeled = collect_phase1_labeled(cfg);
  ProfileReport rep =
      profile_samples(labeled, cfg.profile.model, curve.bits,
                      cfg.profile.window_bits, lzbs, min_count,
                      cfg.filter.purity_z);

  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  write_profile_csv(f, rep);
  write_manifest(out, "profile", attack_config_to_json(cfg), cfg.seed);

  std::cout << labeled.size() << " profiling signatures, "
            << rep.classes.size() << " classes, spacing "
            << rep.unit_spacing << " cycles, sigma " << rep.sigma_hat << "\n";
  if (rep.no_separation) {
    std::cout << "no separation between classes; device looks constant-time\n";
    return 1;
  }
  for (const auto& bc : rep.recommended)
    std::cout << "lzb>=" << bc.assumed_lzb << ": keep cycles in [" << bc.lower
              << ", " << bc.upper << "]\n";
  return 0;
}

int cmd_filter(const std::string& in, size_t fastest, int64_t lower,
               int64_t upper, int lzb, const std::string& out) {
  auto samples = load_samples(in);
  std::vector<TimedSample> kept;
  if (fastest > 0) {
    kept = sort_fastest(samples, fastest);
  } else {
    if (upper <= lower) throw std::runtime_error("need --fastest or --lower/--upper");
    BiasClass bc;
    bc.assumed_lzb = lzb;
    bc.lower = lower;
    bc.upper = upper;
    kept = classify(samples, bc);
  }
  save_samples(out, kept);
  write_manifest(out, "filter",
                 flags_json({{"in", quoted(in)},
                             {"fastest", std::to_string(fastest)},
                             {"lower", std::to_string(lower)},
                             {"upper", std::to_string(upper)},
                             {"assumed_lzb", std::to_string(lzb)}}),
                 0);
  std::cout << "kept " << kept.size() << " of " << samples.size() << " -> "
            << out << "\n";
  return 0;
}

int cmd_attack(const std::string& config_path, const std::string& in,
               const std::string& profile_in, const std::string& out) {
  AttackConfig cfg = load_config(config_path);
  ExperimentResult res;
  if (in.empty()) {
    res = run_attack(cfg);
  } else {
    auto pool = load_samples(in);
    std::vector<TimedSample> labeled;
    if (!profile_in.empty())
      labeled = load_samples(profile_in);
    else if (cfg.filter.mode == "profile")
      labeled = collect_phase1_labeled(cfg);
    res = attack_on_pool(cfg, pool, labeled);
  }
  write_text_file(out, result_to_json(res));
  write_manifest(out, "attack", attack_config_to_json(cfg), cfg.seed);
  if (res.success)
    std::cout << "key recovered: d=" << to_hex(res.recovered_d) << "\n";
  else
    std::cout << "all retries exhausted, key not recovered\n";
  std::cout << res.filtered_count << " filtered samples, "
            << res.attempts.size() << " attempts, reduce "
            << res.reduce_s << " s -> " << out << "\n";
  return 0;
}

int cmd_curve(const std::string& config_path, std::vector<size_t> t_values,
              int trials, const std::string& out) {
  AttackConfig cfg = load_config(config_path);
  if (t_values.empty()) throw std::runtime_error("--t is required");

  auto pool = collect_samples(cfg);
  auto filtered = filter_pool(cfg, pool);
  auto pts = success_curve(cfg, filtered, t_values, trials);
  write_text_file(out, curve_to_csv(pts));
  write_manifest(out, "curve", attack_config_to_json(cfg), cfg.seed);
  for (const auto& p : pts)
    std::cout << "t=" << p.t << ": " << p.successes << "/" << p.trials << "\n";
  return 0;
}

int cmd_hist(const std::string& in, int64_t bin_width, const std::string& out) {
  auto samples = load_samples(in);
  auto bins = emit_histogram(samples, bin_width);
  write_text_file(out, histogram_to_csv(bins));
  write_manifest(out, "hist",
                 flags_json({{"in", quoted(in)},
                             {"bin_width", std::to_string(bin_width)}}),
                 0);
  std::cout << bins.size() << " bins -> " << out << "\n";
  return 0;
}

int cmd_budget(int lzb, size_t t, uint64_t yield_num, uint64_t yield_den,
               double rate, const std::string& out) {
  BudgetReport r = budget_report(lzb, t, yield_num, yield_den, rate);
  std::string text = budget_to_json(r);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    write_manifest(out, "budget",
                   flags_json({{"assumed_lzb", std::to_string(lzb)},
                               {"t", std::to_string(t)},
                               {"yield_num", std::to_string(yield_num)},
                               {"yield_den", std::to_string(yield_den)},
                               {"rate_per_min", std::to_string(rate)}}),
                   0);
    std::cout << "total " << to_dec(r.total) << " signatures -> " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timing side-channel lab for EC signing devices"};
  app.require_subcommand(1);

  // keygen
  std::string kg_curve = "p256", kg_out = "key.json";
  uint64_t kg_seed = 1;
  auto* kg = app.add_subcommand("keygen", "generate a signing key pair");
  kg->add_option("--curve", kg_curve, "p256 | toy");
  kg->add_option("--seed", kg_seed, "rng seed");
  kg->add_option("--out", kg_out, "key file (json)")->required();

  // serve
  std::string sv_bind = "127.0.0.1:0", sv_scheme = "ecdsa", sv_profile, sv_key;
  double sv_freq = 0;
  uint64_t sv_seed = 1;
  auto* sv = app.add_subcommand("serve", "run the UDP signing service");
  sv->add_option("--bind", sv_bind, "host:port (port 0 picks one)");
  sv->add_option("--scheme", sv_scheme, "ecdsa | ecschnorr");
  sv->add_option("--profile", sv_profile, "leak profile file")->required();
  sv->add_option("--key-file", sv_key, "key file with private key")->required();
  sv->add_option("--freq-hz", sv_freq, "override profile clock");
  sv->add_option("--seed", sv_seed, "device rng seed");

  // collect
  std::string cl_config, cl_target, cl_key, cl_profile, cl_scheme = "ecdsa";
  std::string cl_out = "samples.jsonl";
  size_t cl_count = 0;
  uint64_t cl_seed = 0;
  int cl_timeout = 0;
  double cl_freq = 0, cl_sigma = -1;
  auto* cl = app.add_subcommand("collect", "collect timed signatures");
  cl->add_option("--config", cl_config, "attack config (json)");
  cl->add_option("--target", cl_target, "remote signer host:port");
  cl->add_option("--key-file", cl_key, "local device key file");
  cl->add_option("--profile", cl_profile, "local device leak profile");
  cl->add_option("--scheme", cl_scheme, "local device scheme");
  cl->add_option("--count", cl_count, "signatures to collect");
  cl->add_option("--seed", cl_seed, "rng seed override");
  cl->add_option("--timeout-ms", cl_timeout, "per-request timeout");
  cl->add_option("--freq-hz", cl_freq, "clock for RTT->cycles");
  cl->add_option("--net-sigma", cl_sigma, "simulated client-side jitter, cycles");
  cl->add_option("--out", cl_out, "output samples (jsonl)")->required();

  // profile
  std::string pf_config, pf_out = "profile_report.csv";
  size_t pf_count = 0, pf_min = 30;
  std::vector<int> pf_lzbs;
  auto* pf = app.add_subcommand("profile", "phase-1 device profiling");
  pf->add_option("--config", pf_config, "attack config (json)")->required();
  pf->add_option("--count", pf_count, "profiling signatures override");
  pf->add_option("--lzb", pf_lzbs, "targeted classes")->delimiter(',');
  pf->add_option("--min-count", pf_min, "min samples per targeted class");
  pf->add_option("--out", pf_out, "report csv")->required();

  // filter
  std::string fl_in, fl_out;
  size_t fl_fastest = 0;
  int64_t fl_lower = 0, fl_upper = 0;
  int fl_lzb = 8;
  auto* fl = app.add_subcommand("filter", "select the biased sample class");
  fl->add_option("--in", fl_in, "input samples (jsonl)")->required();
  fl->add_option("--fastest", fl_fastest, "keep the m fastest");
  fl->add_option("--lower", fl_lower, "window lower edge, cycles");
  fl->add_option("--upper", fl_upper, "window upper edge, cycles");
  fl->add_option("--lzb", fl_lzb, "assumed leading zero bits");
  fl->add_option("--out", fl_out, "output samples (jsonl)")->required();

  // attack
  std::string at_config, at_in, at_profile_in, at_out = "result.json";
  auto* at = app.add_subcommand("attack", "run the key-recovery pipeline");
  at->add_option("--config", at_config, "attack config (json)")->required();
  at->add_option("--in", at_in, "attack an existing sample pool");
  at->add_option("--profile-in", at_profile_in, "labeled phase-1 pool");
  at->add_option("--out", at_out, "result json")->required();

  // curve
  std::string cv_config, cv_out = "curve.csv";
  std::vector<size_t> cv_t;
  int cv_trials = 50;
  auto* cv = app.add_subcommand("curve", "success rate vs lattice size");
  cv->add_option("--config", cv_config, "attack config (json)")->required();
  cv->add_option("--t", cv_t, "lattice sizes")->delimiter(',')->required();
  cv->add_option("--trials", cv_trials, "trials per size");
  cv->add_option("--out", cv_out, "output csv")->required();

  // hist
  std::string hs_in, hs_out = "hist.csv";
  int64_t hs_width = 1000000;
  auto* hs = app.add_subcommand("hist", "timing histogram");
  hs->add_option("--in", hs_in, "input samples (jsonl)")->required();
  hs->add_option("--bin-width", hs_width, "bin width, cycles");
  hs->add_option("--out", hs_out, "output csv")->required();

  // budget
  int bg_lzb = 8;
  size_t bg_t = 0;
  uint64_t bg_num = 1, bg_den = 1;
  double bg_rate = 0;
  std::string bg_out;
  auto* bg = app.add_subcommand("budget", "signature budget arithmetic");
  bg->add_option("--lzb", bg_lzb, "assumed leading zero bits");
  bg->add_option("--t", bg_t, "lattice samples needed")->required();
  bg->add_option("--yield-num", bg_num, "filter yield numerator");
  bg->add_option("--yield-den", bg_den, "filter yield denominator");
  bg->add_option("--rate", bg_rate, "signatures per minute");
  bg->add_option("--out", bg_out, "output json (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (kg->parsed()) return cmd_keygen(kg_curve, kg_seed, kg_out);
    if (sv->parsed())
      return cmd_serve(sv_bind, sv_scheme, sv_profile, sv_key, sv_freq, sv_seed);
    if (cl->parsed())
      return cmd_collect(cl_config, cl_target, cl_key, cl_profile, cl_scheme,
                         cl_count, cl_seed, cl_timeout, cl_freq, cl_sigma,
                         cl_out);
    if (pf->parsed()) return cmd_profile(pf_config, pf_count, pf_lzbs, pf_min, pf_out);
    if (fl->parsed())
      return cmd_filter(fl_in, fl_fastest, fl_lower, fl_upper, fl_lzb, fl_out);
    if (at->parsed()) return cmd_attack(at_config, at_in, at_profile_in, at_out);
    if (cv->parsed()) return cmd_curve(cv_config, cv_t, cv_trials, cv_out);
    if (hs->parsed()) return cmd_hist(hs_in, hs_width, hs_out);
    if (bg->parsed()) return cmd_budget(bg_lzb, bg_t, bg_num, bg_den, bg_rate, bg_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
