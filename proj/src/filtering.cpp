#include "ecleak/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace ecleak {

namespace {

double quantile(std::vector<double>& v, double q) {
  // linear interpolation between order statistics; v becomes sorted
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0;
  double h = q * (static_cast<double>(v.size()) - 1);
  size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

double median_of(std::vector<double> v) { return quantile(v, 0.5); }

int class_of_lzb(LeakModel model, int lzb, int scalar_bits, int window_bits) {
  if (model == LeakModel::intel_window) {
    // lzb leading zero bits leave a (scalar_bits - lzb)-bit value; the class
    // is the count of whole zero windows above it, in bits.
    int bl = scalar_bits - lzb;
    int nwin = scalar_bits / window_bits;
    int used = (bl + window_bits - 1) / window_bits;
    return (nwin - used) * window_bits;
  }
  return lzb;
}

}  // namespace

ProfileReport profile_samples(const std::vector<TimedSample>& labeled,
                              LeakModel model, int scalar_bits, int window_bits,
                              const std::vector<int>& targeted_lzbs,
                              size_t min_class_count, double purity_z) {
  if (model == LeakModel::intel_window &&
      (window_bits <= 0 || scalar_bits % window_bits != 0))
    throw std::invalid_argument("profile: bad window width");
  std::map<int, std::vector<double>> byclass;
  for (const auto& s : labeled) {
    if (s.true_lzb < 0)
      throw std::invalid_argument("profile: samples must be nonce-labeled");
    byclass[class_of_lzb(model, s.true_lzb, scalar_bits, window_bits)].push_back(
        static_cast<double>(s.cycles));
  }
  ProfileReport rep;
  rep.model = model;
  for (auto& [cls, vals] : byclass) {
    ClassStat st;
    st.class_lzb = cls;
    st.count = vals.size();
    st.median = quantile(vals, 0.5);
    st.q1 = quantile(vals, 0.25);
    st.q3 = quantile(vals, 0.75);
    rep.classes.push_back(st);
  }

  int unit = model == LeakModel::intel_window ? window_bits : 1;
  std::vector<double> spacings, iqrs;
  for (size_t i = 0; i + 1 < rep.classes.size(); ++i) {
    const auto& a = rep.classes[i];
    const auto& b = rep.classes[i + 1];
    if (a.count < min_class_count || b.count < min_class_count) continue;
    double steps = static_cast<double>(b.class_lzb - a.class_lzb) / unit;
    spacings.push_back((a.median - b.median) / steps);
  }
  for (const auto& c : rep.classes)
    if (c.count >= min_class_count) iqrs.push_back(c.q3 - c.q1);
  rep.unit_spacing = spacings.empty() ? 0.0 : median_of(spacings);
  rep.sigma_hat = iqrs.empty() ? 0.0 : median_of(iqrs) / 1.349;
  rep.no_separation = rep.unit_spacing <= rep.sigma_hat || spacings.empty();

  for (int lzb : targeted_lzbs) {
    int cls = class_of_lzb(model, lzb, scalar_bits, window_bits);
    auto it = std::find_if(rep.classes.begin(), rep.classes.end(),
                           [&](const ClassStat& c) { return c.class_lzb == cls; });
    if (it == rep.classes.end() || it->count < min_class_count)
      throw std::runtime_error("profile: insufficient samples in class " +
                               std::to_string(cls));
    BiasClass bc;
    bc.assumed_lzb = cls;
    bc.lower = 0;
    bc.upper = static_cast<int64_t>(
        std::llround(it->median + rep.unit_spacing / 2 - purity_z * rep.sigma_hat));
    rep.recommended.push_back(bc);
  }
  return rep;
}

BiasClass recommend_class(const ProfileReport& report, int assumed_lzb,
                          double purity_z) {
  for (const auto& c : report.classes) {
    if (c.class_lzb != assumed_lzb) continue;
    BiasClass bc;
    bc.assumed_lzb = assumed_lzb;
    bc.lower = 0;
    bc.upper = static_cast<int64_t>(std::llround(
        c.median + report.unit_spacing / 2 - purity_z * report.sigma_hat));
    return bc;
  }
  throw std::runtime_error("recommend_class: class not present in report");
}

std::vector<TimedSample> classify(const std::vector<TimedSample>& samples,
                                  const BiasClass& cls) {
  std::vector<TimedSample> kept;
  for (const auto& s : samples)
    if (s.cycles >= cls.lower && s.cycles <= cls.upper) kept.push_back(s);
  return kept;
}

std::vector<TimedSample> sort_fastest(const std::vector<TimedSample>& samples,
                                      size_t m) {
  if (m > samples.size())
    throw std::invalid_argument("sort_fastest: m exceeds sample count");
  std::vector<TimedSample> out = samples;
  std::sort(out.begin(), out.end(), [](const TimedSample& a, const TimedSample& b) {
    if (a.cycles != b.cycles) return a.cycles < b.cycles;
    return a.id < b.id;
  });
  out.resize(m);
  return out;
}

BiasClass scale_class(const BiasClass& cls, double ratio) {
  if (ratio <= 0) throw std::invalid_argument("scale_class: ratio must be > 0");
  BiasClass out = cls;
  out.lower = static_cast<int64_t>(std::llround(static_cast<double>(cls.lower) * ratio));
  out.upper = static_cast<int64_t>(std::llround(static_cast<double>(cls.upper) * ratio));
  return out;
}

void label_nonces(std::vector<TimedSample>& samples, const Curve& curve,
                  Scheme scheme, const mpz_class& d) {
  for (auto& s : samples) {
    mpz_class k = recover_nonce(curve, scheme, s.sig, d);
    s.true_lzb = leading_zero_bits(k, curve.bits);
  }
}

}  // namespace ecleak
