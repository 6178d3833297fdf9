#include "invis/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace invis {

EmpiricalMeasure& EmpiricalMeasure::merge(const EmpiricalMeasure& other) {
  for (int b = 0; b < kBins; ++b) bins_[b] += other.bins_[b];
  for (std::size_t c = 0; c < cylinders_.size(); ++c) cylinders_[c] += other.cylinders_[c];
  total_ += other.total_;
  return *this;
}

std::uint64_t EmpiricalMeasure::cylinder_count(std::uint32_t word, int len) const {
  if (len < 1 || len > kCylinderLength)
    throw std::invalid_argument("cylinder_count: length must be in [1, 8]");
  const int free = kCylinderLength - len;
  const std::uint32_t first = word << free;
  std::uint64_t c = 0;
  for (std::uint32_t tail = 0; tail < (1u << free); ++tail) c += cylinders_[first | tail];
  return c;
}

std::uint64_t EmpiricalMeasure::count_between(double lo, double hi) const {
  const double blo = (lo + 1.0) * (kBins / 2.0);
  const double bhi = (hi + 1.0) * (kBins / 2.0);
  if (blo != std::floor(blo) || bhi != std::floor(bhi) || blo < 0 || bhi > kBins || blo > bhi)
    throw std::invalid_argument("count_between: endpoints must be bin edges in [-1, 1]");
  std::uint64_t c = 0;
  for (int b = static_cast<int>(blo); b < static_cast<int>(bhi); ++b) c += bins_[b];
  return c;
}

nlohmann::json SrbReport::to_json() const {
  return {{"word_len", word_len}, {"N", N},           {"sufficient", sufficient},
          {"worst_deviation", worst_deviation},       {"band", band},
          {"worst_word", worst_word},                 {"pass", pass}};
}

SrbReport srb_marginal_check(const EmpiricalMeasure& measure, int word_len) {
  if (word_len < 1 || word_len > EmpiricalMeasure::kCylinderLength)
    throw std::invalid_argument("srb_marginal_check: word length must be in [1, 8]");
  SrbReport r;
  r.word_len = word_len;
  r.N = measure.total();
  r.sufficient = r.N >= 10'000'000ULL;
  const double p = std::ldexp(1.0, -word_len);
  r.band = r.N == 0 ? 0.0 : 5.0 * std::sqrt(p / static_cast<double>(r.N));
  r.worst_deviation = r.N == 0 ? 1.0 : 0.0;
  for (std::uint32_t w = 0; w < (1u << word_len); ++w) {
    const double mass =
        r.N == 0 ? 0.0 : static_cast<double>(measure.cylinder_count(w, word_len)) / r.N;
    r.masses.push_back(mass);
    const double dev = std::abs(mass - p);
    if (dev >= r.worst_deviation) {
      r.worst_deviation = dev;
      std::string s;
      for (int i = word_len - 1; i >= 0; --i) s.push_back(((w >> i) & 1u) ? '1' : '0');
      r.worst_word = s;
    }
  }
  r.pass = r.N > 0 && r.worst_deviation <= r.band;
  return r;
}

std::vector<TestFunction> default_test_functions() {
  std::vector<TestFunction> fs;
  fs.push_back({"one", [](double) { return 1.0; }, 0.0});
  for (int h = 1; h <= 8; ++h) {
    const double k = std::numbers::pi * h;
    fs.push_back({"cos" + std::to_string(h), [k](double x) { return std::cos(k * x); }, k});
  }
  return fs;
}

TestFunction smoothed_indicator(double lo, double hi, double ramp) {
  if (!(ramp > 0.0) || 2.0 * ramp > hi - lo)
    throw std::invalid_argument("smoothed_indicator: need 0 < ramp <= (hi - lo) / 2");
  return {"smoothed_indicator",
          [lo, hi, ramp](double x) {
            if (x <= lo || x >= hi) return 0.0;
            return std::min({1.0, (x - lo) / ramp, (hi - x) / ramp});
          },
          1.0 / ramp};
}

const TimeSpaceEntry* TimeSpaceReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

nlohmann::json TimeSpaceReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries)
    arr.push_back({{"name", e.name},
                   {"averages", e.averages},
                   {"histogram_integral", e.histogram_integral},
                   {"max_pairwise_gap", e.max_pairwise_gap},
                   {"pairwise_band", e.pairwise_band},
                   {"histogram_gap", e.histogram_gap},
                   {"histogram_band", e.histogram_band},
                   {"pass", e.pass}});
  return {{"N", N}, {"orbits", orbits}, {"burn_in", burn_in}, {"pass", pass}, {"functions", arr}};
}

std::uint64_t default_burn_in(int n) {
  return std::max<std::uint64_t>(1000, 8ULL * static_cast<std::uint64_t>(n) * n);
}

TimeSpaceReport time_vs_space_average(const SkewSystem& sys,
                                      const std::vector<TestFunction>& functions,
                                      std::uint64_t N, std::uint64_t seed, int orbits) {
  if (N == 0 || orbits < 2)
    throw std::invalid_argument("time_vs_space_average: need N >= 1 and at least 2 orbits");
  const std::size_t F = functions.size();
  const FiberMapFamily& fam = sys.family();
  const std::uint64_t burn = default_burn_in(fam.n);
  std::vector<std::vector<double>> sums(orbits, std::vector<double>(F, 0.0));
  std::vector<EmpiricalMeasure> hist(orbits);

#pragma omp parallel for schedule(dynamic, 1)
  for (int o = 0; o < orbits; ++o) {
    BitStream xs(mix64(seed) ^ 0x5851F42D4C957F2DULL, static_cast<std::uint64_t>(o));
    const double x0 = fam.I.lo + (fam.I.hi - fam.I.lo) * xs.next_uniform();
    auto observe = [&](double x) {
      for (std::size_t j = 0; j < F; ++j) sums[o][j] += functions[j].f(x);
      hist[o].record(x, 0);
    };
    if (sys.base() == BaseKind::Bernoulli) {
      BernoulliState s = BernoulliState::start(BitStream(seed, static_cast<std::uint64_t>(o)), x0);
      for (std::uint64_t k = 0; k < burn; ++k) step_apply(sys, s);
      for (std::uint64_t k = 0; k < N; ++k) {
        step_apply(sys, s);
        observe(s.x);
      }
    } else {
      SolenoidState s{SolenoidPoint::from_stream(BitStream(seed, static_cast<std::uint64_t>(o))),
                      wrap_circle(x0)};
      for (std::uint64_t k = 0; k < burn; ++k) solenoid_apply_unchecked(sys, s);
      for (std::uint64_t k = 0; k < N; ++k) {
        solenoid_apply_unchecked(sys, s);
        observe(s.x);
      }
    }
  }

  EmpiricalMeasure merged;
  for (const auto& h : hist) merged.merge(h);
  TimeSpaceReport r;
  r.N = N;
  r.orbits = orbits;
  r.burn_in = burn;
  r.pass = true;
  const double width = fam.I.length();
  const double bin_w = 2.0 / EmpiricalMeasure::kBins;
  for (std::size_t j = 0; j < F; ++j) {
    TimeSpaceEntry e;
    e.name = functions[j].name;
    double mean = 0.0;
    for (int o = 0; o < orbits; ++o) {
      e.averages.push_back(sums[o][j] / static_cast<double>(N));
      mean += e.averages.back();
    }
    mean /= orbits;
    for (int a = 0; a < orbits; ++a)
      for (int b = a + 1; b < orbits; ++b)
        e.max_pairwise_gap = std::max(e.max_pairwise_gap, std::abs(e.averages[a] - e.averages[b]));
    double integral = 0.0;
    for (int b = 0; b < EmpiricalMeasure::kBins; ++b)
      integral += static_cast<double>(merged.bins()[b]) *
                  functions[j].f(0.5 * (EmpiricalMeasure::bin_lo(b) + EmpiricalMeasure::bin_hi(b)));
    e.histogram_integral = integral / static_cast<double>(merged.total());
    e.histogram_gap = std::abs(e.histogram_integral - mean);
    const double lip = functions[j].lipschitz;
    e.pairwise_band = 5.0 * lip * width / std::sqrt(static_cast<double>(N)) + 1e-12;
    e.histogram_band = lip * bin_w / 2.0 + 1e-12;
    e.pass = e.max_pairwise_gap <= e.pairwise_band && e.histogram_gap <= e.histogram_band;
    r.pass = r.pass && e.pass;
    r.entries.push_back(std::move(e));
  }
  return r;
}

}  // namespace invis
