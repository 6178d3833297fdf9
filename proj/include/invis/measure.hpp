#pragma once

// Empirical invariant measure: fiber histogram plus base cylinder counts.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invis/skew_system.hpp"

namespace invis {

class EmpiricalMeasure {
 public:
  static constexpr int kBins = 4096;
  static constexpr int kCylinderLength = 8;

  EmpiricalMeasure() : bins_(kBins, 0), cylinders_(1u << kCylinderLength, 0) {}

  static int bin_of(double x) {
    int b = static_cast<int>((x + 1.0) * (kBins / 2.0));
    return b < 0 ? 0 : (b >= kBins ? kBins - 1 : b);
  }
  static double bin_lo(int b) { return -1.0 + 2.0 * b / kBins; }
  static double bin_hi(int b) { return bin_lo(b + 1); }

  /// `word8` packs the base digits omega_0 ... omega_7, omega_0 most significant.
  void record(double x, std::uint32_t word8) {
    ++bins_[bin_of(x)];
    ++cylinders_[word8 & ((1u << kCylinderLength) - 1)];
    ++total_;
  }
  EmpiricalMeasure& merge(const EmpiricalMeasure& other);

  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& bins() const { return bins_; }
  const std::vector<std::uint64_t>& cylinders() const { return cylinders_; }

  /// Count of the cylinder [word] of length len <= 8 (earliest digit most significant).
  std::uint64_t cylinder_count(std::uint32_t word, int len) const;
  /// Count in [lo, hi); both ends must be bin edges.
  std::uint64_t count_between(double lo, double hi) const;

  bool operator==(const EmpiricalMeasure&) const = default;

 private:
  std::vector<std::uint64_t> bins_;
  std::vector<std::uint64_t> cylinders_;
  std::uint64_t total_ = 0;
};

struct SrbReport {
  int word_len = 0;
  std::uint64_t N = 0;
  bool sufficient = false;      // N >= 10^7
  double worst_deviation = 0.0; // max |mass - 2^-len|
  double band = 0.0;            // 5 sqrt(2^-len / N)
  std::string worst_word;
  std::vector<double> masses;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// Cylinder masses of the given length (1..8) against the fair Bernoulli law.
SrbReport srb_marginal_check(const EmpiricalMeasure& measure, int word_len);

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  double lipschitz = 0.0;
};

/// phi = 1 and cos(pi h x) for h = 1..8.
std::vector<TestFunction> default_test_functions();
/// Trapezoid equal to 1 on [lo + ramp, hi - ramp], 0 outside (lo, hi).
TestFunction smoothed_indicator(double lo, double hi, double ramp);

struct TimeSpaceEntry {
  std::string name;
  std::vector<double> averages;  // one per orbit
  double histogram_integral = 0.0;
  double max_pairwise_gap = 0.0;
  double pairwise_band = 0.0;
  double histogram_gap = 0.0;
  double histogram_band = 0.0;
  bool pass = false;
};

struct TimeSpaceReport {
  std::uint64_t N = 0;
  int orbits = 0;
  std::uint64_t burn_in = 0;
  std::vector<TimeSpaceEntry> entries;
  bool pass = false;

  const TimeSpaceEntry* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Birkhoff averages of fiber observables along `orbits` independent
/// orbits of N steps each, compared pairwise and with the histogram integral.
TimeSpaceReport time_vs_space_average(const SkewSystem& sys,
                                      const std::vector<TestFunction>& functions,
                                      std::uint64_t N, std::uint64_t seed, int orbits = 16);

/// Default burn-in max(1000, 8 n^2).
std::uint64_t default_burn_in(int n);

}  // namespace invis
