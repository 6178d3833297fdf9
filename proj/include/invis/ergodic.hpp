#pragma once

// Long-orbit statistics of the region V = (0, 1/4) and the word audits that
// explain every visit.

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "invis/measure.hpp"
#include "invis/skew_system.hpp"

namespace invis {

inline bool in_V(double x) { return x > 0.0 && x < 0.25; }

/// Membership in I = [-nu, 1 + nu] for a canonical representative in [-1, 1).
inline bool in_I(double x, double nu) { return x >= -nu || x <= -1.0 + nu; }

/// Trailing run of zeros among the consumed digits.
struct BernoulliAudit {
  int n = 0;
  std::uint64_t zero_run = 0;

  void push(int digit) { zero_run = digit ? 0 : zero_run + 1; }
  /// The last n consumed digits are all 0.
  bool enabled() const { return zero_run >= static_cast<std::uint64_t>(n); }
};

/// Tracks the last 2n consumed digits against W = {0...01...1}: `ones` is the
/// trailing run of 1s and `zeros` the run of 0s just before it.
struct SolenoidAudit {
  int n = 0;
  std::uint64_t ones = 0;
  std::uint64_t zeros = 0;

  void push(int digit) {
    if (digit) {
      ++ones;
    } else if (ones > 0) {
      zeros = 1;
      ones = 0;
    } else {
      ++zeros;
    }
  }
  bool enabled() const { return ones + zeros >= 2 * static_cast<std::uint64_t>(n); }
};

/// True iff a V-visit at this point is a violation (the last n digits are not all 0).
inline bool audit_entry_bernoulli(const BernoulliAudit& a) { return !a.enabled(); }
/// True iff a V-visit at this point is a violation (the last 2n digits contain "10").
inline bool audit_entry_solenoid(const SolenoidAudit& a) { return !a.enabled(); }

struct Checkpoint {
  std::uint64_t steps = 0;
  std::uint64_t visits = 0;
  bool operator==(const Checkpoint&) const = default;
};

struct OrbitStats {
  std::uint64_t N = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t visits_V = 0;
  std::uint64_t audited = 0;
  std::uint64_t audit_violations = 0;
  std::uint64_t pattern_hits = 0;    // counted steps whose preceding word enables a visit
  std::uint64_t entry_time = 0;      // largest first time in I over the merged orbits
  std::uint64_t never_entered = 0;   // orbits that never reached I
  std::uint64_t orbits = 0;
  std::array<Checkpoint, 3> checkpoints{};  // N/2, 3N/4, N of every orbit
  EmpiricalMeasure measure;

  OrbitStats& merge(const OrbitStats& other);
  double frequency() const { return N == 0 ? 0.0 : static_cast<double>(visits_V) / N; }
  double limsup_frequency() const;
  double pattern_frequency() const {
    return N == 0 ? 0.0 : static_cast<double>(pattern_hits) / N;
  }
  bool operator==(const OrbitStats&) const = default;
  nlohmann::json to_json() const;
};

struct SimulationConfig {
  std::uint64_t seed = 1;
  std::uint64_t steps = 1'000'000;  // counted steps, summed over shards
  std::int64_t burn_in = -1;        // negative: max(1000, 8 n^2)
  int shards = 16;
  bool start_in_I = true;

  std::uint64_t burn_in_for(int n) const {
    return burn_in < 0 ? default_burn_in(n) : static_cast<std::uint64_t>(burn_in);
  }
  std::uint64_t shard_steps(int shard) const {
    return steps / shards + (static_cast<std::uint64_t>(shard) < steps % shards ? 1 : 0);
  }
};

/// One orbit (seed, shard) driven through step_apply / solenoid_apply.
OrbitStats simulate_orbit_reference(const SkewSystem& sys, std::uint64_t seed,
                                    std::uint64_t shard, std::uint64_t steps,
                                    std::uint64_t burn_in, bool start_in_I = true);

/// Serial reference: every shard in turn, merged in shard order.
OrbitStats simulate_reference(const SkewSystem& sys, const SimulationConfig& config);

/// OpenMP kernel; bit-identical to simulate_reference.
OrbitStats simulate(const SkewSystem& sys, const SimulationConfig& config);
OrbitStats simulate(const SkewSystem& sys, std::uint64_t seed, std::uint64_t N,
                    std::uint64_t burn_in);

/// Starting fiber point of an orbit, uniform on I (or on the circle).
double initial_fiber_point(const FiberMapFamily& fam, std::uint64_t seed,
                           std::uint64_t shard, bool start_in_I);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct InvisibilityReport {
  BaseKind base = BaseKind::Bernoulli;
  int n = 0;
  std::uint64_t N = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t visits = 0;
  std::uint64_t violations = 0;
  double freq = 0.0;
  double limsup = 0.0;
  double pattern_freq = 0.0;
  double epsilon = 0.0;           // 2^-n
  double expected_hits = 0.0;     // N 2^-n
  double bound = 0.0;             // epsilon (1 + 5 / sqrt(expected_hits))
  double structural = 0.0;        // 2^-n, or (2n+1) 2^-2n for the solenoid
  double structural_bound = 0.0;  // structural (1 + 5 / sqrt(N structural))
  bool limsup_within_bound = false;
  bool within_structural = false;
  bool explained = false;         // visits <= pattern hits + violations, violations = 0
  Verdict verdict = Verdict::Inconclusive;

  nlohmann::json to_json() const;
};

InvisibilityReport invisibility_verdict(const OrbitStats& stats, int n, BaseKind base);

struct ExhaustiveAuditReport {
  int n = 0;
  int depth = 0;
  int grid = 0;
  std::uint64_t words = 0;
  std::uint64_t runs = 0;
  std::uint64_t v_visits = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  bool pass() const { return violations == 0; }
  nlohmann::json to_json() const;
};

/// Every word of `depth` digits (plus w-1 history digits) from every start on
/// a uniform grid of I; V-visits at steps k > n are audited.
ExhaustiveAuditReport exhaustive_audit_bernoulli(const SkewSystem& sys, int depth, int grid = 64);

/// Every word of `depth` digits, each followed by all four 2-digit
/// continuations and a random tail, from every grid start in I; V-visits at
/// steps k >= 2n are audited.
ExhaustiveAuditReport exhaustive_audit_solenoid(const SkewSystem& sys, int depth, int grid = 64,
                                                std::uint64_t seed = 1);

struct EntryTimeReport {
  std::uint64_t starts = 0;
  std::uint64_t horizon = 0;
  std::uint64_t not_entered = 0;
  std::uint64_t max_entry = 0;
  double mean_entry = 0.0;
  double fraction_not_entered() const {
    return starts == 0 ? 0.0 : static_cast<double>(not_entered) / starts;
  }
  nlohmann::json to_json() const;
};

/// First time in B x I from random (b, x) with x uniform on the circle.
EntryTimeReport entry_time_study(const SkewSystem& sys, std::uint64_t starts,
                                 std::uint64_t horizon, std::uint64_t seed);

}  // namespace invis
