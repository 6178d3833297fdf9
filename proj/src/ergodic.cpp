#include "invis/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invis {

OrbitStats& OrbitStats::merge(const OrbitStats& o) {
  if (orbits == 0) burn_in = o.burn_in;
  N += o.N;
  visits_V += o.visits_V;
  audited += o.audited;
  audit_violations += o.audit_violations;
  pattern_hits += o.pattern_hits;
  entry_time = std::max(entry_time, o.entry_time);
  never_entered += o.never_entered;
  orbits += o.orbits;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    checkpoints[i].steps += o.checkpoints[i].steps;
    checkpoints[i].visits += o.checkpoints[i].visits;
  }
  measure.merge(o.measure);
  return *this;
}

double OrbitStats::limsup_frequency() const {
  double m = 0.0;
  for (const auto& c : checkpoints)
    if (c.steps > 0) m = std::max(m, static_cast<double>(c.visits) / c.steps);
  return m;
}

nlohmann::json OrbitStats::to_json() const {
  nlohmann::json cps = nlohmann::json::array();
  for (const auto& c : checkpoints) cps.push_back({{"steps", c.steps}, {"visits", c.visits}});
  return {{"N", N},
          {"burn_in", burn_in},
          {"visits_V", visits_V},
          {"audited", audited},
          {"audit_violations", audit_violations},
          {"pattern_hits", pattern_hits},
          {"entry_time", entry_time},
          {"never_entered", never_entered},
          {"orbits", orbits},
          {"checkpoints", cps},
          {"freq_V", frequency()},
          {"limsup_freq", limsup_frequency()}};
}

double initial_fiber_point(const FiberMapFamily& fam, std::uint64_t seed, std::uint64_t shard,
                           bool start_in_I) {
  BitStream xs(mix64(seed) ^ 0x5851F42D4C957F2DULL, shard);
  const double u = xs.next_uniform();
  return start_in_I ? wrap_circle(fam.I.lo + (fam.I.hi - fam.I.lo) * u) : -1.0 + 2.0 * u;
}

OrbitStats simulate(const SkewSystem& sys, std::uint64_t seed, std::uint64_t N,
                    std::uint64_t burn_in) {
  SimulationConfig c;
  c.seed = seed;
  c.steps = N;
  c.burn_in = static_cast<std::int64_t>(burn_in);
  return simulate(sys, c);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

nlohmann::json InvisibilityReport::to_json() const {
  return {{"n", n},
          {"base", to_string(base)},
          {"N", N},
          {"burn_in", burn_in},
          {"visits_V", visits},
          {"freq_V", freq},
          {"limsup_freq", limsup},
          {"pattern_freq", pattern_freq},
          {"epsilon", epsilon},
          {"expected_hits", expected_hits},
          {"bound", bound},
          {"structural", structural},
          {"structural_bound", structural_bound},
          {"limsup_within_bound", limsup_within_bound},
          {"within_structural", within_structural},
          {"explained", explained},
          {"audit_violations", violations},
          {"verdict", to_string(verdict)}};
}

InvisibilityReport invisibility_verdict(const OrbitStats& stats, int n, BaseKind base) {
  if (n < 1) throw std::invalid_argument("invisibility_verdict: n >= 1");
  InvisibilityReport r;
  r.base = base;
  r.n = n;
  r.N = stats.N;
  r.burn_in = stats.burn_in;
  r.visits = stats.visits_V;
  r.violations = stats.audit_violations;
  r.freq = stats.frequency();
  r.limsup = stats.limsup_frequency();
  r.pattern_freq = stats.pattern_frequency();
  r.epsilon = std::ldexp(1.0, -n);
  const double Nd = static_cast<double>(stats.N);
  r.expected_hits = Nd * r.epsilon;
  r.bound = r.expected_hits > 0 ? r.epsilon * (1.0 + 5.0 / std::sqrt(r.expected_hits)) : 0.0;
  r.structural = base == BaseKind::Bernoulli ? r.epsilon : (2.0 * n + 1.0) * std::ldexp(1.0, -2 * n);
  r.structural_bound =
      Nd > 0 ? r.structural * (1.0 + 5.0 / std::sqrt(Nd * r.structural)) : 0.0;
  r.limsup_within_bound = r.limsup <= r.bound;
  r.within_structural = r.freq <= r.structural_bound;
  r.explained = stats.audit_violations == 0 && stats.visits_V <= stats.pattern_hits;

  const double required = base == BaseKind::Bernoulli
                              ? 100.0 * std::ldexp(1.0, n)
                              : 100.0 * std::ldexp(1.0, 2 * n) / (2.0 * n + 1.0);
  if (Nd < required) {
    r.verdict = Verdict::Inconclusive;
  } else {
    r.verdict = r.freq <= r.bound && r.violations == 0 ? Verdict::Pass : Verdict::Fail;
  }
  return r;
}

nlohmann::json ExhaustiveAuditReport::to_json() const {
  return {{"n", n},         {"depth", depth},       {"grid", grid},
          {"words", words}, {"runs", runs},         {"v_visits", v_visits},
          {"checks", checks}, {"violations", violations}, {"pass", pass()}};
}

ExhaustiveAuditReport exhaustive_audit_bernoulli(const SkewSystem& sys, int depth, int grid) {
  if (sys.base() != BaseKind::Bernoulli)
    throw std::invalid_argument("exhaustive_audit_bernoulli: Bernoulli base required");
  const int w = sys.window();
  const int len = depth + w - 1;
  if (depth < 1 || len > 30) throw std::invalid_argument("exhaustive_audit_bernoulli: bad depth");
  if (grid < 2) throw std::invalid_argument("exhaustive_audit_bernoulli: grid >= 2");
  const FiberMapFamily& fam = sys.family();
  const int n = fam.n;
  ExhaustiveAuditReport r;
  r.n = n;
  r.depth = depth;
  r.grid = grid;
  r.words = 1ULL << len;
  for (std::uint64_t word = 0; word < r.words; ++word) {
    // Digits earliest first: the top w-1 bits are history.
    std::uint64_t history = word >> depth;
    for (int g = 0; g < grid; ++g) {
      double x = wrap_circle(fam.I.lo + (fam.I.hi - fam.I.lo) * g / (grid - 1));
      std::uint64_t past = history;
      BernoulliAudit audit{n};
      for (int k = 1; k <= depth; ++k) {
        const int d = static_cast<int>((word >> (depth - k)) & 1ULL);
        x = fiber_step(sys, past, d, x);
        past = (past << 1) | static_cast<std::uint64_t>(d);
        audit.push(d);
        if (in_V(x)) {
          ++r.v_visits;
          if (k > n) {
            ++r.checks;
            if (audit_entry_bernoulli(audit)) ++r.violations;
          }
        }
      }
      ++r.runs;
    }
  }
  return r;
}

ExhaustiveAuditReport exhaustive_audit_solenoid(const SkewSystem& sys, int depth, int grid,
                                                std::uint64_t seed) {
  if (sys.base() != BaseKind::Solenoid)
    throw std::invalid_argument("exhaustive_audit_solenoid: solenoid base required");
  if (depth < 1 || depth > 24) throw std::invalid_argument("exhaustive_audit_solenoid: bad depth");
  if (grid < 2) throw std::invalid_argument("exhaustive_audit_solenoid: grid >= 2");
  const FiberMapFamily& fam = sys.family();
  const int n = fam.n;
  ExhaustiveAuditReport r;
  r.n = n;
  r.depth = depth;
  r.grid = grid;
  r.words = 1ULL << depth;
  std::uint64_t tail = 0;
  for (std::uint64_t word = 0; word < r.words; ++word) {
    for (int cont = 0; cont < 4; ++cont) {
      std::vector<std::uint8_t> prefix(depth + 2);
      for (int i = 0; i < depth; ++i)
        prefix[i] = static_cast<std::uint8_t>((word >> (depth - 1 - i)) & 1ULL);
      prefix[depth] = static_cast<std::uint8_t>(cont >> 1);
      prefix[depth + 1] = static_cast<std::uint8_t>(cont & 1);
      const SolenoidPoint b(
          BitQueue::with_prefix(prefix, BitQueue::from_stream(BitStream(seed, tail++))), {});
      for (int g = 0; g < grid; ++g) {
        SolenoidState s{b, wrap_circle(fam.I.lo + (fam.I.hi - fam.I.lo) * g / (grid - 1))};
        SolenoidAudit audit{n};
        for (int k = 1; k <= depth; ++k) {
          audit.push(solenoid_apply(sys, s));
          if (in_V(s.x)) {
            ++r.v_visits;
            if (k >= 2 * n) {
              ++r.checks;
              if (audit_entry_solenoid(audit)) ++r.violations;
            }
          }
        }
        ++r.runs;
      }
    }
  }
  return r;
}

nlohmann::json EntryTimeReport::to_json() const {
  return {{"starts", starts},
          {"horizon", horizon},
          {"not_entered", not_entered},
          {"fraction_not_entered", fraction_not_entered()},
          {"max_entry", max_entry},
          {"mean_entry", mean_entry}};
}

EntryTimeReport entry_time_study(const SkewSystem& sys, std::uint64_t starts,
                                 std::uint64_t horizon, std::uint64_t seed) {
  const FiberMapFamily& fam = sys.family();
  EntryTimeReport r;
  r.starts = starts;
  r.horizon = horizon;
  std::vector<std::int64_t> times(starts, -1);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(starts); ++i) {
    const auto shard = static_cast<std::uint64_t>(i);
    const double x0 = initial_fiber_point(fam, seed, shard, false);
    if (in_I(x0, fam.nu)) {
      times[i] = 0;
      continue;
    }
    if (sys.base() == BaseKind::Bernoulli) {
      BernoulliState s = BernoulliState::start(BitStream(seed, shard), x0);
      for (std::uint64_t k = 1; k <= horizon; ++k) {
        step_apply(sys, s);
        if (in_I(s.x, fam.nu)) {
          times[i] = static_cast<std::int64_t>(k);
          break;
        }
      }
    } else {
      SolenoidState s{SolenoidPoint::from_stream(BitStream(seed, shard)), x0};
      for (std::uint64_t k = 1; k <= horizon; ++k) {
        solenoid_apply_unchecked(sys, s);
        if (in_I(s.x, fam.nu)) {
          times[i] = static_cast<std::int64_t>(k);
          break;
        }
      }
    }
  }
  double sum = 0.0;
  std::uint64_t entered = 0;
  for (auto t : times) {
    if (t < 0) {
      ++r.not_entered;
    } else {
      r.max_entry = std::max(r.max_entry, static_cast<std::uint64_t>(t));
      sum += static_cast<double>(t);
      ++entered;
    }
  }
  r.mean_entry = entered ? sum / entered : 0.0;
  return r;
}

}  // namespace invis
