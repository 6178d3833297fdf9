// Fused per-shard orbit loops, parallel over shards. Results are merged in
// shard order, so they do not depend on the thread count.

#include <stdexcept>
#include <vector>

#include "invis/ergodic.hpp"

namespace invis {
namespace {

struct Tally {
  OrbitStats st;
  std::uint64_t marks[3];
  std::uint64_t burn;
  std::uint64_t audit_after;
  std::uint64_t entry = 0;
  bool entered;
  double nu;

  inline void observe(std::uint64_t k, double x, bool enabled, std::uint32_t cyl) {
    if (!entered && in_I(x, nu)) {
      entered = true;
      entry = k;
    }
    if (k <= burn) return;
    const std::uint64_t j = k - burn;
    st.pattern_hits += enabled;
    st.measure.record(x, cyl);
    if (x > 0.0 && x < 0.25) {
      ++st.visits_V;
      if (entered && k - entry >= audit_after) {
        ++st.audited;
        st.audit_violations += !enabled;
      }
    }
    if (j >= marks[0]) {
      if (j == marks[0]) st.checkpoints[0].visits = st.visits_V;
      if (j == marks[1]) st.checkpoints[1].visits = st.visits_V;
      if (j == marks[2]) st.checkpoints[2].visits = st.visits_V;
    }
  }
};

OrbitStats run_bernoulli(const SkewSystem& sys, Tally& t, BitStream stream, double x,
                         std::uint64_t total) {
  const FiberMap* maps = sys.maps().data();
  const std::uint64_t mask = sys.window_mask();
  const std::uint64_t n = static_cast<std::uint64_t>(sys.n());
  std::uint64_t past = stream.next_bits64();
  std::uint64_t ahead = stream.next_bits64();
  std::uint64_t zero_run = 0;
  for (std::uint64_t k = 1; k <= total; ++k) {
    const std::uint64_t d = ahead >> 63;
    x = wrap_circle(maps[((past << 1) | d) & mask].lift(x));
    past = (past << 1) | d;
    ahead = (ahead << 1) | static_cast<std::uint64_t>(stream.next_bit());
    zero_run = d ? 0 : zero_run + 1;
    t.observe(k, x, zero_run >= n, static_cast<std::uint32_t>(ahead >> 56));
  }
  return t.st;
}

OrbitStats run_solenoid(const SkewSystem& sys, Tally& t, BitStream stream, double x,
                        std::uint64_t total) {
  SolenoidState s{SolenoidPoint::from_stream(stream), x};
  SolenoidAudit audit{sys.n()};
  for (std::uint64_t k = 1; k <= total; ++k) {
    audit.push(solenoid_apply_unchecked(sys, s));
    t.observe(k, s.x, audit.enabled(), static_cast<std::uint32_t>(s.b.prefix64() >> 56));
  }
  return t.st;
}

}  // namespace

OrbitStats simulate(const SkewSystem& sys, const SimulationConfig& config) {
  if (config.shards < 1) throw std::invalid_argument("simulate: shards >= 1");
  const FiberMapFamily& fam = sys.family();
  const std::uint64_t burn = config.burn_in_for(fam.n);
  const bool bern = sys.base() == BaseKind::Bernoulli;
  std::vector<OrbitStats> parts(config.shards);

#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < config.shards; ++s) {
    const auto shard = static_cast<std::uint64_t>(s);
    const std::uint64_t steps = config.shard_steps(s);
    const double x0 = initial_fiber_point(fam, config.seed, shard, config.start_in_I);
    Tally t;
    t.st.N = steps;
    t.st.burn_in = burn;
    t.st.orbits = 1;
    t.marks[0] = steps / 2;
    t.marks[1] = 3 * steps / 4;
    t.marks[2] = steps;
    for (int i = 0; i < 3; ++i) t.st.checkpoints[i].steps = t.marks[i];
    t.burn = burn;
    t.audit_after = bern ? static_cast<std::uint64_t>(fam.n) + 1 : 2 * static_cast<std::uint64_t>(fam.n);
    t.entered = in_I(x0, fam.nu);
    t.nu = fam.nu;
    const BitStream stream(config.seed, shard);
    parts[s] = bern ? run_bernoulli(sys, t, stream, x0, burn + steps)
                    : run_solenoid(sys, t, stream, x0, burn + steps);
    parts[s].entry_time = t.entered ? t.entry : burn + steps;
    parts[s].never_entered = t.entered ? 0 : 1;
  }

  OrbitStats total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace invis
