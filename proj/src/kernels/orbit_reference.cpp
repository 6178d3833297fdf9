// Straightforward orbit driver built only on the public step operations.
// Kept as the oracle for the OpenMP kernel in orbit_kernels.cpp.

#include <stdexcept>

#include "invis/ergodic.hpp"

namespace invis {

OrbitStats simulate_orbit_reference(const SkewSystem& sys, std::uint64_t seed,
                                    std::uint64_t shard, std::uint64_t steps,
                                    std::uint64_t burn_in, bool start_in_I) {
  const FiberMapFamily& fam = sys.family();
  const int n = fam.n;
  const double x0 = initial_fiber_point(fam, seed, shard, start_in_I);

  OrbitStats st;
  st.N = steps;
  st.burn_in = burn_in;
  st.orbits = 1;
  const std::uint64_t marks[3] = {steps / 2, 3 * steps / 4, steps};
  for (int i = 0; i < 3; ++i) st.checkpoints[i].steps = marks[i];

  bool entered = in_I(x0, fam.nu);
  std::uint64_t entry = 0;
  const std::uint64_t total = burn_in + steps;
  const std::uint64_t audit_after =
      sys.base() == BaseKind::Bernoulli ? static_cast<std::uint64_t>(n) + 1
                                        : 2 * static_cast<std::uint64_t>(n);

  auto observe = [&](std::uint64_t k, double x, bool enabled, std::uint32_t cyl) {
    if (!entered && in_I(x, fam.nu)) {
      entered = true;
      entry = k;
    }
    if (k <= burn_in) return;
    const std::uint64_t j = k - burn_in;
    if (enabled) ++st.pattern_hits;
    st.measure.record(x, cyl);
    if (in_V(x)) {
      ++st.visits_V;
      if (entered && k - entry >= audit_after) {
        ++st.audited;
        if (!enabled) ++st.audit_violations;
      }
    }
    for (int i = 0; i < 3; ++i)
      if (j == marks[i]) st.checkpoints[i].visits = st.visits_V;
  };

  if (sys.base() == BaseKind::Bernoulli) {
    BernoulliState s = BernoulliState::start(BitStream(seed, shard), x0);
    BernoulliAudit audit{n};
    for (std::uint64_t k = 1; k <= total; ++k) {
      const int d = step_apply(sys, s);
      audit.push(d);
      observe(k, s.x, audit.enabled(), static_cast<std::uint32_t>(s.ahead >> 56));
    }
  } else {
    SolenoidState s{SolenoidPoint::from_stream(BitStream(seed, shard)), x0};
    SolenoidAudit audit{n};
    for (std::uint64_t k = 1; k <= total; ++k) {
      const int d = solenoid_apply(sys, s);
      audit.push(d);
      observe(k, s.x, audit.enabled(), static_cast<std::uint32_t>(s.b.prefix64() >> 56));
    }
  }
  st.entry_time = entered ? entry : total;
  st.never_entered = entered ? 0 : 1;
  return st;
}

OrbitStats simulate_reference(const SkewSystem& sys, const SimulationConfig& config) {
  if (config.shards < 1) throw std::invalid_argument("simulate: shards >= 1");
  const std::uint64_t burn = config.burn_in_for(sys.n());
  OrbitStats total;
  for (int s = 0; s < config.shards; ++s)
    total.merge(simulate_orbit_reference(sys, config.seed, static_cast<std::uint64_t>(s),
                                         config.shard_steps(s), burn, config.start_in_I));
  return total;
}

}  // namespace invis
