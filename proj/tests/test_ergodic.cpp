#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "invis/ergodic.hpp"
#include "oracle.hpp"

using namespace invis;

namespace {
const FiberMapFamily& fam10() {
  static const FiberMapFamily f = build_family(10);
  return f;
}
SimulationConfig cfg(std::uint64_t seed, std::uint64_t steps, int shards = 16) {
  SimulationConfig c;
  c.seed = seed;
  c.steps = steps;
  c.shards = shards;
  return c;
}
FiberMap identity_map() {
  return FiberMap::from_lift(
      PiecewiseLift({PiecewiseLift::Segment::affine(-1.0, 1.0, 0.0, 0.0, 1.0)}));
}
}  // namespace

TEST_CASE("audit counters") {
  BernoulliAudit b{3};
  for (int d : {1, 0, 0}) b.push(d);
  CHECK_FALSE(b.enabled());
  b.push(0);
  CHECK(b.enabled());
  CHECK_FALSE(audit_entry_bernoulli(b));
  b.push(1);
  CHECK(audit_entry_bernoulli(b));

  SolenoidAudit s{2};
  for (int d : {0, 0, 1, 1}) s.push(d);
  CHECK(s.enabled());  // 0011 is in W
  s.push(0);
  CHECK_FALSE(s.enabled());  // ...0110 ends in 10 context
  for (int d : {0, 0, 0}) s.push(d);
  CHECK(s.enabled());
  SolenoidAudit t{2};
  for (int d : {1, 0, 1, 1}) t.push(d);
  CHECK_FALSE(t.enabled());  // 1011 contains 10
}

TEST_CASE("solenoid audit agrees with in_W on the trailing 2n digits") {
  const int n = 4;
  BitStream s(77);
  SolenoidAudit a{n};
  std::vector<std::uint8_t> hist;
  for (int k = 0; k < 20000; ++k) {
    const int d = s.next_bit();
    a.push(d);
    hist.push_back(static_cast<std::uint8_t>(d));
    if (hist.size() >= 2u * n) {
      const std::vector<std::uint8_t> tail(hist.end() - 2 * n, hist.end());
      REQUIRE(a.enabled() == in_W(BitWindow(tail), n));
    }
  }
}

TEST_CASE("kernel is bit-identical to the serial reference") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  const SkewSystem s = SkewSystem::solenoid(fam10());
  const SkewSystem p = perturb(b, 2, 0.0025);
  for (const SkewSystem* sys : {&b, &s, &p}) {
    for (std::uint64_t seed : {1ULL, 99ULL}) {
      const OrbitStats ref = simulate_reference(*sys, cfg(seed, 300'000, 7));
      const OrbitStats ker = simulate(*sys, cfg(seed, 300'000, 7));
      CHECK(ref == ker);
      CHECK(ref.N == 300'000);
      CHECK(ref.orbits == 7);
    }
  }
  const SkewSystem n6 = SkewSystem::bernoulli(build_family(6));
  CHECK(simulate_reference(n6, cfg(4, 200'000)) == simulate(n6, cfg(4, 200'000)));
}

TEST_CASE("simulation is deterministic and shards merge in order") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  const OrbitStats x = simulate(b, cfg(3, 500'000));
  const OrbitStats y = simulate(b, cfg(3, 500'000));
  CHECK(x == y);
  CHECK(x.to_json().dump() == y.to_json().dump());
  OrbitStats merged;
  SimulationConfig c = cfg(3, 500'000);
  for (int shard = 0; shard < c.shards; ++shard)
    merged.merge(simulate_orbit_reference(b, c.seed, shard, c.shard_steps(shard),
                                          c.burn_in_for(10)));
  CHECK(merged == x);
  CHECK_FALSE(simulate(b, cfg(4, 500'000)) == x);
}

TEST_CASE("every Bernoulli visit to V is explained") {
  const SkewSystem b = SkewSystem::bernoulli(build_family(6));
  const OrbitStats st = simulate(b, cfg(1, 5'000'000));
  CHECK(st.visits_V > 0);
  CHECK(st.audit_violations == 0);
  CHECK(st.audited == st.visits_V);
  CHECK(st.visits_V <= st.pattern_hits);
  const InvisibilityReport r = invisibility_verdict(st, 6, BaseKind::Bernoulli);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.explained);
  CHECK(r.freq <= std::ldexp(1.0, -6));
}

TEST_CASE("every solenoid visit to V is explained") {
  const SkewSystem s = SkewSystem::solenoid(build_family(5));
  const OrbitStats st = simulate(s, cfg(1, 5'000'000));
  CHECK(st.visits_V > 0);
  CHECK(st.audit_violations == 0);
  const InvisibilityReport r = invisibility_verdict(st, 5, BaseKind::Solenoid);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.freq <= 11.0 * std::ldexp(1.0, -10) * (1 + 5 / std::sqrt(r.expected_hits)));
}

TEST_CASE("after a 1 and fewer than n zeros the fiber point is above 1/4") {
  for (int n : {5, 10, 20}) {
    const FiberMapFamily f = build_family(n);
    for (int g = 0; g <= 200; ++g) {
      double x = f.f1.lift(f.I.lo + f.I.length() * g / 200.0);
      CHECK(x > 0.25);
      for (int m = 1; m < n; ++m) {
        x = f.f0.lift(x);
        REQUIRE(x > 0.25);
      }
    }
  }
}

TEST_CASE("isotopy maps dominate f0 on I below the crossing of f0 and f1") {
  const FiberMapFamily& f = fam10();
  const double cross = (0.75 + f.nu) / (0.75 + f.nu / 2.0);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    for (int g = 0; g <= 100; ++g) {
      const double x = f.I.lo + (cross - f.I.lo) * g / 100.0;
      REQUIRE(isotopy_lift(f, t, x) >= f.f0.lift(x) - 1e-14);
    }
  }
  CHECK(f.f1.lift(f.I.hi) < f.f0.lift(f.I.hi));
}

TEST_CASE("exhaustive Bernoulli audit matches the brute-force oracle") {
  const ExhaustiveAuditReport r =
      exhaustive_audit_bernoulli(SkewSystem::bernoulli(build_family(6)), 12, 64);
  const auto& o = test_support::oracle().at("exhaustive_bernoulli_n6_d12_g64");
  CHECK(r.words == 4096);
  CHECK(r.runs == 4096 * 64);
  CHECK(r.v_visits == o.at("v_visits").get<std::uint64_t>());
  CHECK(r.checks == o.at("checks").get<std::uint64_t>());
  CHECK(r.violations == 0);
  CHECK(r.pass());
}

TEST_CASE("exhaustive solenoid audit") {
  const ExhaustiveAuditReport r =
      exhaustive_audit_solenoid(SkewSystem::solenoid(build_family(5)), 10, 64, 1);
  CHECK(r.words == 1024);
  CHECK(r.v_visits > 0);
  CHECK(r.checks > 0);
  CHECK(r.violations == 0);
  const ExhaustiveAuditReport again =
      exhaustive_audit_solenoid(SkewSystem::solenoid(build_family(5)), 10, 64, 1);
  CHECK(again.v_visits == r.v_visits);
}

TEST_CASE("negative control: every fiber map f0") {
  const FiberMapFamily& f = fam10();
  const SkewSystem z = SkewSystem::bernoulli_with_maps(f, {f.f0, f.f0}, 1);
  BernoulliState s = BernoulliState::start(BitStream(1), 0.125);
  std::uint64_t visits = 0;
  for (int k = 1; k <= 200; ++k) {
    step_apply(z, s);
    visits += in_V(s.x);
    REQUIRE(std::abs(s.x - 0.125 * std::pow(0.95, k)) < 1e-15);
  }
  CHECK(visits == 200);
  const OrbitStats st = simulate(z, cfg(1, 1'000'000));
  CHECK(st.frequency() > 0.4);
  CHECK(st.audit_violations > 0);
  const InvisibilityReport r = invisibility_verdict(st, 10, BaseKind::Bernoulli);
  CHECK(r.verdict == Verdict::Fail);
  CHECK_FALSE(r.explained);
}

TEST_CASE("negative control: identity fiber maps") {
  const FiberMap id = identity_map();
  const SkewSystem z = SkewSystem::bernoulli_with_maps(fam10(), {id, id}, 1);
  const OrbitStats st = simulate(z, cfg(2, 1'000'000));
  // Starts are uniform on I, so about (1/4) / (1 + 2 nu) of the orbits sit in V forever.
  CHECK(st.frequency() > 0.05);
  CHECK(st.audit_violations > 0);
  CHECK(invisibility_verdict(st, 10, BaseKind::Bernoulli).verdict == Verdict::Fail);
}

TEST_CASE("verdicts") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  const OrbitStats small = simulate(b, cfg(1, 50'000));
  CHECK(invisibility_verdict(small, 10, BaseKind::Bernoulli).verdict == Verdict::Inconclusive);
  CHECK(to_string(Verdict::Inconclusive) == "INCONCLUSIVE");
  CHECK(to_string(Verdict::Pass) == "PASS");
  const OrbitStats big = simulate(b, cfg(1, 2'000'000));
  const InvisibilityReport r = invisibility_verdict(big, 10, BaseKind::Bernoulli);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.epsilon == std::ldexp(1.0, -10));
  CHECK(r.limsup_within_bound);
  CHECK(big.checkpoints[2].steps == big.N);
  CHECK(big.checkpoints[0].steps * 2 <= big.N + 16);
}

TEST_CASE("orbits from the whole circle enter I") {
  const EntryTimeReport b = entry_time_study(SkewSystem::bernoulli(fam10()), 2000, 5000, 1);
  CHECK(b.not_entered == 0);
  CHECK(b.max_entry > 0);
  const EntryTimeReport s = entry_time_study(SkewSystem::solenoid(fam10()), 2000, 5000, 1);
  CHECK(s.not_entered == 0);
  CHECK(s.fraction_not_entered() == 0.0);
}

TEST_CASE("initial fiber points") {
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double x = initial_fiber_point(fam10(), 5, k, true);
    REQUIRE(in_I(x, 0.1));
  }
  CHECK(initial_fiber_point(fam10(), 5, 3, true) == initial_fiber_point(fam10(), 5, 3, true));
}
