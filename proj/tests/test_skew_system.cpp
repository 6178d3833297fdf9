#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "invis/skew_system.hpp"
#include "oracle.hpp"

using namespace invis;

namespace {
const FiberMapFamily& fam10() {
  static const FiberMapFamily f = build_family(10);
  return f;
}
}  // namespace

TEST_CASE("Bernoulli step examples") {
  const SkewSystem sys = SkewSystem::bernoulli(fam10());
  CHECK(fiber_step(sys, 0, 1, -0.1) == doctest::Approx(0.835).epsilon(1e-14));
  double x = 1.0;
  for (int k = 1; k <= 40; ++k) {
    x = fiber_step(sys, 0, 0, x);
    CHECK(std::abs(x - std::pow(0.95, k)) < 1e-14);
  }
}

TEST_CASE("step_apply consumes the stream digits in order") {
  const SkewSystem sys = SkewSystem::bernoulli(fam10());
  BitStream probe(5);
  probe.next_bits64();  // past
  BernoulliState s = BernoulliState::start(BitStream(5), 0.3);
  double x = 0.3;
  for (int k = 0; k < 300; ++k) {
    const int expected = probe.next_bit();
    const int d = step_apply(sys, s);
    REQUIRE(d == expected);
    x = wrap_circle((d ? fam10().f1 : fam10().f0).lift(x));
    REQUIRE(s.x == x);
  }
  const SkewSystem sol = SkewSystem::solenoid(fam10());
  CHECK_THROWS_AS(step_apply(sol, s), std::invalid_argument);
}

TEST_CASE("fiber selector regions") {
  CHECK(select_fiber_map(0.25).kind == FiberSelector::Kind::F0);
  const FiberSelector a = select_fiber_map(0.4);
  CHECK(a.kind == FiberSelector::Kind::Isotopy);
  CHECK(a.t == doctest::Approx(0.2).epsilon(1e-14));
  const FiberSelector b = select_fiber_map(0.9);
  CHECK(b.kind == FiberSelector::Kind::Isotopy);
  CHECK(b.t == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(select_fiber_map(0.6).kind == FiberSelector::Kind::F1);
  CHECK(select_fiber_map(0.375).kind == FiberSelector::Kind::Isotopy);
  CHECK(select_fiber_map(0.375).t == 0.0);
  CHECK_THROWS_AS(select_fiber_map(1.0), std::domain_error);
  CHECK_THROWS_AS(select_fiber_map(-0.1), std::domain_error);

  BitStream s(21);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t w = s.next_bits64();
    const double y = std::ldexp(static_cast<double>(w >> 11), -53);
    const FiberSelector p = select_fiber_map(w >> 11 << 11, y);
    const FiberSelector q = select_fiber_map(y);
    REQUIRE(p.kind == q.kind);
    REQUIRE(p.t == q.t);
  }
}

TEST_CASE("fiber map depends continuously on y") {
  const FiberMapFamily& f = fam10();
  const double eps = 1e-9;
  for (double y0 : {0.375, 0.5, 0.875}) {
    for (int i = 0; i < 50; ++i) {
      const double x = -0.95 + 1.9 * i / 50.0;
      const double left = selector_lift(f, select_fiber_map(y0 - eps), x);
      const double right = selector_lift(f, select_fiber_map(y0), x);
      CHECK(std::abs(left - right) < 1e-7);
    }
  }
  // Across y = 0 (i.e. 1 on the circle) the last window returns to f0.
  for (int i = 0; i < 50; ++i) {
    const double x = -0.95 + 1.9 * i / 50.0;
    CHECK(std::abs(selector_lift(f, select_fiber_map(1.0 - eps), x) - f.f0.lift(x)) < 1e-6);
  }
}

TEST_CASE("y-derivative: C^1 at 3/8 and 0, jump of 16 (F1 - F0) at 1/2 and 7/8") {
  const FiberMapFamily& f = fam10();
  for (int i = 0; i < 50; ++i) {
    const double x = -0.95 + 1.9 * i / 50.0;
    const double gap = f.f1.lift(x) - f.f0.lift(x);
    CHECK(selector_lift_dy(f, select_fiber_map(0.375), x) == 0.0);
    CHECK(std::abs(selector_lift_dy(f, select_fiber_map(0.999999999), x)) < 1e-6);
    const double left_half = selector_lift_dy(f, select_fiber_map(0.5 - 1e-12), x);
    CHECK(left_half == doctest::Approx(16.0 * gap).epsilon(1e-9).scale(1e-9));
    CHECK(selector_lift_dy(f, select_fiber_map(0.5), x) == 0.0);
    const double right_78 = selector_lift_dy(f, select_fiber_map(0.875), x);
    CHECK(right_78 == doctest::Approx(-16.0 * gap).epsilon(1e-9).scale(1e-9));
    CHECK(selector_lift_dy(f, select_fiber_map(0.875 - 1e-12), x) == 0.0);
  }
}

TEST_CASE("composition identity over words without 11") {
  const SkewSystem sol = SkewSystem::solenoid(fam10());
  CHECK(composition_identity_gap(sol, 2000, 1) <= 1e-12);
  CHECK(composition_identity_gap(sol, 2000, 2) <= 1e-12);
  CHECK_THROWS_AS(composition_identity_gap(SkewSystem::bernoulli(fam10()), 1, 1),
                  std::invalid_argument);
}

TEST_CASE("(b1, a) has period two") {
  const SkewSystem sol = SkewSystem::solenoid(fam10());
  const double a = test_support::oracle_value("a_n10");
  SolenoidState s{special_points(sol.params()).second, a};
  solenoid_apply(sol, s);
  CHECK(std::abs(s.x - fam10().f0.lift(a)) < 1e-12);
  solenoid_apply(sol, s);
  CHECK(std::abs(s.x - a) < 1e-10);
  CHECK(s.b.y() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("descriptor and hash") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  const SkewSystem s = SkewSystem::solenoid(fam10());
  CHECK(b.descriptor()["lambda"].is_null());
  CHECK(s.descriptor()["lambda"] == 0.05);
  CHECK(b.descriptor_hash() == SkewSystem::bernoulli(build_family(10)).descriptor_hash());
  CHECK(b.descriptor_hash() != s.descriptor_hash());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(parse_base("solenoid") == BaseKind::Solenoid);
  CHECK_THROWS_AS(parse_base("torus"), std::invalid_argument);
  CHECK_THROWS_AS(SkewSystem::solenoid(fam10(), SolenoidParams{0.5, 2.0}), std::domain_error);
  CHECK_THROWS_AS(SkewSystem::bernoulli_with_maps(fam10(), {fam10().f0}, 1), std::invalid_argument);
}

TEST_CASE("C^1 distance") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  CHECK(c1p_distance(b, b).lower == 0.0);
  const SkewSystem swapped = SkewSystem::bernoulli_with_maps(fam10(), {fam10().f1, fam10().f0}, 1);
  CHECK(c1p_distance(b, swapped).lower > 0.5);
  CHECK_THROWS_AS(c1p_distance(b, SkewSystem::solenoid(fam10())), std::invalid_argument);
}

TEST_CASE("perturbation respects the budget") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  const double nu2 = 0.01;
  const SkewSystem p = perturb(b, 3, nu2 / 8.0);
  REQUIRE(p.perturbation());
  const C1Distance d = c1p_distance(b, p);
  CHECK(d.lower > 0.0);
  CHECK(d.upper <= nu2 / 8.0);
  CHECK(d.upper <= nu2 / 4.0);
  CHECK(p.perturbation()->measured_distance == doctest::Approx(d.upper).epsilon(1e-12));
  CHECK(p.perturbation()->measured_distance >= 0.8 * nu2 / 8.0);
  CHECK(p.window() == 2);

  const SkewSystem q = perturb(b, 3, nu2 / 8.0);
  CHECK(q.perturbation()->coefficients == p.perturbation()->coefficients);
  CHECK(q.perturbation()->amplitude == p.perturbation()->amplitude);
  CHECK(perturb(b, 4, nu2 / 8.0).perturbation()->coefficients != p.perturbation()->coefficients);

  CHECK_THROWS_AS(perturb(b, 1, nu2), std::domain_error);
  CHECK_THROWS_AS(perturb(SkewSystem::solenoid(fam10()), 1, nu2 / 8.0), std::invalid_argument);
  CHECK_THROWS_AS(perturb(p, 1, nu2 / 8.0), std::invalid_argument);
  CHECK_FALSE(perturb(b, 1, 0.0).perturbation());
}

TEST_CASE("perturbed maps keep the window layout") {
  const SkewSystem b = SkewSystem::bernoulli(fam10());
  const SkewSystem p = perturb(b, 9, 0.0025);
  // Window value v uses base map f_{v & 1} plus its own bump.
  for (std::uint32_t v = 0; v < 4; ++v) {
    const FiberMap& base = (v & 1u) ? fam10().f1 : fam10().f0;
    for (int i = 0; i < 100; ++i) {
      const double x = -1.0 + 0.02 * i + 0.001;
      CHECK(std::abs(p.map_for(v).lift(x) - base.lift(x) - p.perturbation()->bump(v, x)) < 1e-10);
    }
  }
}

TEST_CASE("North-South checklist") {
  const NorthSouthReport b = verify_northsouth(SkewSystem::bernoulli(fam10()));
  CHECK(b.all_pass());
  CHECK(b.find("attractor_within_nu"));
  const NorthSouthReport s = verify_northsouth(SkewSystem::solenoid(fam10()));
  CHECK(s.all_pass());
  CHECK_FALSE(s.find("attractor_within_nu"));
  for (int n : {6, 10, 50, 100}) CHECK(verify_northsouth(SkewSystem::bernoulli(build_family(n))).all_pass());
  for (int seed = 0; seed < 3; ++seed)
    CHECK(verify_northsouth(perturb(SkewSystem::bernoulli(fam10()), seed, 0.0025)).all_pass());
}

TEST_CASE("adversarial perturbation is flagged") {
  PerturbationSpec spec;
  spec.harmonics = 1;
  spec.window = 1;
  spec.amplitude = 0.01;
  spec.coefficients = {{-1.0, 0.0}, {-1.0, 0.0}};
  const SkewSystem bad = with_perturbation(SkewSystem::bernoulli(fam10()), spec);
  const NorthSouthReport r = verify_northsouth(bad);
  CHECK_FALSE(r.all_pass());
  REQUIRE(r.find("attractor_within_nu"));
  CHECK_FALSE(r.find("attractor_within_nu")->pass);
  CHECK(c1p_distance(SkewSystem::bernoulli(fam10()), bad).lower > 0.0025);
}

TEST_CASE("family invariants") {
  for (int n : {5, 10, 100}) {
    const NorthSouthReport r = family_invariants(build_family(n));
    CHECK(r.all_pass());
  }
}
