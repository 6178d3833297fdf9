#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "invis/attractor.hpp"
#include "oracle.hpp"

using namespace invis;

namespace {
const SkewSystem& bern10() {
  static const SkewSystem s = SkewSystem::bernoulli(build_family(10));
  return s;
}
BitWindow alternating(std::size_t len) {
  std::vector<std::uint8_t> b(len);
  for (std::size_t i = 0; i < len; ++i) b[len - 1 - i] = (i % 2 == 0) ? 1 : 0;
  return BitWindow(b);
}
}  // namespace

TEST_CASE("bracket over the period-2 word contains a") {
  const double a = test_support::oracle_value("a_n10");
  const GraphSample g = gamma_bracket(bern10(), alternating(40));
  CHECK(g.depth == 40);
  CHECK(g.interval.lo <= a + 1e-12);
  CHECK(g.interval.hi >= a - 1e-12);
  CHECK(g.interval.length() < 1e-6);
}

TEST_CASE("bracket widths contract by at least l per step") {
  const double l = bern10().family().l;
  BitStream s(17);
  for (int w = 0; w < 200; ++w) {
    const BitWindow word = BitWindow::from_stream(s, 60);
    const auto arcs = gamma_bracket_depths(bern10(), word);
    REQUIRE(arcs.size() == 60);
    CHECK(arcs[0].length() <= l * bern10().family().I.length() + 1e-15);
    for (std::size_t k = 1; k < arcs.size(); ++k) {
      REQUIRE(arcs[k].length() <= l * arcs[k - 1].length() + 1e-15);
      // Nested: deeper brackets sit inside shallower ones.
      REQUIRE(arcs[k].lo >= arcs[k - 1].lo - 1e-15);
      REQUIRE(arcs[k].hi <= arcs[k - 1].hi + 1e-15);
    }
  }
  const WidthCheck wc = bracket_width_check(bern10(), 64, 60, 1);
  CHECK(wc.pass);
  CHECK(wc.rate == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(wc.worst_ratio <= 1.0 + 1e-9);
  CHECK(wc.worst_ratio >= 1.0 - 1e-9);  // attained by the all-zero word
}

TEST_CASE("gamma_bracket rejects words shorter than the window") {
  const SkewSystem p = perturb(bern10(), 1, 0.0025);
  CHECK_THROWS_AS(gamma_bracket(p, BitWindow::parse("1")), std::invalid_argument);
  CHECK_NOTHROW(gamma_bracket(p, BitWindow::parse("10")));
  CHECK_THROWS_AS(gamma_bracket(SkewSystem::solenoid(build_family(10)), BitWindow::parse("10")),
                  std::invalid_argument);
}

TEST_CASE("solenoid bracket agrees with the Bernoulli one on words without 11") {
  const SkewSystem sol = SkewSystem::solenoid(build_family(10));
  const BitWindow word = BitWindow::parse("0100100010100001001010");
  const GraphSample gs = gamma_bracket(sol, word, BitQueue::periodic("0"));
  const GraphSample gb = gamma_bracket(bern10(), word);
  CHECK(std::abs(gs.interval.lo - gb.interval.lo) < 1e-12);
  CHECK(std::abs(gs.interval.hi - gb.interval.hi) < 1e-12);
}

TEST_CASE("repeller brackets stay in J and contain -1/2") {
  BitStream s(23);
  for (int w = 0; w < 100; ++w) {
    const BitWindow word = BitWindow::from_stream(s, 30);
    const GraphSample g = repeller_bracket(bern10(), word);
    CHECK(g.interval.lo >= -2.0 / 3.0 - 1e-15);
    CHECK(g.interval.hi <= -1.0 / 3.0 + 1e-15);
    CHECK(g.interval.lo <= -0.5);
    CHECK(g.interval.hi >= -0.5);
  }
  const SkewSystem sol = SkewSystem::solenoid(build_family(10));
  const GraphSample g = repeller_bracket(sol, SolenoidPoint::from_stream(BitStream(3)), 40);
  CHECK(g.interval.lo >= -2.0 / 3.0);
  CHECK(g.interval.hi <= -1.0 / 3.0);
  CHECK(g.interval.length() < 1e-1);
}

TEST_CASE("projected arc of the unperturbed system") {
  const ArcReport r = projected_arc(bern10(), 1000, 60, 1);
  const double a = test_support::oracle_value("a_n10");
  CHECK(std::abs(r.a - a) < 1e-12);
  CHECK(r.outer.lo <= 0.0);
  CHECK(r.outer.hi >= a - 1e-6);
  CHECK(r.outer.lo >= -0.1);
  CHECK(r.outer.hi <= 1.1);
  CHECK(r.contains_I_tilde);
  CHECK(r.inner_certifies_I_tilde);
  CHECK(r.inside_I);
  CHECK(r.inner.lo <= 1e-6);
  CHECK(r.inner.hi >= a - 1e-6);
  CHECK_THROWS_AS(projected_arc(bern10(), 999, 60, 1), std::invalid_argument);
  CHECK_THROWS_AS(projected_arc(bern10(), 1000, 39, 1), std::invalid_argument);
}

TEST_CASE("projected arc of perturbed systems stays in I") {
  for (int seed = 0; seed < 3; ++seed) {
    const SkewSystem p = perturb(bern10(), seed, 0.0025);
    const ArcReport r = projected_arc(p, 1000, 60, 1);
    CHECK(r.inside_I);
    CHECK(r.outer.lo >= -0.1);
    CHECK(r.outer.hi <= 1.1);
    CHECK(bracket_width_check(p, 16, 60, 2).pass);
  }
}

TEST_CASE("all maps f0: the arc shrinks to {0} at depth") {
  const FiberMapFamily f = build_family(10);
  const SkewSystem z = SkewSystem::bernoulli_with_maps(f, {f.f0, f.f0}, 1);
  const ArcReport r = projected_arc(z, 1000, 60, 1);
  CHECK(r.outer.length() <= std::pow(0.95, 60) * f.I.length() * (1 + 1e-12));
  CHECK(std::abs(r.forced[2].interval.lo) < 1e-20);
  CHECK(std::abs(r.forced[2].interval.hi) < 1e-20);
  CHECK_FALSE(r.contains_I_tilde);
}
