#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "invis/ergodic.hpp"
#include "invis/measure.hpp"

using namespace invis;

TEST_CASE("bins and cylinders") {
  EmpiricalMeasure m;
  CHECK(EmpiricalMeasure::bin_of(-1.0) == 0);
  CHECK(EmpiricalMeasure::bin_of(0.0) == 2048);
  CHECK(EmpiricalMeasure::bin_of(0.999999) == 4095);
  CHECK(EmpiricalMeasure::bin_lo(2048) == 0.0);
  CHECK(EmpiricalMeasure::bin_hi(2559) == doctest::Approx(0.25));
  m.record(0.1, 0b10110000);
  m.record(0.2, 0b10000000);
  m.record(-0.5, 0b01000000);
  CHECK(m.total() == 3);
  CHECK(m.cylinder_count(0b1, 1) == 2);
  CHECK(m.cylinder_count(0b10, 2) == 2);
  CHECK(m.cylinder_count(0b101, 3) == 1);
  CHECK(m.count_between(0.0, 0.25) == 2);
  CHECK_THROWS(m.count_between(0.001, 0.25));
  EmpiricalMeasure n;
  n.record(0.1, 0);
  EmpiricalMeasure sum = m;
  sum.merge(n);
  CHECK(sum.total() == 4);
  CHECK(sum.count_between(0.0, 0.25) == 3);
  EmpiricalMeasure other = n;
  other.merge(m);
  CHECK(other == sum);
}

TEST_CASE("SRB marginals of a long Bernoulli orbit") {
  const SkewSystem sys = SkewSystem::bernoulli(build_family(10));
  const OrbitStats st = simulate(sys, 5, 10'000'000, 1000);
  for (int len = 1; len <= 5; ++len) {
    const SrbReport r = srb_marginal_check(st.measure, len);
    CHECK(r.sufficient);
    CHECK(r.pass);
    CHECK(r.masses.size() == (1u << len));
    CHECK(r.band == doctest::Approx(5.0 * std::sqrt(std::ldexp(1.0, -len) / 1e7)));
  }
  const SrbReport one = srb_marginal_check(st.measure, 1);
  CHECK(one.masses[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS(srb_marginal_check(st.measure, 0));
  CHECK_THROWS(srb_marginal_check(st.measure, 9));
}

TEST_CASE("SRB check catches a biased cylinder law") {
  EmpiricalMeasure m;
  for (int i = 0; i < 100000; ++i) m.record(0.5, i % 3 == 0 ? 0x80u : 0x00u);
  const SrbReport r = srb_marginal_check(m, 1);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.sufficient);
}

TEST_CASE("time and space averages agree") {
  const SkewSystem sys = SkewSystem::bernoulli(build_family(10));
  auto fns = default_test_functions();
  fns.push_back(smoothed_indicator(0.0, 0.25, 0.01));
  const TimeSpaceReport r = time_vs_space_average(sys, fns, 400'000, 3, 8);
  CHECK(r.pass);
  const TimeSpaceEntry* one = r.find("one");
  REQUIRE(one);
  CHECK(one->histogram_integral == doctest::Approx(1.0));
  const TimeSpaceEntry* v = r.find("smoothed_indicator");
  REQUIRE(v);
  for (double avg : v->averages) CHECK(avg <= std::ldexp(1.0, -10) + 0.01);
  CHECK_THROWS(time_vs_space_average(sys, fns, 100, 3, 1));
  CHECK_THROWS(smoothed_indicator(0.0, 0.25, 0.2));
}

TEST_CASE("time averages from different seeds agree on the solenoid") {
  const SkewSystem sys = SkewSystem::solenoid(build_family(10));
  const TimeSpaceReport r = time_vs_space_average(sys, default_test_functions(), 200'000, 8, 4);
  CHECK(r.pass);
}

TEST_CASE("default burn-in") {
  CHECK(default_burn_in(5) == 1000);
  CHECK(default_burn_in(10) == 1000);
  CHECK(default_burn_in(20) == 3200);
}
