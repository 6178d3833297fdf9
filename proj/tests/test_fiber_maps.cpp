#include <doctest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "invis/fiber_maps.hpp"
#include "oracle.hpp"

using namespace invis;
using test_support::oracle_value;

TEST_CASE("build_family n=10 spec values") {
  const FiberMapFamily f = build_family(10);
  CHECK(f.nu == doctest::Approx(0.1));
  CHECK(f.f0.lift_derivative(0.5) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(f.f1.lift(-0.1) == doctest::Approx(oracle_value("f1_at_minus_nu_n10")).epsilon(1e-14));
  CHECK(std::abs(f.f0.lift(1.0) - 0.95) < 1e-15);
  CHECK(f.f0.lift(0.0) == 0.0);
  CHECK(std::abs(f.f1.lift(1.0) - 1.0) < 1e-15);
  CHECK(f.l == doctest::Approx(0.95));
  CHECK(f.I.lo == doctest::Approx(-0.1));
  CHECK(f.I.hi == doctest::Approx(1.1));
  CHECK(f.J.lo == doctest::Approx(-2.0 / 3.0));
  CHECK(f.J.hi == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("build_family rejects n < 5") {
  CHECK_THROWS_AS(build_family(4), std::domain_error);
  CHECK_THROWS_AS(build_family(0), std::domain_error);
  CHECK_NOTHROW(build_family(5));
}

TEST_CASE("lifts have degree one, are monotone and moderate") {
  for (int n : {5, 6, 10, 37, 100, 200}) {
    const FiberMapFamily f = build_family(n);
    for (const FiberMap* g : {&f.f0, &f.f1}) {
      double prev = g->lift(-1.0);
      for (int i = 1; i <= 20000; ++i) {
        const double x = -1.0 + 2.0 * i / 20000.0;
        const double y = g->lift(x);
        REQUIRE(y > prev);
        prev = y;
        const double d = g->lift_derivative(x);
        REQUIRE(d >= 1.0 / kModerateLipschitz);
        REQUIRE(d <= kModerateLipschitz);
        REQUIRE(std::abs(g->lift(x + 2.0) - y - 2.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("inverse round trip within 1e-12 on a 10^4 grid") {
  for (int n : {5, 10, 100}) {
    const FiberMapFamily f = build_family(n);
    for (const FiberMap* g : {&f.f0, &f.f1}) {
      double worst = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const double x = -1.0 + 2.0 * i / 10000.0;
        worst = std::max(worst, std::abs(g->lift_inverse(g->lift(x)) - x));
        worst = std::max(worst, std::abs(g->lift(g->lift_inverse(x)) - x));
      }
      CHECK(worst <= 1e-12);
    }
  }
  const FiberMapFamily f = build_family(10);
  CHECK(f.f1.eval_inverse(f.f1.eval(CirclePoint(0.3))).value() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("pieces join in C^1") {
  for (int n : {5, 10, 100}) {
    const FiberMapFamily f = build_family(n);
    for (const FiberMap* g : {&f.f0, &f.f1}) {
      const auto& segs = g->forward().segments();
      for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        CHECK(std::abs(segs[i].y1 - segs[i + 1].y0) < 1e-13);
        CHECK(std::abs(segs[i].d1 - segs[i + 1].d0) < 1e-12);
      }
      CHECK(std::abs(segs.back().y1 - segs.front().y0 - 2.0) < 1e-13);
      CHECK(std::abs(segs.back().d1 - segs.front().d0) < 1e-12);
    }
  }
}

TEST_CASE("slopes, fixed points and drift") {
  for (int n : {5, 10, 50, 200}) {
    const FiberMapFamily f = build_family(n);
    const double nu = f.nu;
    for (int i = 0; i <= 400; ++i) {
      const double x = f.I.lo + f.I.length() * i / 400.0;
      CHECK(f.f0.lift_derivative(x) == doctest::Approx(1.0 - nu / 2.0).epsilon(1e-13));
      CHECK(f.f1.lift_derivative(x) == doctest::Approx(0.25 - nu).epsilon(1e-13));
      const double u = f.J.lo + f.J.length() * i / 400.0;
      CHECK(f.f0.lift_derivative(u) == doctest::Approx(1.0 + nu).epsilon(1e-13));
      CHECK(f.f1.lift_derivative(u) == doctest::Approx(1.0 + nu).epsilon(1e-13));
      const double lo = -1.0 / 3.0 + (-nu + 1.0 / 3.0) * i / 400.0;
      const double hi = 1.0 + nu + (4.0 / 3.0 - 1.0 - nu) * i / 400.0;
      for (const FiberMap* g : {&f.f0, &f.f1}) {
        CHECK(g->lift(lo) >= lo + nu * nu / 2.0 - 1e-14);
        CHECK(g->lift(hi) <= hi - nu * nu / 2.0 + 1e-14);
      }
    }
    // Repellers at -1/2, at distance >= nu from the ends of J once n >= 6.
    CHECK(std::abs(f.f0.lift(-0.5) + 0.5) < 1e-14);
    CHECK(std::abs(f.f1.lift(-0.5) + 0.5) < 1e-14);
    if (n >= 6) {
      CHECK(f.repeller() - f.J.lo >= nu);
      CHECK(f.J.hi - f.repeller() >= nu);
    }
  }
}

TEST_CASE("isotopy endpoints and midpoint") {
  const FiberMapFamily f = build_family(10);
  for (int i = 0; i < 200; ++i) {
    const double x = -1.0 + 2.0 * i / 200.0;
    CHECK(isotopy_lift(f, 0.0, x) == doctest::Approx(f.f0.lift(x)).epsilon(1e-15));
    CHECK(isotopy_lift(f, 1.0, x) == doctest::Approx(f.f1.lift(x)).epsilon(1e-15));
  }
  CHECK(isotopy_lift(f, 0.5, 0.0) ==
        doctest::Approx(oracle_value("isotopy_half_at_0_n10")).epsilon(1e-14));
  CHECK(isotopy_eval(f, 0.5, CirclePoint(0.0)).value() == doctest::Approx(0.2125).epsilon(1e-14));
}

TEST_CASE("isotopy derivatives agree with differences and the inverse inverts") {
  const FiberMapFamily f = build_family(10);
  const double h = 1e-6;
  for (double t : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    for (int i = 0; i < 50; ++i) {
      const double x = -0.97 + 1.94 * i / 50.0;
      const double dx = (isotopy_lift(f, t, x + h) - isotopy_lift(f, t, x - h)) / (2 * h);
      CHECK(isotopy_lift_dx(f, t, x) == doctest::Approx(dx).epsilon(1e-6));
      const double tp = std::min(1.0, t + h), tm = std::max(0.0, t - h);
      const double dt = (isotopy_lift(f, tp, x) - isotopy_lift(f, tm, x)) / (tp - tm);
      CHECK(std::abs(isotopy_lift_dt(f, t, x) - dt) < 1e-5);
      const double y = isotopy_lift(f, t, x);
      CHECK(std::abs(isotopy_lift_inverse(f, t, y) - x) < 1e-12);
    }
  }
}

TEST_CASE("composed attractor against the frozen oracle") {
  CHECK(std::abs(composed_attractor(build_family(10)) - oracle_value("a_n10")) < 1e-12);
  CHECK(std::abs(composed_attractor(build_family(100)) - oracle_value("a_n100")) < 1e-12);
  for (int n : {5, 10, 33, 100, 200}) {
    const FiberMapFamily f = build_family(n);
    const double a = composed_attractor(f);
    CHECK(std::abs(a - composed_attractor_closed_form(f.nu)) < 1e-12);
    CHECK(a > 1.0 - f.nu);
    CHECK(a < 1.0);
    CHECK(f.a == doctest::Approx(a).epsilon(1e-12));
  }
  CHECK(oracle_value("a_n100") == doctest::Approx(0.9984235).epsilon(1e-7));
  CHECK(oracle_value("a_n10") == doctest::Approx(0.9912536).epsilon(1e-7));
}

TEST_CASE("phi threshold against high-precision values") {
  for (int n : {5, 10, 100, 200}) {
    const PhiThreshold p = phi_threshold(n);
    CHECK(p.phi == doctest::Approx(oracle_value("phi_n" + std::to_string(n))).epsilon(1e-14));
    CHECK(p.doubled_bound ==
          doctest::Approx(oracle_value("doubled_n" + std::to_string(n))).epsilon(1e-14));
    CHECK(p.phi_above_quarter);
    CHECK(p.doubled_above_quarter);
  }
  for (int n = 5; n <= 200; ++n) CHECK(phi_threshold(n).phi > 0.25);
  const PhiThreshold big = phi_threshold(1'000'000);
  CHECK(std::abs(big.phi - oracle_value("phi_limit")) < 1e-2);
  CHECK(big.phi == doctest::Approx(oracle_value("phi_n1000000")).epsilon(1e-9));
  CHECK_THROWS_AS(phi_threshold(4), std::domain_error);
}

TEST_CASE("wrap_circle keeps [-1, 1)") {
  CHECK(wrap_circle(1.0) == -1.0);
  CHECK(wrap_circle(-1.0) == -1.0);
  CHECK(wrap_circle(2.5) == doctest::Approx(0.5));
  CHECK(wrap_circle(-3.25) == doctest::Approx(0.75));
  CHECK(wrap_circle(0.999) == 0.999);
  Arc arc{-0.1, 1.1};
  CHECK(arc.contains(-0.95));  // -0.95 + 2 = 1.05
  CHECK_FALSE(arc.contains(-0.5));
}

TEST_CASE("family serialises to the golden file") {
  const nlohmann::json got = to_json(build_family(10));
  std::ifstream f(INVIS_GOLDEN_DIR "/family_n10.json");
  REQUIRE(f);
  const nlohmann::json want = nlohmann::json::parse(f);
  CHECK(got == want);
}
