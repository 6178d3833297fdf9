#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "invis/skew_system.hpp"

namespace invis {
namespace {

constexpr std::uint64_t kCoefficientShard = 0x70657274ULL;

struct MapView {
  std::function<double(double)> f, df, finv, dfinv;
};

MapView view_of(const FiberMap& m) {
  return {[&m](double x) { return m.lift(x); },
          [&m](double x) { return m.lift_derivative(x); },
          [&m](double y) { return m.lift_inverse(y); },
          [&m](double y) { return m.inverse_derivative(y); }};
}

MapView view_of(const FiberMapFamily& fam, FiberSelector sel) {
  return {[&fam, sel](double x) { return selector_lift(fam, sel, x); },
          [&fam, sel](double x) { return selector_lift_dx(fam, sel, x); },
          [&fam, sel](double y) { return selector_lift_inverse(fam, sel, y); },
          [&fam, sel](double y) {
            return 1.0 / selector_lift_dx(fam, sel, selector_lift_inverse(fam, sel, y));
          }};
}

struct Sup {
  double lower = 0.0;
  double upper = 0.0;
};

// sup|F - G| + sup|F' - G'| on a uniform grid of [-1, 1).
Sup c1_gap(const std::function<double(double)>& F, const std::function<double(double)>& dF,
           const std::function<double(double)>& G, const std::function<double(double)>& dG,
           int grid) {
  const double h = kCirclePeriod / grid;
  double sv = 0.0, sd = 0.0, lip_d = 0.0;
  double prev_d = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = -1.0 + h * i;
    const double dv = std::abs(wrap_circle(F(x) - G(x)));
    const double dd = dF(x) - dG(x);
    sv = std::max(sv, dv);
    sd = std::max(sd, std::abs(dd));
    if (i > 0) lip_d = std::max(lip_d, std::abs(dd - prev_d) / h);
    prev_d = dd;
  }
  return {sv + sd, (sv + h * sd) + (sd + h * lip_d)};
}

Sup pair_gap(const MapView& a, const MapView& b, int grid) {
  const Sup fwd = c1_gap(a.f, a.df, b.f, b.df, grid);
  const Sup inv = c1_gap(a.finv, a.dfinv, b.finv, b.dfinv, grid);
  return {std::max(fwd.lower, inv.lower), std::max(fwd.upper, inv.upper)};
}

}  // namespace

double PerturbationSpec::bump(std::uint32_t v, double x) const {
  if (amplitude == 0.0) return 0.0;
  const auto& c = coefficients.at(v);
  double s = 0.0;
  for (int h = 1; h <= harmonics; ++h) {
    const double w = std::numbers::pi * h * x;
    s += c[2 * (h - 1)] * std::cos(w) + c[2 * (h - 1) + 1] * std::sin(w);
  }
  return amplitude * s;
}

double PerturbationSpec::bump_derivative(std::uint32_t v, double x) const {
  if (amplitude == 0.0) return 0.0;
  const auto& c = coefficients.at(v);
  double s = 0.0;
  for (int h = 1; h <= harmonics; ++h) {
    const double k = std::numbers::pi * h;
    s += k * (-c[2 * (h - 1)] * std::sin(k * x) + c[2 * (h - 1) + 1] * std::cos(k * x));
  }
  return amplitude * s;
}

C1Distance c1p_distance(const SkewSystem& a, const SkewSystem& b, int grid,
                        int base_samples) {
  if (a.base() != b.base())
    throw std::invalid_argument("c1p_distance: systems have different base kinds");
  if (grid < 16 || base_samples < 1)
    throw std::invalid_argument("c1p_distance: grid >= 16 and base_samples >= 1");
  C1Distance d;
  d.grid = grid;
  if (a.base() == BaseKind::Bernoulli) {
    const int w = std::max(a.window(), b.window());
    d.base_samples = 1 << w;
    for (std::uint32_t v = 0; v < (1u << w); ++v) {
      // Windows that agree on both systems' digits give the same pair.
      bool seen = false;
      for (std::uint32_t u = 0; u < v && !seen; ++u)
        seen = (u & a.window_mask()) == (v & a.window_mask()) &&
               (u & b.window_mask()) == (v & b.window_mask());
      if (seen) continue;
      const Sup s = pair_gap(view_of(a.map_for(v)), view_of(b.map_for(v)), grid);
      d.lower = std::max(d.lower, s.lower);
      d.upper = std::max(d.upper, s.upper);
    }
    return d;
  }
  d.base_samples = base_samples;
  for (int j = 0; j < base_samples; ++j) {
    const double y = (j + 0.5) / base_samples;
    const Sup s = pair_gap(view_of(a.family(), select_fiber_map(y)),
                           view_of(b.family(), select_fiber_map(y)), grid);
    d.lower = std::max(d.lower, s.lower);
    d.upper = std::max(d.upper, s.upper);
  }
  return d;
}

PerturbationSpec random_perturbation(std::uint64_t seed, int harmonics, int window) {
  if (harmonics < 1 || harmonics > 3)
    throw std::invalid_argument("perturbation: harmonics must be in [1, 3]");
  if (window < 1 || window > 8)
    throw std::invalid_argument("perturbation: window must be in [1, 8]");
  PerturbationSpec spec;
  spec.seed = seed;
  spec.harmonics = harmonics;
  spec.window = window;
  BitStream rng(seed, kCoefficientShard);
  spec.coefficients.resize(std::size_t{1} << window);
  for (auto& row : spec.coefficients) {
    row.resize(2 * harmonics);
    for (auto& c : row) c = 2.0 * rng.next_uniform() - 1.0;
  }
  return spec;
}

SkewSystem with_perturbation(const SkewSystem& sys, PerturbationSpec spec) {
  if (sys.base() != BaseKind::Bernoulli)
    throw std::invalid_argument("perturbations are implemented for the Bernoulli base only");
  if (spec.coefficients.size() != (std::size_t{1} << spec.window))
    throw std::invalid_argument("perturbation: need one coefficient row per window value");
  for (const auto& row : spec.coefficients)
    if (row.size() != static_cast<std::size_t>(2 * spec.harmonics))
      throw std::invalid_argument("perturbation: coefficient row has the wrong length");

  constexpr int kKnots = 1024;
  const FiberMapFamily& fam = sys.family();
  std::vector<FiberMap> maps;
  maps.reserve(spec.coefficients.size());
  for (std::uint32_t v = 0; v < spec.coefficients.size(); ++v) {
    const FiberMap& base = (v & 1u) ? fam.f1 : fam.f0;
    std::vector<PiecewiseLift::Segment> segs;
    for (const auto& s : base.forward().segments()) {
      std::vector<double> ys(kKnots + 1), ds(kKnots + 1);
      for (int j = 0; j <= kKnots; ++j) {
        const double x = j == kKnots ? s.x1 : s.x0 + (s.x1 - s.x0) * j / kKnots;
        // Interior knots lie strictly inside the piece; endpoints use its own data.
        const double y = j == 0 ? s.y0 : j == kKnots ? s.y1 : base.lift(x);
        const double dy = j == 0 ? s.d0 : j == kKnots ? s.d1 : base.lift_derivative(x);
        ys[j] = y + spec.bump(v, x);
        ds[j] = dy + spec.bump_derivative(v, x);
      }
      segs.push_back(PiecewiseLift::Segment::table(s.x0, s.x1, std::move(ys), std::move(ds)));
    }
    maps.push_back(FiberMap::from_lift(PiecewiseLift(std::move(segs))));
  }
  SkewSystem out = SkewSystem::bernoulli_with_maps(fam, std::move(maps), spec.window);
  out.perturbation_ = std::move(spec);
  return out;
}

SkewSystem perturb(const SkewSystem& sys, std::uint64_t seed, double budget,
                   const PerturbOptions& options) {
  if (sys.base() != BaseKind::Bernoulli)
    throw std::invalid_argument("perturb: implemented for the Bernoulli base only");
  if (sys.perturbation())
    throw std::invalid_argument("perturb: system is already perturbed");
  const double radius = sys.nu() * sys.nu() / 4.0;
  if (!(budget >= 0.0) || budget > radius * (1.0 + 1e-12))
    throw std::domain_error("perturb: budget must lie in [0, nu^2/4]");
  if (budget == 0.0) return sys;

  PerturbationSpec spec = random_perturbation(seed, options.harmonics, options.window);
  spec.budget = budget;
  const double target = options.fill * budget;

  auto measure = [&](double amplitude, SkewSystem* keep) {
    PerturbationSpec s = spec;
    s.amplitude = amplitude;
    try {
      SkewSystem candidate = with_perturbation(sys, std::move(s));
      const double d = c1p_distance(sys, candidate, options.grid).upper;
      if (keep) *keep = std::move(candidate);
      return d;
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // The distance is close to linear in the amplitude; bracket, then bisect.
  const double probe = budget * 1e-3;
  const double d_probe = measure(probe, nullptr);
  if (!(d_probe > 0.0) || !std::isfinite(d_probe))
    throw std::runtime_error("perturb: degenerate probe distance for seed " +
                             std::to_string(seed));
  double lo = 0.0, hi = probe * target / d_probe * 1.25;
  for (int i = 0; i < 60 && measure(hi, nullptr) <= target; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  SkewSystem best = sys;
  double best_d = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    SkewSystem cand;
    const double d = measure(mid, &cand);
    if (d <= target) {
      lo = mid;
      best = std::move(cand);
      best_d = d;
      if (d >= 0.97 * target) break;
    } else {
      hi = mid;
    }
  }
  if (!best.perturbation() || best_d > budget)
    throw std::runtime_error("perturb: no admissible amplitude for seed " +
                             std::to_string(seed) + " within budget " +
                             std::to_string(budget));
  PerturbationSpec done = *best.perturbation();
  done.measured_distance = best_d;
  return with_perturbation(sys, std::move(done));
}

}  // namespace invis
