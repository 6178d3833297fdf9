#include "invis/fiber_maps.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace invis {
namespace {

struct ValueSlope {
  double value;
  double slope;
};

inline ValueSlope hermite(double s, double h, double y0, double y1, double d0,
                          double d1) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  const double slope = ((6 * s2 - 6 * s) * (y0 - y1)) / h +
                       (3 * s2 - 4 * s + 1) * d0 + (3 * s2 - 2 * s) * d1;
  return {value, slope};
}

inline ValueSlope eval_segment(const PiecewiseLift::Segment& seg, double x) {
  using Kind = PiecewiseLift::Kind;
  switch (seg.kind) {
    case Kind::Affine:
      return {seg.anchor_y + seg.slope * (x - seg.anchor_x), seg.slope};
    case Kind::Cubic: {
      const double h = seg.x1 - seg.x0;
      return hermite((x - seg.x0) / h, h, seg.y0, seg.y1, seg.d0, seg.d1);
    }
    case Kind::Table: {
      const int cells = static_cast<int>(seg.ys.size()) - 1;
      const double h = (seg.x1 - seg.x0) / cells;
      const double u = (x - seg.x0) / h;
      const int j = std::clamp(static_cast<int>(std::floor(u)), 0, cells - 1);
      return hermite(u - j, h, seg.ys[j], seg.ys[j + 1], seg.ds[j],
                     seg.ds[j + 1]);
    }
  }
  return {0.0, 0.0};
}

// Root of the segment's lift equal to y, for y inside the segment image.
double solve_on_segment(const PiecewiseLift::Segment& seg, double y) {
  double lo = seg.x0, hi = seg.x1;
  double x = seg.x0 + (y - seg.y0) / (seg.y1 - seg.y0) * (seg.x1 - seg.x0);
  for (int it = 0; it < 200; ++it) {
    const auto [v, d] = eval_segment(seg, x);
    const double r = v - y;
    if (r == 0.0) return x;
    if (r > 0) hi = std::min(hi, x);
    else lo = std::max(lo, x);
    double next = x - r / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-17 * (1.0 + std::abs(x))) return next;
    x = next;
    if (hi - lo <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

void check_monotone(const PiecewiseLift::Segment& seg, std::size_t index) {
  auto fail = [&](const std::string& what) {
    throw std::domain_error("lift piece " + std::to_string(index) + ": " + what);
  };
  using Kind = PiecewiseLift::Kind;
  if (!(seg.x1 > seg.x0)) fail("empty interval");
  if (seg.kind == Kind::Affine) {
    if (!(seg.slope > 0)) fail("non-positive slope");
    return;
  }
  const int samples = seg.kind == Kind::Table
                          ? 4 * (static_cast<int>(seg.ys.size()) - 1)
                          : 256;
  for (int i = 0; i <= samples; ++i) {
    const double x = seg.x0 + (seg.x1 - seg.x0) * i / samples;
    if (!(eval_segment(seg, x).slope > 0)) fail("lift is not increasing");
  }
}

}  // namespace

PiecewiseLift::Segment PiecewiseLift::Segment::affine(double x0, double x1,
                                                      double anchor_x,
                                                      double anchor_y,
                                                      double slope) {
  Segment s;
  s.kind = Kind::Affine;
  s.x0 = x0;
  s.x1 = x1;
  s.anchor_x = anchor_x;
  s.anchor_y = anchor_y;
  s.slope = slope;
  s.y0 = anchor_y + slope * (x0 - anchor_x);
  s.y1 = anchor_y + slope * (x1 - anchor_x);
  s.d0 = s.d1 = slope;
  return s;
}

PiecewiseLift::Segment PiecewiseLift::Segment::cubic(double x0, double x1,
                                                     double y0, double y1,
                                                     double d0, double d1) {
  Segment s;
  s.kind = Kind::Cubic;
  s.x0 = x0;
  s.x1 = x1;
  s.y0 = y0;
  s.y1 = y1;
  s.d0 = d0;
  s.d1 = d1;
  return s;
}

PiecewiseLift::Segment PiecewiseLift::Segment::table(double x0, double x1,
                                                     std::vector<double> ys,
                                                     std::vector<double> ds) {
  if (ys.size() < 2 || ys.size() != ds.size())
    throw std::invalid_argument("table piece needs >= 2 matching knots");
  Segment s;
  s.kind = Kind::Table;
  s.x0 = x0;
  s.x1 = x1;
  s.y0 = ys.front();
  s.y1 = ys.back();
  s.d0 = ds.front();
  s.d1 = ds.back();
  s.ys = std::move(ys);
  s.ds = std::move(ds);
  return s;
}

PiecewiseLift::PiecewiseLift(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("lift has no pieces");
  start_ = segments_.front().x0;
}

double PiecewiseLift::reduce(double& x) const {
  const double t = x - start_;
  if (t >= 0.0 && t < kCirclePeriod) return 0.0;
  const double shift = kCirclePeriod * std::floor(t / kCirclePeriod);
  x -= shift;
  return shift;
}

std::size_t PiecewiseLift::segment_index(double x) const {
  reduce(x);
  std::size_t i = 0;
  while (i + 1 < segments_.size() && x > segments_[i].x1) ++i;
  return i;
}

std::pair<double, double> PiecewiseLift::value_and_derivative(double x) const {
  const double shift = reduce(x);
  std::size_t i = 0;
  while (i + 1 < segments_.size() && x > segments_[i].x1) ++i;
  const auto r = eval_segment(segments_[i], x);
  return {r.value + shift, r.slope};
}

double PiecewiseLift::value(double x) const {
  return value_and_derivative(x).first;
}

double PiecewiseLift::derivative(double x) const {
  return value_and_derivative(x).second;
}

FiberMap FiberMap::from_lift(PiecewiseLift forward, int inverse_knots) {
  const auto& segs = forward.segments();
  const double start = forward.start();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    check_monotone(segs[i], i);
    if (i + 1 < segs.size()) {
      const auto& next = segs[i + 1];
      if (std::abs(segs[i].x1 - next.x0) > 1e-14)
        throw std::domain_error("lift pieces are not contiguous");
      if (std::abs(segs[i].y1 - next.y0) > 1e-12)
        throw std::domain_error("lift is discontinuous at " +
                                std::to_string(next.x0));
      if (std::abs(segs[i].d1 - next.d0) > 1e-9)
        throw std::domain_error("lift is not C^1 at " + std::to_string(next.x0));
    }
  }
  if (std::abs(segs.back().x1 - (start + kCirclePeriod)) > 1e-12)
    throw std::domain_error("lift pieces do not cover one period");
  if (std::abs(segs.back().y1 - (segs.front().y0 + kCirclePeriod)) > 1e-12)
    throw std::domain_error("lift is not of degree one");
  if (std::abs(segs.back().d1 - segs.front().d0) > 1e-9)
    throw std::domain_error("lift is not C^1 across the period seam");

  std::vector<PiecewiseLift::Segment> inv;
  inv.reserve(segs.size());
  for (const auto& s : segs) {
    if (s.kind == PiecewiseLift::Kind::Affine) {
      inv.push_back(PiecewiseLift::Segment::affine(s.y0, s.y1, s.anchor_y,
                                                   s.anchor_x, 1.0 / s.slope));
      continue;
    }
    std::vector<double> xs(inverse_knots + 1), ds(inverse_knots + 1);
    for (int j = 0; j <= inverse_knots; ++j) {
      double x;
      if (j == 0) x = s.x0;
      else if (j == inverse_knots) x = s.x1;
      else x = solve_on_segment(s, s.y0 + (s.y1 - s.y0) * j / inverse_knots);
      xs[j] = x;
      ds[j] = 1.0 / eval_segment(s, x).slope;
    }
    inv.push_back(
        PiecewiseLift::Segment::table(s.y0, s.y1, std::move(xs), std::move(ds)));
  }
  // Force exact contiguity of the inverse pieces.
  for (std::size_t i = 0; i + 1 < inv.size(); ++i) inv[i + 1].x0 = inv[i].x1;

  FiberMap m;
  m.forward_ = std::move(forward);
  m.inverse_ = PiecewiseLift(std::move(inv));
  return m;
}

double FiberMap::lift_inverse(double y) const {
  double x = inverse_.value(y);
  for (int it = 0; it < 12; ++it) {
    const auto [v, d] = forward_.value_and_derivative(x);
    const double dx = (v - y) / d;
    x -= dx;
    if (std::abs(dx) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double FiberMap::inverse_derivative(double y) const {
  return 1.0 / forward_.derivative(lift_inverse(y));
}

FiberMapFamily build_family(int n) {
  if (n < 5)
    throw std::domain_error("build_family: need n >= 5 so that 1/4 - 1/n > 0 "
                            "(got n = " + std::to_string(n) + ")");
  FiberMapFamily fam;
  fam.n = n;
  const double nu = 1.0 / n;
  fam.nu = nu;
  fam.I = {-nu, 1.0 + nu};
  fam.J = {-2.0 / 3.0, -1.0 / 3.0};
  fam.l = 1.0 - nu / 2.0;

  // Fundamental interval [-nu, 2 - nu]: I, upper gap, J + 2, lower gap + 2.
  const double i_hi = 1.0 + nu;
  const double j_lo = 4.0 / 3.0, j_hi = 5.0 / 3.0;
  const double end = 2.0 - nu;
  const double j_slope = 1.0 + nu;
  const auto j_piece = PiecewiseLift::Segment::affine(j_lo, j_hi, 1.5, 1.5, j_slope);

  auto make = [&](double fixed, double slope) {
    const auto on_i = PiecewiseLift::Segment::affine(-nu, i_hi, fixed, fixed, slope);
    std::vector<PiecewiseLift::Segment> segs;
    segs.push_back(on_i);
    segs.push_back(PiecewiseLift::Segment::cubic(i_hi, j_lo, on_i.y1, j_piece.y0,
                                                 slope, j_slope));
    segs.push_back(j_piece);
    segs.push_back(PiecewiseLift::Segment::cubic(j_hi, end, j_piece.y1,
                                                 on_i.y0 + kCirclePeriod, j_slope,
                                                 slope));
    return FiberMap::from_lift(PiecewiseLift(std::move(segs)));
  };
  fam.f0 = make(0.0, 1.0 - nu / 2.0);
  fam.f1 = make(1.0, 0.25 - nu);
  fam.a = composed_attractor(fam);
  fam.I_tilde = {0.0, fam.a};
  return fam;
}

double isotopy_lift(const FiberMapFamily& family, double t, double x) {
  const double w = t * t;
  return (1.0 - w) * family.f0.lift(x) + w * family.f1.lift(x);
}

double isotopy_lift_dx(const FiberMapFamily& family, double t, double x) {
  const double w = t * t;
  return (1.0 - w) * family.f0.lift_derivative(x) +
         w * family.f1.lift_derivative(x);
}

double isotopy_lift_dt(const FiberMapFamily& family, double t, double x) {
  return 2.0 * t * (family.f1.lift(x) - family.f0.lift(x));
}

CirclePoint isotopy_eval(const FiberMapFamily& family, double t, CirclePoint x) {
  return CirclePoint(isotopy_lift(family, t, x.value()));
}

double isotopy_lift_inverse(const FiberMapFamily& family, double t, double y) {
  if (t == 0.0) return family.f0.lift_inverse(y);
  if (t == 1.0) return family.f1.lift_inverse(y);
  double lo = family.f0.lift_inverse(y);
  double hi = family.f1.lift_inverse(y);
  if (lo > hi) std::swap(lo, hi);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = isotopy_lift(family, t, x) - y;
    if (r == 0.0) return x;
    if (r > 0) hi = x;
    else lo = x;
    double next = x - r / isotopy_lift_dx(family, t, x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-17 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

double composed_attractor_closed_form(double nu) {
  const double top = 0.75 + nu;
  return top / (top + 0.5 * nu * (0.25 - nu));
}

double composed_attractor(const FiberMapFamily& family) {
  double x = 0.5;
  for (int it = 0; it < 1000000; ++it) {
    const double next = family.f1.lift(family.f0.lift(x));
    if (std::abs(next - x) <= 1e-16) return next;
    x = next;
  }
  throw std::runtime_error("composed_attractor: f1 o f0 iteration did not converge");
}

PhiThreshold phi_threshold(long long n) {
  if (n < 5) throw std::domain_error("phi_threshold: need n >= 5");
  const long double inv = 1.0L / static_cast<long double>(n);
  const long double phi =
      std::pow(1.0L - inv, static_cast<long double>(n - 1)) * (0.75L - inv) + inv;
  const long double doubled =
      std::pow(1.0L - inv / 2.0L, static_cast<long double>(2 * n - 1)) * 0.75L;
  PhiThreshold r;
  r.n = static_cast<int>(n);
  r.phi = static_cast<double>(phi);
  r.phi_above_quarter = phi > 0.25L;
  r.doubled_bound = static_cast<double>(doubled);
  r.doubled_above_quarter = doubled > 0.25L;
  return r;
}

nlohmann::json to_json(const PiecewiseLift& lift) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : lift.segments()) {
    const char* kind = s.kind == PiecewiseLift::Kind::Affine  ? "affine"
                       : s.kind == PiecewiseLift::Kind::Cubic ? "cubic"
                                                              : "table";
    nlohmann::json j{{"kind", kind}, {"x0", s.x0}, {"x1", s.x1}, {"y0", s.y0},
                     {"y1", s.y1},   {"d0", s.d0}, {"d1", s.d1}};
    if (s.kind == PiecewiseLift::Kind::Table) j["knots"] = s.ys.size();
    segs.push_back(std::move(j));
  }
  return {{"start", lift.start()}, {"segments", std::move(segs)}};
}

nlohmann::json to_json(const FiberMapFamily& family) {
  return {{"n", family.n},
          {"nu", family.nu},
          {"I", {family.I.lo, family.I.hi}},
          {"J", {family.J.lo, family.J.hi}},
          {"a", family.a},
          {"l", family.l},
          {"f0", to_json(family.f0.forward())},
          {"f1", to_json(family.f1.forward())}};
}

}  // namespace invis
