#pragma once

// Circle diffeomorphisms of S^1 = R/2Z, stored as piecewise C^1 lifts.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <json.hpp>

namespace invis {

inline constexpr double kCirclePeriod = 2.0;

/// Representative of x in [-1, 1).
inline double wrap_circle(double x) {
  if (x >= -1.0 && x < 1.0) return x;
  double r = x - kCirclePeriod * std::floor((x + 1.0) / kCirclePeriod);
  if (r >= 1.0) r -= kCirclePeriod;
  if (r < -1.0) r += kCirclePeriod;
  return r;
}

/// Point of the fiber circle, held in [-1, 1).
class CirclePoint {
 public:
  CirclePoint() = default;
  explicit CirclePoint(double x) : x_(wrap_circle(x)) {}
  double value() const { return x_; }
  friend bool operator==(const CirclePoint&, const CirclePoint&) = default;

 private:
  double x_ = 0.0;
};

/// Closed arc [lo, hi] written in lift coordinates (hi - lo < 2).
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  /// Circle-aware membership: some lift of x lies in [lo - tol, hi + tol].
  bool contains(double x, double tol = 0.0) const {
    double r = x - kCirclePeriod * std::floor((x - lo + tol) / kCirclePeriod);
    return r <= hi + tol;
  }
};

/// Strictly increasing lift F with F(x + 2) = F(x) + 2, given on one
/// fundamental interval [start, start + 2] by consecutive C^1 pieces.
class PiecewiseLift {
 public:
  enum class Kind { Affine, Cubic, Table };

  struct Segment {
    Kind kind = Kind::Affine;
    double x0 = 0.0, x1 = 0.0;
    // Endpoint data, valid for every kind.
    double y0 = 0.0, y1 = 0.0, d0 = 0.0, d1 = 0.0;
    // Affine pieces evaluate as anchor_y + slope * (x - anchor_x).
    double anchor_x = 0.0, anchor_y = 0.0, slope = 0.0;
    // Table pieces: uniform Hermite knots over [x0, x1].
    std::vector<double> ys, ds;

    static Segment affine(double x0, double x1, double anchor_x,
                          double anchor_y, double slope);
    static Segment cubic(double x0, double x1, double y0, double y1,
                         double d0, double d1);
    static Segment table(double x0, double x1, std::vector<double> ys,
                         std::vector<double> ds);
  };

  PiecewiseLift() = default;
  explicit PiecewiseLift(std::vector<Segment> segments);

  double start() const { return start_; }
  const std::vector<Segment>& segments() const { return segments_; }

  double value(double x) const;
  double derivative(double x) const;
  std::pair<double, double> value_and_derivative(double x) const;

  /// Index of the piece containing the reduced representative of x.
  std::size_t segment_index(double x) const;

 private:
  double reduce(double& x) const;

  std::vector<Segment> segments_;
  double start_ = 0.0;
};

/// Orientation-preserving circle diffeomorphism with a stored inverse.
class FiberMap {
 public:
  FiberMap() = default;
  /// Builds the inverse structure; throws std::domain_error unless the lift
  /// is continuous, C^1 across pieces, strictly increasing and of degree 1.
  static FiberMap from_lift(PiecewiseLift forward, int inverse_knots = 1024);

  const PiecewiseLift& forward() const { return forward_; }
  const PiecewiseLift& inverse() const { return inverse_; }

  double lift(double x) const { return forward_.value(x); }
  double lift_derivative(double x) const { return forward_.derivative(x); }
  double lift_inverse(double y) const;
  double inverse_derivative(double y) const;

  CirclePoint eval(CirclePoint p) const { return CirclePoint(lift(p.value())); }
  CirclePoint eval_inverse(CirclePoint p) const {
    return CirclePoint(lift_inverse(p.value()));
  }
  double derivative(CirclePoint p) const { return lift_derivative(p.value()); }

 private:
  PiecewiseLift forward_;
  PiecewiseLift inverse_;
};

/// Lipschitz bound imposed on every fiber map and its inverse.
inline constexpr double kModerateLipschitz = 100.0;

/// The two North-South fiber maps f0, f1 for a given n, with their arcs.
struct FiberMapFamily {
  int n = 0;
  double nu = 0.0;
  Arc I;        // [-nu, 1 + nu], contracting arc
  Arc J;        // [-2/3, -1/3], expanding arc
  Arc I_tilde;  // [0, a]
  double a = 0.0;  // attracting fixed point of f1 o f0
  double l = 0.0;  // common contraction coefficient on I
  FiberMap f0;
  FiberMap f1;

  double repeller() const { return -0.5; }
};

/// Throws std::domain_error for n < 5.
FiberMapFamily build_family(int n);

double isotopy_lift(const FiberMapFamily& family, double t, double x);
/// d/dx of the isotopy lift.
double isotopy_lift_dx(const FiberMapFamily& family, double t, double x);
/// d/dt of the isotopy lift: 2t (F1(x) - F0(x)).
double isotopy_lift_dt(const FiberMapFamily& family, double t, double x);
CirclePoint isotopy_eval(const FiberMapFamily& family, double t, CirclePoint x);
/// Inverse of the isotopy lift, by safeguarded Newton iteration.
double isotopy_lift_inverse(const FiberMapFamily& family, double t, double y);

double composed_attractor_closed_form(double nu);
/// Attracting fixed point of f1 o f0 found by iteration; throws
/// std::runtime_error after 10^6 iterations without convergence.
double composed_attractor(const FiberMapFamily& family);

struct PhiThreshold {
  int n = 0;
  double phi = 0.0;
  bool phi_above_quarter = false;
  double doubled_bound = 0.0;  // (1 - 1/(2n))^(2n-1) * 3/4
  bool doubled_above_quarter = false;
};

PhiThreshold phi_threshold(long long n);

nlohmann::json to_json(const PiecewiseLift& lift);
nlohmann::json to_json(const FiberMapFamily& family);

}  // namespace invis
