#include "invis/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "invis/attractor.hpp"
#include "invis/ergodic.hpp"

namespace invis {
namespace {

void require_solenoid(const SkewSystem& sys, const char* who) {
  if (sys.base() != BaseKind::Solenoid)
    throw std::invalid_argument(std::string(who) + ": solenoid base required");
}

FiberSelector selector_at(double y) {
  return select_fiber_map(y - std::floor(y));
}

// Unit vectors on S^{d-1}, d = 1, 2, 3.
std::vector<Eigen::Vector3d> sphere_net(int d, int count) {
  std::vector<Eigen::Vector3d> out;
  if (d == 1) {
    out.push_back({1, 0, 0});
    out.push_back({-1, 0, 0});
  } else if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.5) / count;
      out.push_back({std::cos(a), std::sin(a), 0});
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double zc = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(1.0 - zc * zc);
      out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), zc});
    }
  }
  return out;
}

struct Net {
  std::vector<int> plus_idx;  // coordinates spanning E+
  std::vector<int> minus_idx;
};

Net net_for(Splitting s) {
  if (s == Splitting::AType) return {{0}, {1, 2, 3}};
  return {{0, 3}, {1, 2}};
}

double norm_of(const Eigen::Vector4d& v, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) s += v[i] * v[i];
  return std::sqrt(s);
}

// Vectors with |v_big| = 1 and |v_small| = r * alpha, r in [0, 1].
std::vector<Eigen::Vector4d> cone_vectors(const std::vector<int>& big, const std::vector<int>& small,
                                          double alpha, int boundary, int interior) {
  const int db = static_cast<int>(big.size());
  const int ds = static_cast<int>(small.size());
  auto count_for = [](int d, int other, int total) {
    if (d == 1) return 2;
    if (other == 1) return std::max(2, total / 2);
    return std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(total)))));
  };
  const auto B = sphere_net(db, count_for(db, ds, boundary));
  const auto S = sphere_net(ds, count_for(ds, db, boundary));
  std::vector<Eigen::Vector4d> out;
  auto make = [&](const Eigen::Vector3d& b, const Eigen::Vector3d& s, double r) {
    Eigen::Vector4d v = Eigen::Vector4d::Zero();
    for (int i = 0; i < db; ++i) v[big[i]] = b[i];
    for (int i = 0; i < ds; ++i) v[small[i]] = r * alpha * s[i];
    return v;
  };
  for (const auto& b : B)
    for (const auto& s : S) out.push_back(make(b, s, 1.0));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < interior; ++i) {
    const double r = std::fmod(i * phi, 1.0);
    out.push_back(make(B[i % B.size()], S[(i / B.size()) % S.size()], r));
  }
  return out;
}

void fold(ConeMargins& into, const ConeMargins& m) {
  into.invariance_plus = std::min(into.invariance_plus, m.invariance_plus);
  into.expansion_plus = std::min(into.expansion_plus, m.expansion_plus);
  into.invariance_minus = std::min(into.invariance_minus, m.invariance_minus);
  into.expansion_minus = std::min(into.expansion_minus, m.expansion_minus);
}

ConeMargins infinite_margins() {
  const double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, inf, inf};
}

Eigen::Vector4d to_vec(const PhasePoint& q) { return {q.y, q.z.real(), q.z.imag(), q.x}; }

}  // namespace

void ConeParams::validate() const {
  if (!(eta > 0.0)) throw std::domain_error("cone params: eta must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("cone params: alpha in (0, 1]");
}

std::string to_string(Splitting s) { return s == Splitting::AType ? "A" : "S"; }

Eigen::Matrix4d jacobian_matrix(const SkewSystem& sys, const PhasePoint& q, double eta) {
  require_solenoid(sys, "jacobian");
  const double lam = sys.params().lambda;
  const FiberSelector sel = selector_at(q.y);
  const double ang = kTwoPi * q.y;
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 0) = 2.0;
  M(1, 0) = -kTwoPi * eta * std::sin(ang);
  M(2, 0) = kTwoPi * eta * std::cos(ang);
  M(1, 1) = lam;
  M(2, 2) = lam;
  M(3, 0) = eta * eta * selector_lift_dy(sys.family(), sel, q.x);
  M(3, 3) = selector_lift_dx(sys.family(), sel, q.x);
  return M;
}

JacobianAtPoint jacobian(const SkewSystem& sys, const PhasePoint& q, const ConeParams& params,
                         Splitting tag) {
  params.validate();
  JacobianAtPoint J;
  J.matrix = jacobian_matrix(sys, q, params.eta);
  J.fiber_slope = J.matrix(3, 3);
  J.tag = tag;
  return J;
}

Eigen::Vector4d skew_map(const SkewSystem& sys, const Eigen::Vector4d& p) {
  require_solenoid(sys, "skew_map");
  const double lam = sys.params().lambda;
  const double ang = kTwoPi * p[0];
  const FiberSelector sel = selector_at(p[0]);
  return {2.0 * p[0], std::cos(ang) + lam * p[1], std::sin(ang) + lam * p[2],
          selector_lift(sys.family(), sel, p[3])};
}

namespace {

template <class Map>
Eigen::Matrix4d central(const Map& G, const Eigen::Vector4d& p, double h) {
  Eigen::Matrix4d J;
  for (int j = 0; j < 4; ++j) {
    Eigen::Vector4d a = p, b = p;
    a[j] += h;
    b[j] -= h;
    J.col(j) = (G(a) - G(b)) / (2.0 * h);
  }
  return J;
}

Eigen::Matrix4d rescale(const Eigen::Matrix4d& J, double eta) {
  const Eigen::Vector4d s(1.0, eta, eta, eta * eta);
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = s[i] * J(i, j) / s[j];
  return out;
}

}  // namespace

Eigen::Matrix4d jacobian_fd(const SkewSystem& sys, const PhasePoint& q, double eta, double step) {
  const auto G = [&](const Eigen::Vector4d& p) { return skew_map(sys, p); };
  return rescale(central(G, to_vec(q), step), eta);
}

Eigen::Matrix4d jacobian_fd_twice(const SkewSystem& sys, const PhasePoint& q, double eta,
                                  double step) {
  const auto G2 = [&](const Eigen::Vector4d& p) { return skew_map(sys, skew_map(sys, p)); };
  const Eigen::Vector4d p = to_vec(q);
  const Eigen::Matrix4d coarse = central(G2, p, step);
  const Eigen::Matrix4d fine = central(G2, p, step / 2.0);
  return rescale((4.0 * fine - coarse) / 3.0, eta);
}

double ConeMargins::min() const {
  return std::min({invariance_plus, expansion_plus, invariance_minus, expansion_minus});
}

nlohmann::json ConeMargins::to_json() const {
  return {{"invariance_plus", invariance_plus},
          {"expansion_plus", expansion_plus},
          {"invariance_minus", invariance_minus},
          {"expansion_minus", expansion_minus}};
}

namespace {

struct ConeNet {
  Net net;
  double alpha;
  std::vector<Eigen::Vector4d> plus;   // vectors of C+
  std::vector<Eigen::Vector4d> minus;  // vectors of C-
};

ConeNet make_net(Splitting splitting, double alpha, int boundary, int interior) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("cone_check: alpha in (0, 1]");
  const Net net = net_for(splitting);
  return {net, alpha, cone_vectors(net.plus_idx, net.minus_idx, alpha, boundary, interior),
          cone_vectors(net.minus_idx, net.plus_idx, alpha, boundary, interior)};
}

ConeMargins check_on(const Eigen::Matrix4d& M, const ConeNet& c) {
  ConeMargins m = infinite_margins();
  const auto& P = c.net.plus_idx;
  const auto& Q = c.net.minus_idx;
  for (const auto& v : c.plus) {
    const Eigen::Vector4d w = M * v;
    const double nw = w.norm();
    m.invariance_plus = std::min(m.invariance_plus, (c.alpha * norm_of(w, P) - norm_of(w, Q)) / nw);
    m.expansion_plus = std::min(m.expansion_plus, nw / v.norm() - 1.0);
  }
  const Eigen::Matrix4d Minv = M.inverse();
  for (const auto& v : c.minus) {
    const Eigen::Vector4d w = Minv * v;
    const double nw = w.norm();
    m.invariance_minus = std::min(m.invariance_minus, (c.alpha * norm_of(w, Q) - norm_of(w, P)) / nw);
    m.expansion_minus = std::min(m.expansion_minus, nw / v.norm() - 1.0);
  }
  return m;
}

}  // namespace

ConeMargins cone_check(const Eigen::Matrix4d& M, Splitting splitting, double alpha, int boundary,
                       int interior) {
  return check_on(M, make_net(splitting, alpha, boundary, interior));
}

ConeMargins cone_check(const JacobianAtPoint& J, Splitting splitting, double alpha, int boundary,
                       int interior) {
  if (splitting == Splitting::AType && !(J.fiber_slope < 1.0))
    throw std::invalid_argument("cone_check: A-type splitting needs fiber slope < 1");
  if (splitting == Splitting::SType && !(J.fiber_slope > 1.0))
    throw std::invalid_argument("cone_check: S-type splitting needs fiber slope > 1");
  return cone_check(J.matrix, splitting, alpha, boundary, interior);
}

std::vector<PhasePoint> sample_attractor(const SkewSystem& sys, int count, std::uint64_t seed) {
  require_solenoid(sys, "sample_attractor");
  const FiberMapFamily& fam = sys.family();
  BitStream xs(seed, 0xA77);
  SolenoidState s{SolenoidPoint::from_stream(BitStream(seed, 0xA)),
                  fam.I.lo + fam.I.length() * xs.next_uniform()};
  for (int k = 0; k < 1000; ++k) solenoid_apply_unchecked(sys, s);
  std::vector<PhasePoint> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    if (in_I(s.x, fam.nu)) out.push_back({s.b.y(), s.b.z(), s.x});
    solenoid_apply_unchecked(sys, s);
  }
  return out;
}

std::vector<PhasePoint> sample_repeller(const SkewSystem& sys, int count, std::uint64_t seed) {
  require_solenoid(sys, "sample_repeller");
  constexpr int kTail = 40;
  constexpr int kWalk = 4;
  const FiberMapFamily& fam = sys.family();
  BitStream tails(seed, 0x5);
  std::vector<PhasePoint> out;
  out.reserve(count);
  std::uint64_t group = 0;
  while (static_cast<int>(out.size()) < count) {
    std::vector<std::uint8_t> past(kTail);
    for (auto& b : past) b = static_cast<std::uint8_t>(tails.next_bit());
    SolenoidPoint b(BitQueue::with_prefix(past, BitQueue::from_stream(BitStream(seed, 0x100 + group++))),
                    {});
    for (int k = 0; k < kTail; ++k) b.advance(sys.params());
    const GraphSample rep = repeller_bracket(sys, b, 60);
    double x = 0.5 * (rep.interval.lo + rep.interval.hi);
    out.push_back({b.y(), b.z(), x});
    for (int k = 0; k < kWalk && static_cast<int>(out.size()) < count; ++k) {
      b.retreat(past[kTail - 1 - k], sys.params());
      x = selector_lift_inverse(fam, select_fiber_map(b.prefix64(), b.y()), x);
      out.push_back({b.y(), b.z(), x});
    }
  }
  return out;
}

nlohmann::json HyperbolicityReport::to_json() const {
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& f : failures) {
    nlohmann::json mat = nlohmann::json::array();
    for (int i = 0; i < 4; ++i)
      mat.push_back({f.matrix(i, 0), f.matrix(i, 1), f.matrix(i, 2), f.matrix(i, 3)});
    fails.push_back({{"set", to_string(f.tag)},
                     {"y", f.q.y},
                     {"re_z", f.q.z.real()},
                     {"im_z", f.q.z.imag()},
                     {"x", f.q.x},
                     {"margins", f.margins.to_json()},
                     {"matrix", mat}});
  }
  return {{"eta", params.eta},
          {"alpha", params.alpha},
          {"samples_A", samples_A},
          {"samples_S", samples_S},
          {"splitting_A", {{"unstable_dim", 1}, {"stable_dim", 3}}},
          {"splitting_S", {{"unstable_dim", 2}, {"stable_dim", 2}}},
          {"min_A", min_A.to_json()},
          {"min_S", min_S.to_json()},
          {"failures", fails},
          {"pass", pass}};
}

HyperbolicityReport hyperbolicity_audit(const SkewSystem& sys, int samples,
                                        const ConeParams& params, std::uint64_t seed,
                                        const AuditOptions& options) {
  require_solenoid(sys, "hyperbolicity_audit");
  params.validate();
  if (samples < 1) throw std::invalid_argument("hyperbolicity_audit: samples >= 1");
  HyperbolicityReport r;
  r.params = params;
  r.samples_A = samples;
  r.samples_S = samples;
  r.min_A = infinite_margins();
  r.min_S = infinite_margins();

  for (Splitting tag : {Splitting::AType, Splitting::SType}) {
    const auto pts = tag == Splitting::AType ? sample_attractor(sys, samples, seed)
                                             : sample_repeller(sys, samples, seed);
    const ConeNet cone = make_net(tag, params.alpha, options.boundary, options.interior);
    std::vector<PointMargin> res(pts.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pts.size()); ++i) {
      const JacobianAtPoint J = jacobian(sys, pts[i], params, tag);
      PointMargin pm;
      pm.q = pts[i];
      pm.tag = tag;
      pm.matrix = J.matrix;
      const bool slope_ok = tag == Splitting::AType ? J.fiber_slope < 1.0 : J.fiber_slope > 1.0;
      if (slope_ok) {
        pm.margins = check_on(J.matrix, cone);
      } else {
        const double bad = -std::numeric_limits<double>::infinity();
        pm.margins = {bad, bad, bad, bad};
      }
      res[i] = pm;
    }
    ConeMargins& agg = tag == Splitting::AType ? r.min_A : r.min_S;
    for (const auto& pm : res) {
      fold(agg, pm.margins);
      if (!pm.margins.pass() && r.failures.size() < 16) r.failures.push_back(pm);
      if (options.keep_points) r.points.push_back(pm);
    }
  }
  r.pass = r.min_A.pass() && r.min_S.pass();
  return r;
}

nlohmann::json EtaSearch::to_json() const {
  return {{"found", found}, {"eta", eta}, {"tried", tried}, {"report", report.to_json()}};
}

EtaSearch search_eta(const SkewSystem& sys, int samples, double alpha, std::uint64_t seed,
                     const AuditOptions& options) {
  EtaSearch s;
  for (double eta = 0.1; eta >= 1e-4; eta /= 2.0) {
    s.tried.push_back(eta);
    s.report = hyperbolicity_audit(sys, samples, {eta, alpha}, seed, options);
    if (s.report.pass) {
      s.found = true;
      s.eta = eta;
      return s;
    }
  }
  return s;
}

nlohmann::json FdAgreement::to_json() const {
  return {{"points", points}, {"max_relative_error", max_relative_error}};
}

FdAgreement finite_difference_agreement(const SkewSystem& sys, int points, double eta,
                                        std::uint64_t seed) {
  FdAgreement a;
  a.points = points;
  for (const auto& q : sample_attractor(sys, points, seed)) {
    const Eigen::Matrix4d an = jacobian_matrix(sys, q, eta);
    const Eigen::Matrix4d fd = jacobian_fd(sys, q, eta);
    const double rel = (an - fd).cwiseAbs().maxCoeff() / an.cwiseAbs().maxCoeff();
    a.max_relative_error = std::max(a.max_relative_error, rel);
  }
  return a;
}

}  // namespace invis
