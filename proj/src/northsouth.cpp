#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "invis/skew_system.hpp"

namespace invis {
namespace {

enum class SlopeRule { Digit0, Digit1, Contracting };

struct Candidate {
  std::string label;
  SlopeRule rule;
  std::function<double(double)> f, df, finv;
};

struct Fixed {
  double x;
  double slope;
  bool attracting;
};

std::vector<Fixed> fixed_points(const Candidate& m, int grid) {
  const double h = kCirclePeriod / grid;
  auto D = [&](double x) { return m.f(x) - x; };
  std::vector<int> idx;
  std::vector<int> sgn;
  for (int i = 0; i < grid; ++i) {
    const double d = D(-1.0 + h * i);
    if (d != 0.0) {
      idx.push_back(i);
      sgn.push_back(d > 0 ? 1 : -1);
    }
  }
  std::vector<Fixed> out;
  if (idx.size() < 2) return out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t next = (k + 1) % idx.size();
    if (sgn[k] == sgn[next]) continue;
    double lo = -1.0 + h * idx[k];
    double hi = -1.0 + h * idx[next];
    if (hi <= lo) hi += kCirclePeriod;
    const int s_lo = sgn[k];
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double d = D(mid);
      if (d == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((d > 0 ? 1 : -1) == s_lo) lo = mid;
      else hi = mid;
    }
    const double x = wrap_circle(0.5 * (lo + hi));
    out.push_back({x, m.df(x), s_lo > 0});
  }
  return out;
}

struct Clause {
  bool pass = true;
  double margin = std::numeric_limits<double>::infinity();
  std::string detail;

  void take(bool ok, double slack, const std::string& who) {
    if (!ok && pass) detail = who;
    pass = pass && ok;
    if (slack < margin) {
      margin = slack;
      if (pass) detail = "tightest: " + who;
    }
  }
};

double min_over(const std::function<double(double)>& g, double lo, double hi, int grid) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) m = std::min(m, g(lo + (hi - lo) * i / grid));
  return m;
}

double max_over(const std::function<double(double)>& g, double lo, double hi, int grid) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) m = std::max(m, g(lo + (hi - lo) * i / grid));
  return m;
}

}  // namespace

bool NorthSouthReport::all_pass() const {
  return !clauses.empty() &&
         std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.pass; });
}

const ChecklistClause* NorthSouthReport::find(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::json NorthSouthReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : clauses)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}, {"detail", c.detail}});
  return {{"all_pass", all_pass()}, {"clauses", arr}};
}

NorthSouthReport verify_northsouth(const SkewSystem& sys, int grid) {
  const FiberMapFamily& fam = sys.family();
  const double nu = fam.nu;
  std::vector<Candidate> maps;
  if (sys.base() == BaseKind::Bernoulli) {
    for (std::uint32_t v = 0; v < sys.maps().size(); ++v) {
      const FiberMap& m = sys.maps()[v];
      maps.push_back({"window " + std::to_string(v), (v & 1u) ? SlopeRule::Digit1 : SlopeRule::Digit0,
                      [&m](double x) { return m.lift(x); },
                      [&m](double x) { return m.lift_derivative(x); },
                      [&m](double y) { return m.lift_inverse(y); }});
    }
  } else {
    std::vector<double> ys = {0.0, 0.375, 0.5, 0.875};
    for (int j = 0; j < 64; ++j) ys.push_back((j + 0.5) / 64.0);
    for (double y : ys) {
      const FiberSelector sel = select_fiber_map(y);
      const SlopeRule rule = sel.kind == FiberSelector::Kind::F0   ? SlopeRule::Digit0
                             : sel.kind == FiberSelector::Kind::F1 ? SlopeRule::Digit1
                                                                   : SlopeRule::Contracting;
      std::ostringstream label;
      label << "y=" << y;
      maps.push_back({label.str(), rule,
                      [&fam, sel](double x) { return selector_lift(fam, sel, x); },
                      [&fam, sel](double x) { return selector_lift_dx(fam, sel, x); },
                      [&fam, sel](double v) { return selector_lift_inverse(fam, sel, v); }});
    }
  }

  Clause count, attr, rep, near, slope_i, slope_j, drift_lo, drift_hi, inv_i, inv_j, moderate;
  const double drift = nu * nu / 4.0;
  const double i_lo = -nu, i_hi = 1.0 + nu;
  const double j_lo = -2.0 / 3.0, j_hi = -1.0 / 3.0;
  for (const auto& m : maps) {
    const auto fps = fixed_points(m, grid);
    int n_attr = 0, n_rep = 0;
    for (const auto& p : fps) (p.attracting ? n_attr : n_rep)++;
    count.take(n_attr == 1 && n_rep == 1, n_attr == 1 && n_rep == 1 ? 0.0 : -1.0,
               m.label + ": " + std::to_string(n_attr) + " attractor(s), " +
                   std::to_string(n_rep) + " repeller(s)");
    if (n_attr == 1 && n_rep == 1) {
      const Fixed& a = fps[0].attracting ? fps[0] : fps[1];
      const Fixed& r = fps[0].attracting ? fps[1] : fps[0];
      const double ax = a.x < i_lo ? a.x + kCirclePeriod : a.x;
      const double a_slack = std::min({ax - i_lo, i_hi - ax, 1.0 - a.slope});
      attr.take(a_slack > 0, a_slack, m.label + ": attractor at " + std::to_string(ax));
      const double r_slack = std::min({r.x - j_lo, j_hi - r.x, r.slope - 1.0});
      rep.take(r_slack > 0, r_slack, m.label + ": repeller at " + std::to_string(r.x));
      if (m.rule != SlopeRule::Contracting) {
        const double target = m.rule == SlopeRule::Digit0 ? 0.0 : 1.0;
        const double s = nu - std::abs(ax - target);
        near.take(s >= 0, s, m.label + ": attractor at " + std::to_string(ax));
      }
    } else {
      attr.take(false, -1.0, m.label);
      rep.take(false, -1.0, m.label);
    }

    const double smin = min_over(m.df, i_lo, i_hi, grid);
    const double smax = max_over(m.df, i_lo, i_hi, grid);
    switch (m.rule) {
      case SlopeRule::Digit0:
        slope_i.take(smin >= 1.0 - nu && smax < 1.0, std::min(smin - (1.0 - nu), 1.0 - smax),
                     m.label + ": slope on I in [" + std::to_string(smin) + ", " +
                         std::to_string(smax) + "]");
        break;
      case SlopeRule::Digit1:
        slope_i.take(smin > 0.0 && smax <= 0.25, std::min(smin, 0.25 - smax),
                     m.label + ": slope on I in [" + std::to_string(smin) + ", " +
                         std::to_string(smax) + "]");
        break;
      case SlopeRule::Contracting:
        slope_i.take(smin > 0.0 && smax < 1.0, std::min(smin, 1.0 - smax),
                     m.label + ": slope on I up to " + std::to_string(smax));
        break;
    }
    const double sj = min_over(m.df, j_lo, j_hi, grid) - (1.0 + nu / 2.0);
    slope_j.take(sj > 0, sj, m.label);

    const double dl = min_over([&](double x) { return m.f(x) - x; }, -1.0 / 3.0, -nu, grid) - drift;
    drift_lo.take(dl >= 0, dl, m.label);
    const double du = min_over([&](double x) { return x - m.f(x); }, 1.0 + nu, 4.0 / 3.0, grid) - drift;
    drift_hi.take(du >= 0, du, m.label);

    const double ii = std::min(m.f(i_lo) - i_lo, i_hi - m.f(i_hi));
    inv_i.take(ii >= 0, ii, m.label);
    const double jj = std::min(m.finv(j_lo) - j_lo, j_hi - m.finv(j_hi));
    inv_j.take(jj >= 0, jj, m.label);

    const double dmax = max_over(m.df, -1.0, 1.0, 2 * grid);
    const double dmin = min_over(m.df, -1.0, 1.0, 2 * grid);
    const double lip = std::max(dmax, dmin > 0 ? 1.0 / dmin : std::numeric_limits<double>::infinity());
    moderate.take(lip <= kModerateLipschitz, kModerateLipschitz - lip, m.label);
  }

  NorthSouthReport report;
  auto add = [&](const char* name, const Clause& c) {
    report.clauses.push_back({name, c.pass, c.margin, c.detail});
  };
  add("one_attractor_one_repeller", count);
  add("hyperbolic_attractor_in_I", attr);
  add("hyperbolic_repeller_in_J", rep);
  if (sys.base() == BaseKind::Bernoulli) add("attractor_within_nu", near);
  add("slope_on_I", slope_i);
  add("slope_on_J", slope_j);
  add("drift_lower_gap", drift_lo);
  add("drift_upper_gap", drift_hi);
  add("I_invariant", inv_i);
  add("J_inverse_invariant", inv_j);
  add("moderate", moderate);
  return report;
}

NorthSouthReport family_invariants(const FiberMapFamily& fam) {
  NorthSouthReport r;
  const double nu = fam.nu;
  auto add = [&r](std::string name, double margin, std::string detail) {
    r.clauses.push_back({std::move(name), margin >= 0.0, margin, std::move(detail)});
  };
  constexpr int kGrid = 10000;
  double round_trip = 0.0;
  for (const FiberMap* g : {&fam.f0, &fam.f1})
    for (int i = 0; i < kGrid; ++i) {
      const double x = -1.0 + 2.0 * i / kGrid;
      round_trip = std::max(round_trip, std::abs(g->lift_inverse(g->lift(x)) - x));
    }
  add("inverse_round_trip", 1e-12 - round_trip, "max |f^-1(f(x)) - x| = " + std::to_string(round_trip));

  const double fixed = std::max(std::abs(fam.f0.lift(0.0)), std::abs(fam.f1.lift(1.0) - 1.0));
  add("prescribed_fixed_points", 1e-15 - fixed, "f0(0), f1(1)");

  double slope_err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = fam.I.lo + fam.I.length() * i / 1000.0;
    slope_err = std::max({slope_err, std::abs(fam.f0.lift_derivative(x) - (1.0 - nu / 2.0)),
                          std::abs(fam.f1.lift_derivative(x) - (0.25 - nu))});
    const double u = fam.J.lo + fam.J.length() * i / 1000.0;
    slope_err = std::max({slope_err, std::abs(fam.f0.lift_derivative(u) - (1.0 + nu)),
                          std::abs(fam.f1.lift_derivative(u) - (1.0 + nu))});
  }
  add("affine_slopes", 1e-12 - slope_err, "max slope deviation on I and J");

  const double a_iter = composed_attractor(fam);
  const double a_gap = std::abs(a_iter - composed_attractor_closed_form(nu));
  add("composed_attractor", 1e-12 - a_gap, "a = " + std::to_string(a_iter));
  add("attractor_range", std::min(a_iter - (1.0 - nu), 1.0 - a_iter), "a in (1 - nu, 1)");
  return r;
}

}  // namespace invis
