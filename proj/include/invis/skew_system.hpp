#pragma once

// Skew products over the Bernoulli shift and over the solenoid.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invis/fiber_maps.hpp"
#include "invis/solenoid.hpp"
#include "invis/symbolic.hpp"

namespace invis {

enum class BaseKind { Bernoulli, Solenoid };

std::string to_string(BaseKind kind);
/// Accepts "bernoulli" or "solenoid"; throws std::invalid_argument otherwise.
BaseKind parse_base(const std::string& text);

/// Trigonometric bump added to the lift of each fiber map:
///   amplitude * sum_h (a_h cos(pi h x) + b_h sin(pi h x)),
/// one coefficient row per digit window (omega_{-(w-1)} ... omega_0).
struct PerturbationSpec {
  std::uint64_t seed = 0;
  double budget = 0.0;
  int harmonics = 3;
  int window = 2;
  double amplitude = 0.0;
  double measured_distance = 0.0;  // padded upper bound of the C^1 distance
  std::vector<std::vector<double>> coefficients;  // [window value][2 * harmonics]

  double bump(std::uint32_t window_value, double x) const;
  double bump_derivative(std::uint32_t window_value, double x) const;
};

class SkewSystem {
 public:
  static SkewSystem bernoulli(const FiberMapFamily& family);
  static SkewSystem solenoid(const FiberMapFamily& family, SolenoidParams params = {});
  /// Bernoulli-based system with arbitrary fiber maps, indexed by the last
  /// `window` digits packed with the current digit least significant.
  static SkewSystem bernoulli_with_maps(const FiberMapFamily& family,
                                        std::vector<FiberMap> maps, int window);

  BaseKind base() const { return base_; }
  const FiberMapFamily& family() const { return *family_; }
  int n() const { return family_->n; }
  double nu() const { return family_->nu; }
  const SolenoidParams& params() const { return params_; }
  const std::optional<PerturbationSpec>& perturbation() const { return perturbation_; }

  /// Number of digits the fiber map depends on (Bernoulli base only).
  int window() const { return window_; }
  std::uint32_t window_mask() const { return (1u << window_) - 1u; }
  const std::vector<FiberMap>& maps() const { return maps_; }
  const FiberMap& map_for(std::uint32_t window_value) const {
    return maps_[window_value & window_mask()];
  }

  nlohmann::json descriptor() const;
  /// FNV-1a of the compact descriptor dump.
  std::uint64_t descriptor_hash() const;

 private:
  friend SkewSystem with_perturbation(const SkewSystem&, PerturbationSpec);

  BaseKind base_ = BaseKind::Bernoulli;
  std::shared_ptr<const FiberMapFamily> family_;
  SolenoidParams params_;
  std::optional<PerturbationSpec> perturbation_;
  int window_ = 1;
  std::vector<FiberMap> maps_;
};

std::uint64_t fnv1a(const std::string& text);

// ---- Bernoulli base ------------------------------------------------------

/// Orbit state over the full shift. `ahead` holds omega_0 ... omega_63 with
/// omega_0 in the top bit; `past` holds omega_{-1}, omega_{-2}, ... with
/// omega_{-1} in the lowest bit.
struct BernoulliState {
  BitStream stream;
  std::uint64_t ahead = 0;
  std::uint64_t past = 0;
  double x = 0.0;

  /// 64 past digits and 64 upcoming digits are drawn from the stream.
  static BernoulliState start(BitStream stream, double x);
  int digit() const { return static_cast<int>(ahead >> 63); }
};

/// Fiber action of one step given the past digits and the current digit.
inline double fiber_step(const SkewSystem& sys, std::uint64_t past, int digit, double x) {
  const std::uint32_t v =
      static_cast<std::uint32_t>((past << 1) | static_cast<std::uint64_t>(digit));
  return wrap_circle(sys.map_for(v).lift(x));
}

/// (omega, x) -> (sigma omega, g_omega(x)); returns the digit consumed.
/// Throws std::invalid_argument for a solenoid-based system.
int step_apply(const SkewSystem& sys, BernoulliState& state);

// ---- Solenoid base -------------------------------------------------------

/// Fiber map over a base point: f0, f1 or the isotopy f_t.
struct FiberSelector {
  enum class Kind { F0, F1, Isotopy };
  Kind kind = Kind::F0;
  double t = 0.0;
  /// dt/dy on the isotopy windows (+8 or -8), 0 elsewhere.
  double dt_dy = 0.0;
};

/// Dyadic regions [0,3/8) f0, [3/8,1/2) f_{8y-3}, [1/2,7/8) f1, [7/8,1) f_{8-8y}.
FiberSelector select_fiber_map(double y);
/// Same selection, with the region read exactly off the leading digits.
inline FiberSelector select_fiber_map(std::uint64_t prefix64, double y) {
  switch (prefix64 >> 61) {
    case 3: return {FiberSelector::Kind::Isotopy, 8.0 * y - 3.0, 8.0};
    case 7: return {FiberSelector::Kind::Isotopy, 8.0 - 8.0 * y, -8.0};
    case 4:
    case 5:
    case 6: return {FiberSelector::Kind::F1, 1.0, 0.0};
    default: return {FiberSelector::Kind::F0, 0.0, 0.0};
  }
}

double selector_lift(const FiberMapFamily& family, const FiberSelector& sel, double x);
double selector_lift_dx(const FiberMapFamily& family, const FiberSelector& sel, double x);
/// d/dy of f_y(x) at fixed x.
double selector_lift_dy(const FiberMapFamily& family, const FiberSelector& sel, double x);
double selector_lift_inverse(const FiberMapFamily& family, const FiberSelector& sel,
                             double y);

struct SolenoidState {
  SolenoidPoint b;
  double x = 0.0;
};

/// F(b, x) = (h(b), f_{y(b)}(x)); returns the digit consumed.
/// Throws std::invalid_argument for a Bernoulli-based system.
inline int solenoid_apply_unchecked(const SkewSystem& sys, SolenoidState& s) {
  const FiberSelector sel = select_fiber_map(s.b.prefix64(), s.b.y());
  s.x = wrap_circle(selector_lift(sys.family(), sel, s.x));
  return s.b.advance(sys.params());
}
int solenoid_apply(const SkewSystem& sys, SolenoidState& s);

/// Largest gap, over `count` random words of length 2..20 without "11" (each
/// followed by a continuation starting with 0), between the solenoid fiber
/// composition and f_{w_{m-1}} o ... o f_{w_0} at random fiber points.
double composition_identity_gap(const SkewSystem& sys, int count, std::uint64_t seed);

// ---- Metric and perturbations ------------------------------------------

struct C1Distance {
  double lower = 0.0;  // grid maximum
  double upper = 0.0;  // grid maximum plus a Lipschitz padding term
  int grid = 0;
  int base_samples = 0;
};

/// sup|f - g| + sup|f' - g'| over the fiber grid, maximised over base
/// samples, for the maps and for their inverses.
C1Distance c1p_distance(const SkewSystem& a, const SkewSystem& b, int grid = 1 << 14,
                        int base_samples = 64);

struct PerturbOptions {
  int harmonics = 3;
  int window = 2;
  int grid = 1 << 14;
  /// Target fraction of the budget for the measured distance.
  double fill = 0.9;
};

/// Random trigonometric perturbation of an unperturbed Bernoulli system,
/// scaled so the measured C^1 distance is at most `budget`. Throws
/// std::domain_error if budget > nu^2/4, std::invalid_argument for a
/// solenoid base, std::runtime_error if no admissible amplitude is found.
SkewSystem perturb(const SkewSystem& sys, std::uint64_t seed, double budget,
                   const PerturbOptions& options = {});

/// Builds the perturbed maps for a fully specified perturbation without any
/// budget check. Throws std::domain_error if a map stops being a diffeomorphism.
SkewSystem with_perturbation(const SkewSystem& sys, PerturbationSpec spec);

/// Unit-scale random coefficients for a perturbation.
PerturbationSpec random_perturbation(std::uint64_t seed, int harmonics, int window);

// ---- North-South checklist ---------------------------------------------

struct ChecklistClause {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // worst slack, negative when violated
  std::string detail;
};

struct NorthSouthReport {
  std::vector<ChecklistClause> clauses;
  bool all_pass() const;
  const ChecklistClause* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Grid checks of the North-South conditions for every fiber map of the
/// system (Bernoulli: each window map; solenoid: sampled base points).
NorthSouthReport verify_northsouth(const SkewSystem& sys, int grid = 1 << 12);

/// Inverse round trips on a 10^4 grid, prescribed fixed points, the I and J
/// slopes and the composed attractor against its closed form.
NorthSouthReport family_invariants(const FiberMapFamily& family);

}  // namespace invis
