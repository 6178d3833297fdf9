#pragma once

// Jacobians of the solenoid skew product in rescaled coordinates
// (y, Re z~, Im z~, x~) with z~ = eta z, x~ = eta^2 x, and cone-field checks.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "invis/skew_system.hpp"

namespace invis {

struct ConeParams {
  double eta = 0.01;
  double alpha = 0.25;

  /// Throws std::domain_error unless eta > 0 and 0 < alpha <= 1.
  void validate() const;
};

enum class Splitting { AType, SType };
std::string to_string(Splitting s);

struct JacobianAtPoint {
  Eigen::Matrix4d matrix;
  double fiber_slope = 0.0;
  Splitting tag = Splitting::AType;
};

/// Point of the phase space with a real angular coordinate.
struct PhasePoint {
  double y = 0.0;
  std::complex<double> z{};
  double x = 0.0;  // lift coordinate
};

/// Analytic Jacobian at (y, z, x). The base and fiber blocks do not depend on z.
Eigen::Matrix4d jacobian_matrix(const SkewSystem& sys, const PhasePoint& q, double eta);
JacobianAtPoint jacobian(const SkewSystem& sys, const PhasePoint& q, const ConeParams& params,
                         Splitting tag);

/// The map on (y, Re z, Im z, x) with y not reduced mod 1 and x in lift coordinates.
Eigen::Vector4d skew_map(const SkewSystem& sys, const Eigen::Vector4d& p);
/// Central differences in the original coordinates, conjugated to the rescaled ones.
Eigen::Matrix4d jacobian_fd(const SkewSystem& sys, const PhasePoint& q, double eta,
                            double step = 1e-6);
/// Richardson-extrapolated Jacobian of the twice-iterated map.
Eigen::Matrix4d jacobian_fd_twice(const SkewSystem& sys, const PhasePoint& q, double eta,
                                  double step = 1e-4);

struct ConeMargins {
  double invariance_plus = 0.0;   // d G C+ inside C+
  double expansion_plus = 0.0;    // |d G v| / |v| - 1 on C+
  double invariance_minus = 0.0;  // d G^-1 C- inside C-
  double expansion_minus = 0.0;   // |d G^-1 v| / |v| - 1 on C-

  double min() const;
  bool pass() const { return min() > 0.0; }
  nlohmann::json to_json() const;
};

/// Worst margins over a deterministic net of boundary and interior cone
/// vectors. Cones: C+ = {|v-| <= alpha |v+|}, C- = {|v+| <= alpha |v-|}.
ConeMargins cone_check(const Eigen::Matrix4d& M, Splitting splitting, double alpha,
                       int boundary = 1000, int interior = 1000);
/// Same, enforcing the splitting's fiber-slope requirement (g' < 1 on A,
/// g' > 1 on S); throws std::invalid_argument when it does not hold.
ConeMargins cone_check(const JacobianAtPoint& J, Splitting splitting, double alpha,
                       int boundary = 1000, int interior = 1000);

struct PointMargin {
  PhasePoint q;
  Splitting tag = Splitting::AType;
  ConeMargins margins;
  Eigen::Matrix4d matrix;
};

struct HyperbolicityReport {
  ConeParams params;
  int samples_A = 0;
  int samples_S = 0;
  ConeMargins min_A;
  ConeMargins min_S;
  std::vector<PointMargin> failures;  // capped at 16
  std::vector<PointMargin> points;    // every sample when keep_points is set
  bool pass = false;

  nlohmann::json to_json() const;
};

struct AuditOptions {
  int boundary = 1000;
  int interior = 1000;
  bool keep_points = false;
};

/// Cone checks at `samples` points on A (forward orbit in B x I) and on S
/// (fiber point on the repelling graph, reached by short backward walks).
HyperbolicityReport hyperbolicity_audit(const SkewSystem& sys, int samples,
                                        const ConeParams& params, std::uint64_t seed,
                                        const AuditOptions& options = {});

struct EtaSearch {
  bool found = false;
  double eta = 0.0;
  std::vector<double> tried;
  HyperbolicityReport report;
  nlohmann::json to_json() const;
};

/// eta = 0.1, 0.05, ... until every margin is positive; gives up below 1e-4.
EtaSearch search_eta(const SkewSystem& sys, int samples, double alpha, std::uint64_t seed,
                     const AuditOptions& options = {});

struct FdAgreement {
  int points = 0;
  double max_relative_error = 0.0;
  nlohmann::json to_json() const;
};

/// Analytic vs central-difference Jacobians at orbit points on A.
FdAgreement finite_difference_agreement(const SkewSystem& sys, int points, double eta,
                                        std::uint64_t seed);

/// Orbit samples used by the audit (exposed for tests).
std::vector<PhasePoint> sample_attractor(const SkewSystem& sys, int count, std::uint64_t seed);
std::vector<PhasePoint> sample_repeller(const SkewSystem& sys, int count, std::uint64_t seed);

}  // namespace invis
