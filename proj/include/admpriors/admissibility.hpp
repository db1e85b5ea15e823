#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "admpriors/covariance.hpp"
#include "admpriors/integral_classifier.hpp"
#include "admpriors/prior.hpp"
#include "admpriors/stencil.hpp"

namespace admpriors {

enum class Verdict { Admissible, Inadmissible, Inconclusive };
const char* to_string(Verdict v);

struct BoundaryDiagnostic {
  std::string id;
  std::vector<double> cutoffs;
  std::vector<double> integrals;
  double exponent = 0.0;
  bool pass = false;
  bool ambiguous = false;
};

struct AdmissibilityVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::string method;
  /// True when every necessary condition that was tested holds.
  bool necessary_condition_holds = false;
  std::vector<BoundaryDiagnostic> boundaries;
  std::optional<double> sphere_integral;

  nlohmann::json to_json() const;
};

/// Positive function on (a, b) with optional offset-exact evaluators:
/// near_lower(u) = f(a + u), near_upper(u) = f(b - u) for small u.
struct Function1D {
  std::function<double(double)> value;
  std::function<double(double)> near_lower;
  std::function<double(double)> near_upper;
};

/// pV for a 1-D prior and covariance.
Function1D product_1d(const PriorFamily& prior, const CovarianceModel& v);

/// (1 - rho^2)^{-alpha} (1 - rho^2)^2 with 1 - rho^2 formed from the offset.
Function1D correlation_product(double alpha);

/// Both tails of int (pV)^{-1} divergent => Admissible; either convergent =>
/// Inadmissible.  a, b may be infinite.
AdmissibilityVerdict check_1d(const Function1D& pv, double a, double b, const ClassifierConfig& cfg = {});

struct RadialConfig {
  double r0 = 1.0;
  int directions_2d = 256;
  int directions_3d = 1024;
  double sector_begin = 0.0;  // d = 2 angular sector
  double sector_end = 2.0 * std::numbers::pi;
  bool excluded_origin = false;  // also test the origin as a boundary
  /// The caller asserts a sufficiency result for this family (radial prior,
  /// isotropic V), so a holding condition is reported Admissible.
  bool sufficiency = false;
  double sphere_tol = 1e-6;
  unsigned threads = 1;
  ClassifierConfig classifier;
};

/// Radial condition on R^d: per direction s, W(R, s) is the inverse of
/// int_{r0}^R p^{-1} V^{-1}(r s) r^{1-d} dr; the sphere integral of s'W s in
/// the limit must vanish.
AdmissibilityVerdict check_radial(const std::function<double(const Vec&)>& p, const CovarianceModel& v, int d,
                                  const RadialConfig& cfg = {});

struct BoundaryConfig {
  int samples_per_face = 16;
  double reach = 0.0;  // 0: a quarter of the smallest extent
  unsigned threads = 1;
  ClassifierConfig classifier;
};

/// Wall condition in the normal-eigenvector form: along the inward normal at
/// sampled face points, int_0 (V^{-1})_nn / p must diverge.
AdmissibilityVerdict check_bounded_boundary(const std::function<double(const Vec&)>& p, const CovarianceModel& v,
                                            const DomainSpec& domain, const BoundaryConfig& cfg = {});

/// Exact exponent comparison for PowerRadial (V = I) and CorrelationPower
/// (V = (1 - rho^2)^2).  Other families: UnsupportedFamily.
AdmissibilityVerdict classify_power_law(const PriorFamily& family);

/// max |div(pV grad h)| over interior nodes.
double brown_residual(const ScalarField& p, const TensorField& v, const ScalarField& h,
                      DivergenceScheme scheme = DivergenceScheme::Monotone);

/// Direction sets used by check_radial.
std::vector<Vec> sphere_directions(int d, const RadialConfig& cfg, double& weight);

}  // namespace admpriors
