#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "admpriors/grid.hpp"
#include "admpriors/mixture.hpp"

namespace admpriors {

enum class CovarianceKind { Identity, Constant, Correlation, Mixture, MixtureWallLimit, Tabulated, Custom };

/// Provider of the asymptotic covariance V(x).  Cheap to copy (shared state).
class CovarianceModel {
 public:
  static CovarianceModel identity(int d);
  static CovarianceModel constant(const Mat& v);
  /// d = 1, V(rho) = (1 - rho^2)^2 on (-1, 1).
  static CovarianceModel correlation();
  static CovarianceModel mixture(QuadratureConfig q = {});
  /// Information from the wall limits (the nearer of x1 = 0, x2 = 0).  The
  /// limit information is singular, so only inverse() is available.
  static CovarianceModel mixture_wall_limit();
  static CovarianceModel tabulated(TensorField field);
  static CovarianceModel custom(int d, std::string name, std::function<Mat(const Vec&)> v,
                                std::function<Vec(const Vec&)> divergence = {});

  CovarianceKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const std::string& name() const { return name_; }

  Mat operator()(const Vec& x) const;
  /// V^{-1}(x); for the mixture this is the information matrix, computed
  /// without inversion and therefore usable arbitrarily close to the walls.
  Mat inverse(const Vec& x) const;
  /// sum_j d_j V_ij: analytic where known, else central differences at step 1e-5.
  Vec divergence(const Vec& x) const;

  /// V(x) = c I with one constant c for all x.
  bool is_isotropic() const;

  /// c V.
  CovarianceModel scaled(double c) const;

 private:
  CovarianceKind kind_ = CovarianceKind::Identity;
  int dimension_ = 1;
  std::string name_;
  double scale_ = 1.0;
  std::shared_ptr<const Mat> constant_;
  std::shared_ptr<const TensorField> table_;
  QuadratureConfig quadrature_;
  std::function<Mat(const Vec&)> custom_;
  std::function<Vec(const Vec&)> custom_divergence_;
};

/// Evaluates the model at every node (in parallel over nodes).
TensorField tabulate(const CovarianceModel& model, const Grid& grid, unsigned threads = 1);

/// 1-D Jeffreys density V^{-1/2}.
double jeffreys_density(const CovarianceModel& model, double x);

struct Ellipse {
  double theta1;
  double theta2;
  std::vector<std::array<double, 2>> vertices;  // 65 points, last repeats the first
  bool near_singular = false;
  double condition_number = 0.0;
};

/// Level-set ellipse of N(theta, V(theta)/n) at the given confidence level.
/// Near-singular points are returned flagged with no vertices.
std::vector<Ellipse> covariance_ellipses(const CovarianceModel& model, const std::vector<std::array<double, 2>>& thetas,
                                         double n, double level);

/// Radius of the 2-dof chi-square level set.
double chi_square2_radius(double level);

}  // namespace admpriors
