#pragma once

#include <functional>
#include <vector>

#include "admpriors/admissibility.hpp"

namespace admpriors {

/// a(x) p(x) where a < 1 only inside the epsilon-collar of walls whose
/// integral condition fails.  Inside such a collar, with u the distance to
/// the wall and q(w) = sqrt(nu'V^{-1}nu / p) along the inward normal,
///   g(u) = 2 (int_0^u q dw) q(u),  a = min[1, 1 - (1 - g(u)/g(epsilon))^3].
class AttenuatedPrior {
 public:
  AttenuatedPrior(std::function<double(const Vec&)> p, CovarianceModel v, DomainSpec domain, double epsilon,
                  std::vector<bool> attenuated_faces);

  double operator()(const Vec& x) const { return factor(x) * base_(x); }
  double factor(const Vec& x) const;
  /// Factor of one face at distance u from face point s (offset exact).
  double face_factor(int axis, Side side, const Vec& s, double u) const;
  bool attenuated(int axis, Side side) const { return faces_[2 * axis + (side == Side::Upper ? 1 : 0)]; }
  double epsilon() const { return epsilon_; }
  const std::function<double(const Vec&)>& base() const { return base_; }
  const CovarianceModel& covariance() const { return v_; }
  const DomainSpec& domain() const { return domain_; }

 private:
  double g(int axis, Side side, const Vec& s, double u) const;

  std::function<double(const Vec&)> base_;
  CovarianceModel v_;
  DomainSpec domain_;
  double epsilon_;
  std::vector<bool> faces_;
};

/// Attenuates every wall face whose boundary check does not pass.
AttenuatedPrior attenuate(const std::function<double(const Vec&)>& p, const CovarianceModel& v,
                          const DomainSpec& domain, double epsilon, const BoundaryConfig& cfg = {});

ScalarField attenuate_on_grid(const AttenuatedPrior& prior, const Grid& grid);

/// pV of an attenuated one-dimensional prior with offset-exact evaluation at
/// both walls, for check_1d.
Function1D attenuated_product_1d(const AttenuatedPrior& prior);

}  // namespace admpriors
