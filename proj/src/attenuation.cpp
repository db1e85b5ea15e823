#include "admpriors/attenuation.hpp"

#include <cmath>

#include "admpriors/error.hpp"
#include "admpriors/quadrature.hpp"

namespace admpriors {

AttenuatedPrior::AttenuatedPrior(std::function<double(const Vec&)> p, CovarianceModel v, DomainSpec domain,
                                 double epsilon, std::vector<bool> attenuated_faces)
    : base_(std::move(p)), v_(std::move(v)), domain_(std::move(domain)), epsilon_(epsilon), faces_(std::move(attenuated_faces)) {
  domain_.validate();
  if (faces_.size() != domain_.face_kinds.size()) throw Error(ErrorCode::InvalidArgument, "attenuate: face flag count");
  for (int i = 0; i < domain_.dimension(); ++i) {
    if (!(epsilon_ > 0.0 && epsilon_ < 0.5 * (domain_.upper[i] - domain_.lower[i]))) {
      throw Error(ErrorCode::InvalidArgument, "attenuate: epsilon must be below half the domain thickness");
    }
  }
}

double AttenuatedPrior::g(int axis, Side side, const Vec& s, double u) const {
  const double sign = side == Side::Lower ? 1.0 : -1.0;
  auto q = [&](double w) {
    Vec x = s;
    x[axis] += sign * w;
    return std::sqrt(v_.inverse(x)(axis, axis) / base_(x));
  };
  // w = u t^2 removes an inverse-square-root singularity of q at the wall
  double integral = 0.0;
  for_each_gauss_point(0.0, 1.0, [&](double t, double wt) { integral += wt * q(u * t * t) * 2.0 * u * t; });
  return 2.0 * integral * q(u);
}

double AttenuatedPrior::face_factor(int axis, Side side, const Vec& s, double u) const {
  if (!attenuated(axis, side) || u >= epsilon_) return 1.0;
  const double top = g(axis, side, s, epsilon_);
  if (!(top > 0.0)) throw Error(ErrorCode::NonPositive, "attenuate: g(epsilon) = 0");
  const double t = g(axis, side, s, u) / top;
  // 1 - (1 - t)^3 written to keep relative accuracy as t -> 0
  return std::min(1.0, t * (3.0 - 3.0 * t + t * t));
}

double AttenuatedPrior::factor(const Vec& x) const {
  double a = 1.0;
  for (int i = 0; i < domain_.dimension(); ++i) {
    for (Side side : {Side::Lower, Side::Upper}) {
      if (!attenuated(i, side)) continue;
      const double wall = side == Side::Lower ? domain_.lower[i] : domain_.upper[i];
      const double u = side == Side::Lower ? x[i] - wall : wall - x[i];
      if (u >= epsilon_) continue;
      Vec s = x;
      s[i] = wall;
      a *= face_factor(i, side, s, u);
    }
  }
  return a;
}

AttenuatedPrior attenuate(const std::function<double(const Vec&)>& p, const CovarianceModel& v,
                          const DomainSpec& domain, double epsilon, const BoundaryConfig& cfg) {
  const AdmissibilityVerdict verdict = check_bounded_boundary(p, v, domain, cfg);
  std::vector<bool> faces(domain.face_kinds.size(), false);
  for (const auto& b : verdict.boundaries) {
    if (b.pass) continue;
    const int axis = std::stoi(b.id.substr(1)) - 1;
    const bool upper = b.id.ends_with("_upper");
    faces[2 * axis + (upper ? 1 : 0)] = true;
  }
  return AttenuatedPrior(p, v, domain, epsilon, std::move(faces));
}

ScalarField attenuate_on_grid(const AttenuatedPrior& prior, const Grid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = prior(grid.point(k));
  return ScalarField(grid, std::move(values));
}

Function1D attenuated_product_1d(const AttenuatedPrior& prior) {
  const DomainSpec& dom = prior.domain();
  if (dom.dimension() != 1) throw Error(ErrorCode::InvalidArgument, "attenuated_product_1d: one-dimensional only");
  const double a = dom.lower[0], b = dom.upper[0];
  auto value = [prior](double x) {
    const Vec p = Vec::Constant(1, x);
    return prior(p) * prior.covariance()(p)(0, 0);
  };
  auto near = [prior](Side side, double wall, double u) {
    Vec s = Vec::Constant(1, wall);
    Vec x = Vec::Constant(1, side == Side::Lower ? wall + u : wall - u);
    const double other_wall = side == Side::Lower ? prior.domain().upper[0] : prior.domain().lower[0];
    const Side other = side == Side::Lower ? Side::Upper : Side::Lower;
    const double other_u = std::abs(other_wall - x[0]);
    return prior.face_factor(0, side, s, u) * prior.face_factor(0, other, Vec::Constant(1, other_wall), other_u) *
           prior.base()(x) * prior.covariance()(x)(0, 0);
  };
  return {value, [near, a](double u) { return near(Side::Lower, a, u); },
          [near, b](double u) { return near(Side::Upper, b, u); }};
}

}  // namespace admpriors
