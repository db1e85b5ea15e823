#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "admpriors/grid.hpp"

namespace admpriors {

struct UniformPrior {
  int dimension = 1;
};

/// p = r^alpha on R^d (origin excluded when excluded_origin).
struct PowerRadialPrior {
  double alpha;
  int dimension;
  bool excluded_origin = true;
};

/// p = (1 - rho^2)^{-alpha} on (-1, 1).
struct CorrelationPowerPrior {
  double alpha;
};

/// p = distance to the nearest Wall face of the domain.
struct DistanceToBoundaryPrior {
  DomainSpec domain;
};

/// Grid values, multilinear inside the box.  Beyond an Asymptotic face the
/// field is continued as a power law fitted to the two outermost nodes.
struct TabulatedPrior {
  ScalarField field;
};

struct ClosedFormPrior {
  std::string name;
  int dimension;
  std::function<double(const Vec&)> density;
};

using PriorFamily =
    std::variant<UniformPrior, PowerRadialPrior, CorrelationPowerPrior, DistanceToBoundaryPrior, TabulatedPrior, ClosedFormPrior>;

double evaluate(const PriorFamily& family, const Vec& x);
int dimension(const PriorFamily& family);
std::string describe(const PriorFamily& family);

/// Radial prior under which r^alpha is uniformly distributed: p = r^{alpha - d}
/// on R^d.
PriorFamily uniform_in_power_radius(double alpha, int d);

namespace priors {
/// exp(-|x|^2).
ClosedFormPrior gaussian(int d);
/// exp(c . x).
ClosedFormPrior exp_linear(std::vector<double> c);
/// x1 x2 / (x1 + x2)^2.
ClosedFormPrior mixture_reference();
/// min(4 x1 x2 / (x1 + x2)^2, x1 x2).
ClosedFormPrior beat_uniform_boundary();
}  // namespace priors

}  // namespace admpriors
