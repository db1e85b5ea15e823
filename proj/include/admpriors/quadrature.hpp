#pragma once

#include <cstddef>
#include <functional>

#include <boost/math/quadrature/gauss.hpp>

namespace admpriors {

/// Nodes per panel of the rules below.
constexpr std::size_t kGaussOrder = 20;

/// Calls visit(x, w) for each node of the 20-point Gauss-Legendre rule on [a, b].
template <class Visit>
void for_each_gauss_point(double a, double b, Visit&& visit) {
  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      visit(mid, w[i] * half);
    } else {
      visit(mid - half * x[i], w[i] * half);
      visit(mid + half * x[i], w[i] * half);
    }
  }
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b);

/// Composite rule over `panels` equal panels.
double composite_gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t panels);

}  // namespace admpriors
