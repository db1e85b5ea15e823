#include "admpriors/quadrature.hpp"

namespace admpriors {

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  double s = 0.0;
  for_each_gauss_point(a, b, [&](double x, double w) { s += w * f(x); });
  return s;
}

double composite_gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  const double width = (b - a) / static_cast<double>(panels);
  double s = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + static_cast<double>(k) * width;
    const double hi = k + 1 == panels ? b : lo + width;
    s += gauss_legendre(f, lo, hi);
  }
  return s;
}

}  // namespace admpriors
