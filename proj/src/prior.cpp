#include "admpriors/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "admpriors/error.hpp"

namespace admpriors {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tabulated_value(const ScalarField& f, const Vec& x) {
  const Grid& g = f.grid();
  const DomainSpec& spec = g.spec();
  const int d = g.dimension();
  Vec inside = x;
  double factor = 1.0;
  for (int i = 0; i < d; ++i) {
    const bool below = x[i] < spec.lower[i];
    const bool above = x[i] > spec.upper[i];
    if (!below && !above) continue;
    const Side side = below ? Side::Lower : Side::Upper;
    if (spec.face(i, side) != FaceKind::Asymptotic) {
      throw Error(ErrorCode::InvalidArgument, "tabulated prior: point outside a wall face");
    }
    inside[i] = below ? spec.lower[i] : spec.upper[i];
    // power law through the two outermost node layers along axis i
    Vec a = inside, b = inside;
    b[i] = below ? spec.lower[i] + g.spacing(i) : spec.upper[i] - g.spacing(i);
    const double pa = f.interpolate(a), pb = f.interpolate(b);
    const double base = inside[i];
    if (base > 0.0 && b[i] > 0.0 && x[i] > 0.0 && pa > 0.0 && pb > 0.0) {
      const double k = std::log(pa / pb) / std::log(base / b[i]);
      factor *= std::pow(x[i] / base, k);
    }
  }
  return factor * f.interpolate(inside);
}

}  // namespace

double evaluate(const PriorFamily& family, const Vec& x) {
  return std::visit(
      overloaded{
          [](const UniformPrior&) { return 1.0; },
          [&](const PowerRadialPrior& p) { return std::pow(x.norm(), p.alpha); },
          [&](const CorrelationPowerPrior& p) { return std::pow((1.0 - x[0]) * (1.0 + x[0]), -p.alpha); },
          [&](const DistanceToBoundaryPrior& p) {
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < p.domain.dimension(); ++i) {
              if (p.domain.face(i, Side::Lower) == FaceKind::Wall) best = std::min(best, x[i] - p.domain.lower[i]);
              if (p.domain.face(i, Side::Upper) == FaceKind::Wall) best = std::min(best, p.domain.upper[i] - x[i]);
            }
            if (!std::isfinite(best)) throw Error(ErrorCode::InvalidArgument, "distance prior: domain has no walls");
            return best;
          },
          [&](const TabulatedPrior& p) { return tabulated_value(p.field, x); },
          [&](const ClosedFormPrior& p) { return p.density(x); },
      },
      family);
}

int dimension(const PriorFamily& family) {
  return std::visit(overloaded{
                        [](const UniformPrior& p) { return p.dimension; },
                        [](const PowerRadialPrior& p) { return p.dimension; },
                        [](const CorrelationPowerPrior&) { return 1; },
                        [](const DistanceToBoundaryPrior& p) { return p.domain.dimension(); },
                        [](const TabulatedPrior& p) { return p.field.grid().dimension(); },
                        [](const ClosedFormPrior& p) { return p.dimension; },
                    },
                    family);
}

std::string describe(const PriorFamily& family) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const UniformPrior& p) { os << "uniform(d=" << p.dimension << ")"; },
                 [&](const PowerRadialPrior& p) { os << "power_radial(alpha=" << p.alpha << ", d=" << p.dimension << ")"; },
                 [&](const CorrelationPowerPrior& p) { os << "correlation_power(alpha=" << p.alpha << ")"; },
                 [&](const DistanceToBoundaryPrior&) { os << "distance_to_boundary"; },
                 [&](const TabulatedPrior&) { os << "tabulated"; },
                 [&](const ClosedFormPrior& p) { os << p.name; },
             },
             family);
  return os.str();
}

PriorFamily uniform_in_power_radius(double alpha, int d) { return PowerRadialPrior{alpha - d, d, false}; }

namespace priors {

ClosedFormPrior gaussian(int d) {
  return {"gaussian", d, [](const Vec& x) { return std::exp(-x.squaredNorm()); }};
}

ClosedFormPrior exp_linear(std::vector<double> c) {
  const int d = static_cast<int>(c.size());
  return {"exp_linear", d, [c](const Vec& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * x[static_cast<int>(i)];
            return std::exp(s);
          }};
}

ClosedFormPrior mixture_reference() {
  return {"mixture_reference", 2, [](const Vec& x) {
            const double s = x[0] + x[1];
            return x[0] * x[1] / (s * s);
          }};
}

ClosedFormPrior beat_uniform_boundary() {
  return {"beat_uniform_boundary", 2, [](const Vec& x) {
            const double s = x[0] + x[1];
            return std::min(4.0 * x[0] * x[1] / (s * s), x[0] * x[1]);
          }};
}

}  // namespace priors

}  // namespace admpriors
