#include "admpriors/mixture.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "admpriors/error.hpp"
#include "admpriors/quadrature.hpp"

namespace admpriors {

void MixtureParams::validate() const {
  if (!(x1 > 0.0 && x2 > 0.0) || !std::isfinite(x1) || !std::isfinite(x2)) {
    throw Error(ErrorCode::InvalidArgument, "mixture parameters must satisfy x1 > 0 and x2 > 0");
  }
}

void QuadratureConfig::validate() const {
  if (!(half_width >= 6.0)) throw Error(ErrorCode::InvalidArgument, "quadrature half_width must be >= 6");
  if (nodes < 100) throw Error(ErrorCode::InvalidArgument, "quadrature nodes must be >= 100");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature rel_tol must be positive");
}

double normal_density(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

namespace {

// Density and scores in terms of a = y + x1 and c = y - x2, so callers far
// from the origin can pass both offsets without cancellation.
double density_ac(double a, double c, const MixtureParams& theta) {
  return (theta.x2 * normal_density(a) + theta.x1 * normal_density(c)) / (theta.x1 + theta.x2);
}

Scores scores_ac(double a, double c, const MixtureParams& theta) {
  const double x1 = theta.x1, x2 = theta.x2, s = x1 + x2;
  // log ratio of the two component kernels; written so that neither
  // component density has to be formed in the far tails
  const double r = std::exp(0.5 * (c * c - a * a));  // phi(a)/phi(c)
  const double wb = 1.0 / (x2 * r + x1);            // phi(c) / (s f)
  const double wa = 1.0 / (x2 + x1 / r);            // phi(a) / (s f)
  return {-1.0 / s + wb - a * x2 * wa, -1.0 / s + wa + c * x1 * wb};
}

}  // namespace

double mixture_density(double y, const MixtureParams& theta) { return density_ac(y + theta.x1, y - theta.x2, theta); }

Scores mixture_scores(double y, const MixtureParams& theta) { return scores_ac(y + theta.x1, y - theta.x2, theta); }

namespace {

Mat information_with_panels(const MixtureParams& theta, const QuadratureConfig& q, std::size_t panels) {
  double l11 = 0.0, l12 = 0.0, l22 = 0.0;
  // integrates over z in [a, b] where y = centre + z
  auto integrate = [&](double centre, double a, double b, std::size_t n) {
    const double width = (b - a) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = a + static_cast<double>(k) * width;
      const double hi = k + 1 == n ? b : lo + width;
      for_each_gauss_point(lo, hi, [&](double z, double w) {
        const double ya = centre == -theta.x1 ? z : z + centre + theta.x1;
        const double yc = centre == theta.x2 ? z : z + centre - theta.x2;
        const auto sc = scores_ac(ya, yc, theta);
        const double wf = w * density_ac(ya, yc, theta);
        l11 += wf * sc.l1 * sc.l1;
        l12 += wf * sc.l1 * sc.l2;
        l22 += wf * sc.l2 * sc.l2;
      });
    }
  };
  const double hw = q.half_width;
  if (theta.x1 + theta.x2 <= 2.0 * hw) {
    integrate(0.0, -theta.x1 - hw, theta.x2 + hw, panels);
  } else {
    // separated components: the gap between the two windows carries no mass
    const std::size_t half = (panels + 1) / 2;
    integrate(-theta.x1, -hw, hw, half);
    integrate(theta.x2, -hw, hw, half);
  }
  Mat l(2, 2);
  l << l11, l12, l12, l22;
  return l;
}

}  // namespace

InformationResult mixture_information(const MixtureParams& theta, const QuadratureConfig& q, bool check) {
  theta.validate();
  q.validate();
  const std::size_t panels = std::max<std::size_t>(1, q.nodes / kGaussOrder);
  const Mat coarse = information_with_panels(theta, q, panels);
  if (!check) return {coarse, 0.0};
  const Mat fine = information_with_panels(theta, q, 2 * panels);
  const double scale = fine.cwiseAbs().maxCoeff();
  const double achieved = scale > 0.0 ? (fine - coarse).cwiseAbs().maxCoeff() / scale : 0.0;
  if (!(achieved <= q.rel_tol)) {
    throw NonConvergenceError(ErrorCode::QuadratureNonConvergence, achieved, 2 * panels * kGaussOrder,
                              "mixture_information: node doubling changed L by " + std::to_string(achieved));
  }
  return {fine, achieved};
}

CovarianceResult mixture_covariance(const MixtureParams& theta, const QuadratureConfig& q) {
  const Mat l = mixture_information(theta, q).information;
  const double cond = condition_number(l);
  if (!(cond < kNearSingularCondition) || std::min(theta.x1, theta.x2) < kNearWallBand) {
    throw NearSingularError(cond, "mixture_covariance: information near-singular at (" + std::to_string(theta.x1) +
                                      ", " + std::to_string(theta.x2) + "), cond " + std::to_string(cond));
  }
  return {small_inverse(l), l, cond};
}

Mat mixture_information_limit_x1_zero(double x2) {
  const double t = x2 * x2;
  Mat l = Mat::Zero(2, 2);
  l(0, 0) = std::expm1(t) / t - 1.0;  // (e^t - 1 - t)/t
  return l;
}

Mat mixture_information_limit_x2_zero(double x1) {
  const double t = x1 * x1;
  Mat l = Mat::Zero(2, 2);
  l(1, 1) = std::expm1(t) / t - 1.0;
  return l;
}

Mat mixture_information_limit_radial(double s1, double s2) {
  Mat l = Mat::Zero(2, 2);
  l(0, 0) = s2 / (s1 + s2);
  l(1, 1) = s1 / (s1 + s2);
  return l;
}

namespace {
constexpr std::size_t kSampleBlock = 4096;
}

std::vector<MixtureDraw> mixture_sample_detailed(const MixtureParams& theta, std::size_t n, std::uint64_t seed) {
  theta.validate();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mixture_sample: n must be >= 1");
  const double q = theta.q();
  std::vector<MixtureDraw> out(n);
  for (std::size_t block = 0; block * kSampleBlock < n; ++block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::mt19937_64 engine(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t end = std::min(n, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      const bool b = unif(engine) < q;
      const double z = normal(engine);
      out[i] = {b ? z + theta.x2 : z - theta.x1, b};
    }
  }
  return out;
}

std::vector<double> mixture_sample(const MixtureParams& theta, std::size_t n, std::uint64_t seed) {
  const auto draws = mixture_sample_detailed(theta, n, seed);
  std::vector<double> y(draws.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = draws[i].y;
  return y;
}

double mixture_mean(const MixtureParams& theta) { return theta.q() * theta.x2 - (1.0 - theta.q()) * theta.x1; }

}  // namespace admpriors
