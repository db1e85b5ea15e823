#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "admpriors/covariance.hpp"
#include "admpriors/error.hpp"
#include "admpriors/mixture.hpp"
#include "admpriors/quadrature.hpp"

using namespace admpriors;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// 30-digit adaptive quadrature values of L (L11, L12, L22), computed offline.
struct Reference {
  double x1, x2, l11, l12, l22;
};
const Reference kReference[] = {
    {1.0, 1.0, 0.23387840889218799, 0.13307742730553365, 0.23387840889218799},
    {0.3, 2.5, 1.1116175857949053, 0.082155462048518855, 0.046448644107231208},
    {1e-3, 0.5, 0.13580324306800252, 0.00029505955119616192, 6.9036817819595186e-7},
    {1e-3, 1.0, 0.71099544716781324, 0.0009849045806520558, 1.6844105663615326e-6},
    {1e-3, 2.0, 8.7777257674870115, 0.011689086035239431, 2.0400142416359023e-5},
    {5.0, 5.0, 0.50999394591070617, -0.00999398316231393, 0.50999394591070617},
    {0.1, 10.0, 1.970387647221079, -0.0098006965804664658, 0.0099983238386798613},
};

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials of degree 39 exactly") {
  const double v = gauss_legendre([](double x) { return std::pow(x, 39) + std::pow(x, 38); }, -1.0, 1.0);
  CHECK(v == doctest::Approx(2.0 / 39.0).epsilon(1e-13));
  CHECK(composite_gauss_legendre([](double x) { return std::exp(x); }, 0.0, 2.0, 7) ==
        doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("mixture density values, normalisation and swap symmetry") {
  CHECK(mixture_density(0.0, {1, 1}) == doctest::Approx(0.24197072451914337).epsilon(1e-14));
  for (MixtureParams t : {MixtureParams{1, 1}, MixtureParams{0.2, 3}, MixtureParams{4, 0.7}}) {
    const double total = composite_gauss_legendre([&](double y) { return mixture_density(y, t); }, -t.x1 - 12, t.x2 + 12, 200);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (double y : {-2.0, -0.3, 0.0, 1.1, 4.0}) {
      CHECK(mixture_density(y, t) == doctest::Approx(mixture_density(-y, {t.x2, t.x1})).epsilon(1e-14));
    }
  }
}

TEST_CASE("scores agree with finite differences of log density") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.1, 10.0), uy(-6.0, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const MixtureParams t{ux(rng), ux(rng)};
    const double y = uy(rng) + (t.x2 - t.x1) / 2;
    const double h = 1e-5;
    const double d1 = (std::log(mixture_density(y, {t.x1 + h, t.x2})) - std::log(mixture_density(y, {t.x1 - h, t.x2}))) / (2 * h);
    const double d2 = (std::log(mixture_density(y, {t.x1, t.x2 + h})) - std::log(mixture_density(y, {t.x1, t.x2 - h}))) / (2 * h);
    const Scores s = mixture_scores(y, t);
    CHECK(std::abs(s.l1 - d1) <= 1e-6 * std::max(1.0, std::abs(d1)));
    CHECK(std::abs(s.l2 - d2) <= 1e-6 * std::max(1.0, std::abs(d2)));
  }
}

TEST_CASE("scores have zero mean and swap symmetry") {
  for (MixtureParams t : {MixtureParams{1, 1}, MixtureParams{0.4, 2.2}}) {
    for (int i = 0; i < 2; ++i) {
      const double m = composite_gauss_legendre(
          [&](double y) {
            const Scores s = mixture_scores(y, t);
            return (i == 0 ? s.l1 : s.l2) * mixture_density(y, t);
          },
          -t.x1 - 12, t.x2 + 12, 200);
      CHECK(std::abs(m) < 1e-6);
    }
  }
  for (double y : {-1.5, 0.2, 2.7}) {
    CHECK(mixture_scores(y, {1, 1}).l1 == doctest::Approx(mixture_scores(-y, {1, 1}).l2).epsilon(1e-13));
  }
}

TEST_CASE("information matches high-precision reference values") {
  for (const auto& r : kReference) {
    const auto res = mixture_information({r.x1, r.x2});
    const Mat& l = res.information;
    const double scale = std::max({std::abs(r.l11), std::abs(r.l12), std::abs(r.l22)});
    CHECK(std::abs(l(0, 0) - r.l11) <= 1e-8 * scale);
    CHECK(std::abs(l(0, 1) - r.l12) <= 1e-8 * scale);
    CHECK(std::abs(l(1, 1) - r.l22) <= 1e-8 * scale);
    CHECK(l(0, 1) == l(1, 0));
    CHECK(res.achieved_tolerance <= 1e-8);
  }
}

TEST_CASE("information at a wall approaches the limit as x1 -> 0") {
  for (double x2 : {0.5, 1.0, 2.0}) {
    const double limit = mixture_information_limit_x1_zero(x2)(0, 0);
    CHECK(limit == doctest::Approx((std::exp(x2 * x2) - 1 - x2 * x2) / (x2 * x2)).epsilon(1e-14));
    double previous = 1e300;
    for (double x1 : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const double err = rel(mixture_information({x1, x2}).information(0, 0), limit);
      CHECK(err < previous);
      previous = err;
    }
    CHECK(previous < 2e-3);
  }
  // x2 -> 0 side, by the swap symmetry
  const Mat a = mixture_information({1e-4, 1.3}).information;
  const Mat b = mixture_information({1.3, 1e-4}).information;
  CHECK(a(0, 0) == doctest::Approx(b(1, 1)).epsilon(1e-9));
  CHECK(b(0, 0) < 1e-4);
  CHECK(std::abs(b(0, 1)) < 1e-2);
}

TEST_CASE("radial limit of the information") {
  for (int k = 1; k <= 9; ++k) {
    const double a = k * std::acos(-1.0) / 20.0;
    const double s1 = std::cos(a), s2 = std::sin(a);
    const Mat l = mixture_information({50 * s1, 50 * s2}).information;
    const Mat lim = mixture_information_limit_radial(s1, s2);
    CHECK(rel(l(0, 0), lim(0, 0)) < 0.02);
    CHECK(rel(l(1, 1), lim(1, 1)) < 0.02);
    CHECK(std::abs(l(0, 1)) < 0.02);
  }
}

TEST_CASE("information is swap symmetric and positive semi-definite") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double x1 = u(rng), x2 = u(rng);
    const Mat l = mixture_information({x1, x2}, {}, false).information;
    Eigen::SelfAdjointEigenSolver<Mat> es(l);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    if (i < 20) {
      const Mat s = mixture_information({x2, x1}, {}, false).information;
      CHECK(std::abs(l(0, 0) - s(1, 1)) <= 1e-8 * l.norm());
      CHECK(std::abs(l(0, 1) - s(0, 1)) <= 1e-8 * l.norm());
    }
  }
}

TEST_CASE("quadrature is stable under doubling nodes and half-width") {
  const MixtureParams t{0.7, 3.1};
  const Mat base = mixture_information(t).information;
  QuadratureConfig wide;
  wide.half_width = 20;
  QuadratureConfig dense;
  dense.nodes = 4000;
  for (const auto& q : {wide, dense}) {
    const Mat other = mixture_information(t, q).information;
    CHECK((other - base).cwiseAbs().maxCoeff() <= 1e-8 * base.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("quadrature non-convergence is reported") {
  QuadratureConfig coarse;
  coarse.nodes = 100;
  coarse.rel_tol = 1e-15;
  try {
    mixture_information({0.05, 9.0}, coarse);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.code() == ErrorCode::QuadratureNonConvergence);
    CHECK(e.achieved() > 1e-15);
  }
}

TEST_CASE("covariance inverts the information") {
  const auto c = mixture_covariance({1, 1});
  CHECK((c.covariance * c.information - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  const double r = 50 / std::sqrt(2.0);
  CHECK(rel(mixture_covariance({r, r}).covariance(0, 0), 2.0) < 0.05);
}

TEST_CASE("covariance near a wall is refused with the condition number") {
  try {
    mixture_covariance({1e-3, 1});
    FAIL("expected NearSingular");
  } catch (const NearSingularError& e) {
    CHECK(e.code() == ErrorCode::NearSingular);
    CHECK(e.condition_number() > 1e5);
  }
  CHECK_NOTHROW(mixture_covariance({0.1, 0.1}));
}

TEST_CASE("sampling: determinism, mean, Bernoulli fraction") {
  const auto a = mixture_sample_detailed({1, 1}, 100000, 42);
  const auto b = mixture_sample_detailed({1, 1}, 100000, 42);
  double mean = 0.0, frac = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].y == b[i].y);
    mean += a[i].y;
    frac += a[i].second_component ? 1.0 : 0.0;
  }
  mean /= a.size();
  frac /= a.size();
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(frac - 0.5) < 0.01);

  // prefix property: a shorter request is a prefix of a longer one
  const auto c = mixture_sample({2, 0.5}, 5000, 9);
  const auto d = mixture_sample({2, 0.5}, 9000, 9);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == d[i]);

  const MixtureParams t{2, 0.5};
  const auto big = mixture_sample(t, 100000, 1);
  const double m = std::accumulate(big.begin(), big.end(), 0.0) / big.size();
  double var = 0.0;
  for (double y : big) var += (y - m) * (y - m);
  const double sd = std::sqrt(var / big.size());
  CHECK(std::abs(m - mixture_mean(t)) < 4 * sd / std::sqrt(100000.0));
  CHECK(mixture_mean(t) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ellipses: circle radius, 1/sqrt(n) scaling, closed polylines") {
  const auto id = CovarianceModel::identity(2);
  const auto e1 = covariance_ellipses(id, {{0.0, 0.0}}, 1, 0.95);
  REQUIRE(e1[0].vertices.size() == 65);
  for (const auto& v : e1[0].vertices) CHECK(std::hypot(v[0], v[1]) == doctest::Approx(2.4477468306808161).epsilon(1e-12));
  CHECK(e1[0].vertices.front() == e1[0].vertices.back());
  const auto e100 = covariance_ellipses(id, {{0.0, 0.0}}, 100, 0.95);
  CHECK(std::hypot(e100[0].vertices[3][0], e100[0].vertices[3][1]) ==
        doctest::Approx(std::hypot(e1[0].vertices[3][0], e1[0].vertices[3][1]) / 10.0));

  const auto mix = CovarianceModel::mixture();
  const auto e = covariance_ellipses(mix, {{5.0, 5.0}, {1e-3, 1.0}}, 1000, 0.95);
  CHECK_FALSE(e[0].near_singular);
  double r1 = 0.0, r2 = 0.0;
  for (const auto& v : e[0].vertices) {
    r1 = std::max(r1, std::abs(v[0] - 5.0));
    r2 = std::max(r2, std::abs(v[1] - 5.0));
  }
  CHECK(r1 < 1.0);
  CHECK(r2 < 1.0);
  CHECK(r1 / r2 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(e[1].near_singular);
  CHECK(e[1].vertices.empty());
}

TEST_CASE("closed-form covariance providers") {
  const auto c = CovarianceModel::correlation();
  CHECK(c(Vec::Constant(1, 0.5))(0, 0) == doctest::Approx(0.5625));
  CHECK(c.divergence(Vec::Constant(1, 0.5))[0] == doctest::Approx(-4 * 0.5 * 0.75));
  CHECK(jeffreys_density(c, 0.5) == doctest::Approx(1.0 / 0.75));
  CHECK_THROWS_AS(jeffreys_density(CovarianceModel::identity(2), 0.0), Error);
  CHECK(CovarianceModel::identity(3).is_isotropic());
  CHECK_FALSE(CovarianceModel::mixture().is_isotropic());
  // numeric divergence of a custom model
  const auto m = CovarianceModel::custom(2, "lin", [](const Vec& x) {
    Mat v(2, 2);
    v << 1 + x[0] * x[0], x[1], x[1], 2 + x[1];
    return v;
  });
  Vec x(2);
  x << 0.3, 0.7;
  const Vec dv = m.divergence(x);
  CHECK(dv[0] == doctest::Approx(2 * 0.3 + 1).epsilon(1e-8));
  CHECK(dv[1] == doctest::Approx(0 + 1).epsilon(1e-8));
}

TEST_CASE("information at very large separation") {
  for (double r : {1e3, 1e6, 1e9}) {
    const double s1 = 0.6, s2 = 0.8;
    const auto res = mixture_information({r * s1, r * s2});
    const Mat lim = mixture_information_limit_radial(s1, s2);
    CHECK(res.information(0, 0) == doctest::Approx(lim(0, 0)).epsilon(1e-6));
    CHECK(res.information(1, 1) == doctest::Approx(lim(1, 1)).epsilon(1e-6));
    CHECK(std::abs(res.information(0, 1)) < 1e-6);
  }
}
