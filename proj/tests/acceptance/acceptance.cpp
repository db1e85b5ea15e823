// Acceptance suite: one PASS/FAIL line per criterion, with the individual checks
// listed underneath. Checks known to be unattainable are passed with
// --known-failure ID; the process succeeds only when the failing checks are
// exactly that set, so a regression or an unexpected fix both surface.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "admpriors/admissibility.hpp"
#include "admpriors/attenuation.hpp"
#include "admpriors/brown_solver.hpp"
#include "admpriors/covariance.hpp"
#include "admpriors/mixture.hpp"
#include "admpriors/path_sampler.hpp"
#include "admpriors/risk.hpp"

using namespace admpriors;

namespace {

struct Check {
  std::string id;
  bool pass;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> notes;  // informational lines, never gated
  double seconds = 0.0;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Vec point(double x) { return Vec::Constant(1, x); }

Mat one(double a) { return Mat::Constant(1, 1, a); }

TensorField identity_tensor(const Grid& g) {
  return TensorField::from_function(g, [&](const Vec&) { return Mat::Identity(g.dimension(), g.dimension()); });
}

double max_interior_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    if (a.grid().is_interior(k)) m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

// ---- 1: a prior that beats the uniform on the mixture grid ----

Criterion beat_uniform() {
  Criterion c{1, "relaxation prior beats the uniform on the mixture grid", {}, {}};
  const DomainSpec spec = DomainSpec::box({0.1, 0.1}, {10.0, 10.0}, FaceKind::Asymptotic);
  const Grid g(spec, {100, 100});
  const TensorField v = tabulate(CovarianceModel::mixture(), g, 1);
  const auto edge = priors::beat_uniform_boundary();
  const ScalarField boundary = ScalarField::from_function(g, edge.density);

  auto summarize = [&](double tol) {
    SolverConfig cfg;
    cfg.residual_tol = tol;
    cfg.threads = 1;
    const BrownSolution sol = solve_brown_equation(v, boundary, cfg);
    const GainReport rep = risk_gain_vs_uniform(sol.p, v, tol);
    struct Out {
      BrownSolution sol;
      double min_gain = std::numeric_limits<double>::infinity();
      double band = 0.0, interior = 0.0;
    } out{sol};
    std::size_t nb = 0, ni = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g.is_interior(k)) continue;
      const Vec x = g.point(k);
      out.min_gain = std::min(out.min_gain, rep.gain[k]);
      if (std::min(x[0], x[1]) <= 1.0) {
        out.band += rep.gain[k];
        ++nb;
      } else {
        out.interior += rep.gain[k];
        ++ni;
      }
    }
    out.band /= static_cast<double>(nb);
    out.interior /= static_cast<double>(ni);
    return out;
  };

  const auto loose = summarize(0.01);
  c.checks.push_back({"1.residual", loose.sol.residual < 0.01,
                      fmt("max residual %.3e after %zu sweeps (tolerance 0.01)", loose.sol.residual, loose.sol.iterations)});

  // edge shape: small along the x1 = 0.1 and x2 = 0.1 edges, not along the far ones,
  // both for the edge values and for the first interior ring
  double low_edge = 0, far_edge = 0, low_ring = 0, far_ring = 0;
  std::size_t n_low_edge = 0, n_far_edge = 0, n_low_ring = 0, n_far_ring = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.multi_index(k);
    const double p = loose.sol.p[k];
    for (int i = 0; i < 2; ++i) {
      if (idx[i] == 0) low_edge += p, ++n_low_edge;
      if (idx[i] == 99) far_edge += p, ++n_far_edge;
      const bool ring = idx[1 - i] >= 1 && idx[1 - i] <= 98;
      if (ring && idx[i] == 1) low_ring += p, ++n_low_ring;
      if (ring && idx[i] == 98) far_ring += p, ++n_far_ring;
    }
  }
  low_edge /= static_cast<double>(n_low_edge);
  far_edge /= static_cast<double>(n_far_edge);
  low_ring /= static_cast<double>(n_low_ring);
  far_ring /= static_cast<double>(n_far_ring);
  c.checks.push_back({"1.edge_shape", low_edge < 0.2 * far_edge && low_ring < 0.2 * far_ring,
                      fmt("mean p on low edges %.4f vs far edges %.4f; next ring %.4f vs %.4f (ratio < 0.2)", low_edge,
                          far_edge, low_ring, far_ring)});
  c.notes.push_back(fmt("at residual 0.01 the smallest gain is %.3e (solver noise, below the residual scale)",
                        loose.min_gain));

  const auto tight = summarize(1e-6);
  c.checks.push_back({"1.gain_floor", tight.sol.residual < 0.01 && tight.min_gain >= -1e-8,
                      fmt("rerun at residual %.2e: smallest interior gain %.3e (floor -1e-8)", tight.sol.residual,
                          tight.min_gain)});
  c.checks.push_back({"1.band_excess", tight.band > tight.interior,
                      fmt("mean gain with min(x1,x2) <= 1 is %.4f, elsewhere %.4f", tight.band, tight.interior)});
  return c;
}

// ---- 2: mixture information limits ----

Criterion mixture_limits() {
  Criterion c{2, "mixture information matches its wall and radial limits", {}, {}};
  for (double x2 : {0.5, 1.0, 2.0}) {
    const double limit = (std::exp(x2 * x2) - 1 - x2 * x2) / (x2 * x2);
    const double l11 = mixture_information({1e-3, x2}).information(0, 0);
    const double l22 = mixture_information({x2, 1e-3}).information(1, 1);
    c.checks.push_back({fmt("2.wall_x1.x2=%g", x2), rel(l11, limit) <= 0.01,
                        fmt("L11(1e-3, %g) = %.6f, limit %.6f, off by %.3f%% (1%% allowed)", x2, l11, limit, 100 * rel(l11, limit))});
    c.checks.push_back({fmt("2.wall_x2.x1=%g", x2), rel(l22, limit) <= 0.01,
                        fmt("L22(%g, 1e-3) = %.6f, limit %.6f, off by %.3f%% (1%% allowed)", x2, l22, limit, 100 * rel(l22, limit))});
    const double closer = mixture_information({1e-6, x2}).information(0, 0);
    c.notes.push_back(fmt("x1 = 1e-6, x2 = %g: off by %.4f%%", x2, 100 * rel(closer, limit)));
  }
  for (int k = 1; k <= 9; ++k) {
    const double a = k * std::numbers::pi / 20.0;
    const double s1 = std::cos(a), s2 = std::sin(a);
    const Mat l = mixture_information({50 * s1, 50 * s2}).information;
    const double e11 = rel(l(0, 0), s2 / (s1 + s2)), e22 = rel(l(1, 1), s1 / (s1 + s2));
    const double cross = std::abs(l(0, 1)) / std::sqrt(l(0, 0) * l(1, 1));
    c.checks.push_back({fmt("2.radial.angle=%d/20pi", k), e11 <= 0.02 && e22 <= 0.02 && cross <= 0.02,
                        fmt("r = 50: L11 off %.3f%%, L22 off %.3f%%, |L12| relative %.2e (2%% allowed)", 100 * e11,
                            100 * e22, cross)});
  }
  return c;
}

// ---- 3: classification table ----

Criterion classification() {
  Criterion c{3, "classification table: exact and numeric checkers", {}, {}};
  auto name = [](Verdict v) { return std::string(to_string(v)); };
  for (double a : {0.0, 0.5, 1.0, 1.001, 1.5, 2.0}) {
    const Verdict expected = a <= 1.0 ? Verdict::Admissible : Verdict::Inadmissible;
    const auto exact = classify_power_law(CorrelationPowerPrior{a});
    const auto numeric = check_1d(correlation_product(a), -1, 1);
    c.checks.push_back({fmt("3.correlation.alpha=%g", a), numeric.verdict == expected && exact.verdict == expected,
                        "expected " + name(expected) + ", numeric " + name(numeric.verdict) + ", exact " + name(exact.verdict)});
    c.checks.push_back({fmt("3.agree.correlation.alpha=%g", a), numeric.verdict == exact.verdict, "numeric and exact agree"});
  }
  for (int d = 1; d <= 3; ++d) {
    for (double a : {d - 3.0, d - 2.0, d - 1.0}) {
      const PowerRadialPrior prior{a, d, true};
      const Verdict expected = a == d - 2.0 ? Verdict::Admissible : Verdict::Inadmissible;
      RadialConfig cfg;
      cfg.excluded_origin = true;
      cfg.sufficiency = true;
      cfg.threads = 4;
      const auto numeric = check_radial([&](const Vec& x) { return evaluate(prior, x); }, CovarianceModel::identity(d), d, cfg);
      const auto exact = classify_power_law(prior);
      c.checks.push_back({fmt("3.radial.d=%d.alpha=%g", d, a), numeric.verdict == expected && exact.verdict == expected,
                          "expected " + name(expected) + ", numeric " + name(numeric.verdict) + ", exact " +
                              name(exact.verdict)});
      c.checks.push_back({fmt("3.agree.radial.d=%d.alpha=%g", d, a), numeric.verdict == exact.verdict,
                          "numeric " + name(numeric.verdict) + ", exact " + name(exact.verdict)});
    }
  }
  for (int d = 1; d <= 3; ++d) {
    for (double a : {0.5, 1.0, 2.0, 2.5, 3.0}) {
      const PriorFamily fam = uniform_in_power_radius(a, d);
      RadialConfig cfg;
      cfg.threads = 4;
      const auto numeric = check_radial([&](const Vec& x) { return evaluate(fam, x); }, CovarianceModel::identity(d), d, cfg);
      const auto exact = classify_power_law(fam);
      const bool expected = a <= 2.0;
      c.checks.push_back({fmt("3.power_uniform.d=%d.alpha=%g", d, a),
                          numeric.necessary_condition_holds == expected && exact.necessary_condition_holds == expected &&
                              numeric.necessary_condition_holds == exact.necessary_condition_holds,
                          fmt("necessary condition expected %s, numeric %s, exact %s", expected ? "holds" : "fails",
                              numeric.necessary_condition_holds ? "holds" : "fails",
                              exact.necessary_condition_holds ? "holds" : "fails")});
    }
  }
  return c;
}

// ---- 4: operator identities ----

Criterion operator_identities() {
  Criterion c{4, "risk operator identities", {}, {}};
  const Grid g1 = build_grid(DomainSpec::box({-1}, {1}), {201});
  const Grid g2 = build_grid(DomainSpec::box({-1, -1}, {1, 1}), {41, 41});
  struct Case {
    const char* name;
    const Grid* grid;
    std::function<double(const Vec&)> p;
    std::function<Mat(const Vec&)> v;
  };
  const std::vector<Case> cases = {
      {"gauss_1d", &g1, [](const Vec& x) { return std::exp(-x[0] * x[0]); }, [](const Vec& x) { return one(1 + 0.3 * x[0] * x[0]); }},
      {"sine_1d", &g1, [](const Vec& x) { return 2 + std::sin(x[0]); }, [](const Vec&) { return one(1.0); }},
      {"rational_1d", &g1, [](const Vec& x) { return 1 / (1.5 - x[0] * x[0] / 2); }, [](const Vec& x) { return one(2 + std::cos(x[0])); }},
      {"gauss_2d", &g2, [](const Vec& x) { return std::exp(-0.25 * x.squaredNorm()); },
       [](const Vec& x) {
         Mat m(2, 2);
         m << 2 + x[0], 0.3 + 0.2 * x[1], 0.3 + 0.2 * x[1], 1.5;
         return m;
       }},
      {"cosine_2d", &g2, [](const Vec& x) { return 1 + 0.3 * std::cos(x[0]) * std::cos(x[1]); },
       [](const Vec&) {
         Mat m(2, 2);
         m << 1, 0.4, 0.4, 1;
         return m;
       }},
  };
  for (const auto& cs : cases) {
    const auto p = ScalarField::from_function(*cs.grid, cs.p);
    const auto v = TensorField::from_function(*cs.grid, cs.v);
    const auto via_decision = risk_of_decision(decision_of_prior(p), v);
    const double mono = max_interior_diff(via_decision, risk_of_prior(p, v, DivergenceScheme::Monotone));
    const double nested = max_interior_diff(via_decision, risk_of_prior(p, v, DivergenceScheme::NestedCentral));
    c.checks.push_back({fmt("4.consistency.%s", cs.name), mono <= 1e-3 && nested <= 1e-3,
                        fmt("h = %.2f: gap %.2e (monotone), %.2e (nested central), allowed 1e-3", cs.grid->spacing(0), mono, nested)});
  }

  {
    const Grid g = build_grid(DomainSpec::box({-1, -1}, {1, 1}), {31, 31});
    const auto v = TensorField::from_function(g, [](const Vec& x) {
      Mat m(2, 2);
      m << 1 + x[0] * x[0], 0.2, 0.2, 1;
      return m;
    });
    const auto f = [](const Vec& x) { return std::exp(x[0] - 0.5 * x[1] * x[1]); };
    const auto p = ScalarField::from_function(g, f);
    double worst = 0.0;
    for (double s : {1e-3, 0.5, 40.0}) {
      const auto ps = ScalarField::from_function(g, [&](const Vec& x) { return s * f(x); });
      worst = std::max(worst, max_interior_diff(risk_of_prior(p, v), risk_of_prior(ps, v)));
      worst = std::max(worst, max_interior_diff(risk_of_decision(decision_of_prior(p), v),
                                                risk_of_decision(decision_of_prior(ps), v)));
    }
    c.checks.push_back({"4.scale_invariance", worst < 1e-9, fmt("largest change under p -> c p: %.2e", worst)});
  }

  {
    // y = T(x) = x + 0.3 x^2: densities pick up 1/T', the variance T'^2; the
    // difference of the risks of two priors is compared pointwise
    const auto t = [](double x) { return x + 0.3 * x * x; };
    const auto dt = [](double x) { return 1 + 0.6 * x; };
    const auto tinv = [](double y) { return (-1 + std::sqrt(1 + 1.2 * y)) / 0.6; };
    const auto p1 = [](double x) { return std::exp(-x * x); };
    const auto p2 = [](double x) { return 1 + x; };
    const auto vx = [](double x) { return 1 + 0.5 * x; };
    std::vector<double> errs;
    for (std::size_t n : {101, 201, 401}) {
      const Grid gx = build_grid(DomainSpec::box({0.2}, {1.2}), {n});
      const Grid gy = build_grid(DomainSpec::box({t(0.2)}, {t(1.2)}), {n});
      const auto vxf = TensorField::from_function(gx, [&](const Vec& x) { return one(vx(x[0])); });
      const auto vyf = TensorField::from_function(gy, [&](const Vec& y) {
        const double x = tinv(y[0]);
        return one(dt(x) * dt(x) * vx(x));
      });
      const auto on_y = [&](auto p) {
        return ScalarField::from_function(gy, [&](const Vec& y) {
          const double x = tinv(y[0]);
          return p(x) / dt(x);
        });
      };
      const auto on_x = [&](auto p) { return ScalarField::from_function(gx, [&](const Vec& x) { return p(x[0]); }); };
      const auto ry1 = risk_of_prior(on_y(p1), vyf), ry2 = risk_of_prior(on_y(p2), vyf);
      const auto rx1 = risk_of_prior(on_x(p1), vxf), rx2 = risk_of_prior(on_x(p2), vxf);
      double err = 0.0;
      for (std::size_t k = 0; k < gx.size(); ++k) {
        if (!gx.is_interior(k)) continue;
        const Vec y = point(t(gx.point(k)[0]));
        if (!(y[0] > gy.coordinate(0, 1) && y[0] < gy.coordinate(0, n - 2))) continue;
        err = std::max(err, std::abs(ry1.interpolate(y) - ry2.interpolate(y) - (rx1[k] - rx2[k])));
      }
      errs.push_back(err);
    }
    c.checks.push_back({"4.reparametrization", errs[2] < errs[1] && errs[1] < errs[0] && errs[2] < 1e-3,
                        fmt("risk-difference mismatch %.2e, %.2e, %.2e at h = 0.01, 0.005, 0.0025", errs[0], errs[1], errs[2])});
  }

  {
    // sum v L u h^2 against -sum grad v' A grad u h^2 for u, v vanishing on the edge
    auto gap = [](std::size_t n) {
      const Grid g = build_grid(DomainSpec::box({0, 0}, {1, 1}), {n, n});
      const auto a = TensorField::from_function(g, [](const Vec& x) {
        Mat m(2, 2);
        m << 2 + x[0], 0.4, 0.4, 1.5 + x[1];
        return m;
      });
      const double pi = std::numbers::pi;
      const auto u = ScalarField::from_function(g, [pi](const Vec& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); });
      const auto w = ScalarField::from_function(g, [pi](const Vec& x) {
        return x[0] * (1 - x[0]) * std::sin(2 * pi * x[1]) + std::sin(pi * x[0]) * x[1] * (1 - x[1]);
      });
      const auto lu = divergence_form_apply(a, u);
      const auto gu = gradient(u), gw = gradient(w);
      const double cell = g.spacing(0) * g.spacing(1);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_interior(k)) lhs += w[k] * lu[k] * cell;
        const double weight = (g.is_interior(k) ? 1.0 : 0.5) * cell;
        rhs -= weight * (gw.at(k).transpose() * a.at(k) * gu.at(k))(0, 0);
      }
      return std::abs(lhs - rhs);
    };
    const double e1 = gap(41), e2 = gap(81);
    c.checks.push_back({"4.integration_by_parts", e1 < 2e-3 && e2 < e1,
                        fmt("summation-by-parts gap %.2e at h = 0.025, %.2e at h = 0.0125", e1, e2)});
  }

  {
    const Grid g = build_grid(DomainSpec::box({-1}, {1}), {201});
    const auto p = ScalarField::from_function(g, [](const Vec& x) { return std::exp(-x[0] * x[0] + 0.5 * x[0]); });
    const auto v = TensorField::from_function(g, [](const Vec& x) { return one(1 + 0.4 * std::sin(x[0])); });
    const auto b = decision_of_prior(p);
    const auto base = risk_of_decision(b, v);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0), wd(0.1, 0.6);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const double amp = 3 * u(rng), centre = 0.5 * u(rng), width = wd(rng), freq = 4 * u(rng);
      std::vector<double> bv(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = g.point(k)[0], z = (x - centre) / width;
        const double bump = std::abs(z) < 1 ? amp * std::cos(freq * x) * std::exp(-1 / (1 - z * z)) : 0.0;
        bv[k] = b.component(k, 0) + bump;
      }
      const auto r = risk_of_decision(VectorField(g, bv), v);
      double s = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_interior(k)) s += (r[k] - base[k]) * p[k] * g.spacing(0);
      }
      worst = std::min(worst, s);
    }
    c.checks.push_back({"4.local_bayes", worst >= -1e-8,
                        fmt("smallest weighted risk change over 100 compact perturbations: %.3e", worst)});
  }
  return c;
}

// ---- 5: eigenvalue properties and risk matching ----

Criterion eigen_properties() {
  Criterion c{5, "principal eigenvalue and risk-matching priors", {}, {}};
  {
    const Grid g = build_grid(DomainSpec::box({0}, {1}), {201});
    const auto e = principal_eigenpair(identity_tensor(g), ScalarField::from_function(g, [](const Vec&) { return 0.0; }));
    const double target = -2 * std::numbers::pi * std::numbers::pi;
    c.checks.push_back({"5.dirichlet_eigenvalue", rel(e.lambda, target) <= 5e-3,
                        fmt("lambda %.6f vs %.6f, off by %.4f%% (0.5%% allowed)", e.lambda, target, 100 * rel(e.lambda, target))});
  }
  {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    const Grid g1 = build_grid(DomainSpec::box({0}, {1}), {81});
    const Grid g2 = build_grid(DomainSpec::box({0, 0}, {1, 1}), {25, 25});
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 50; ++trial) {
      const Grid& g = trial % 2 == 0 ? g1 : g2;
      const int d = g.dimension();
      std::vector<double> k(4 * d);
      for (double& x : k) x = 2.0 * n(rng);
      const auto b = VectorField::from_function(g, [&](const Vec& x) {
        Vec out(d);
        for (int i = 0; i < d; ++i) {
          const double t = x[(i + 1) % d];
          out[i] = k[4 * i] + k[4 * i + 1] * std::sin(3 * x[i]) + k[4 * i + 2] * std::cos(2 * t) + k[4 * i + 3] * x[i] * t;
        }
        return out;
      });
      const auto v = identity_tensor(g);
      worst = std::max(worst, principal_eigenpair(v, risk_of_decision(b, v)).lambda);
    }
    c.checks.push_back({"5.eigenvalue_sign", worst <= 1e-6, fmt("largest lambda over 50 random decision fields: %.4f", worst)});
  }

  // residual of a matching solve, measured here rather than taken from the solver
  auto matched = [&](const char* id, const VectorField& b, const TensorField& v, const ScalarField& phi,
                     const std::function<double(const Vec&)>& closed_form) {
    const auto r = risk_matching_prior(b, v, phi);
    const auto rb = risk_of_decision(b, v);
    const double h = r.p.grid().max_spacing();
    const double allowed = 10 * h * h * std::max(1.0, rb.max_abs_interior());
    const double residual = max_interior_diff(risk_of_prior(r.p, v), rb);
    double err = 0.0;
    for (std::size_t k = 0; k < r.p.grid().size(); ++k) err = std::max(err, std::abs(r.p[k] - closed_form(r.p.grid().point(k))));
    c.checks.push_back({id, residual <= allowed,
                        fmt("%s branch: risk residual %.2e, allowed 10 h^2 scale = %.2e; max |p - closed form| %.2e",
                            r.branch.c_str(), residual, allowed, err)});
  };
  {
    const Grid g = build_grid(DomainSpec::box({0, 0}, {1, 1}), {21, 21});
    matched("5.matching.uniform", VectorField::from_function(g, [](const Vec&) { return Vec::Zero(2).eval(); }),
            identity_tensor(g), ScalarField::from_function(g, [](const Vec&) { return 1.0; }), [](const Vec&) { return 1.0; });
  }
  {
    const Grid g = build_grid(DomainSpec::box({0}, {1}), {401});
    const auto cosh2 = [](const Vec& x) {
      const double u = std::cosh((x[0] - 0.5) / 2) / std::cosh(0.25);
      return u * u;
    };
    matched("5.matching.cosh", VectorField::from_function(g, [](const Vec&) { return point(1.0); }), identity_tensor(g),
            ScalarField::from_function(g, [](const Vec&) { return 1.0; }), cosh2);
  }
  {
    const Grid g = build_grid(DomainSpec::box({0, 0}, {1, 1}), {41, 41});
    const auto v = TensorField::from_function(g, [](const Vec& x) {
      Mat m(2, 2);
      m << 1 + 0.5 * x[0], 0.2, 0.2, 1;
      return m;
    });
    const auto f = [](const Vec& x) { return std::exp(x[0] - x[1] * x[1]); };
    const auto p0 = ScalarField::from_function(g, f);
    matched("5.matching.recover_prior", decision_of_prior(p0), v,
            ScalarField::from_function(g, [&](const Vec& x) { return std::sqrt(f(x)); }), f);
  }
  return c;
}

// ---- 6: Feynman-Kac estimates ----

Criterion feynman_kac() {
  Criterion c{6, "Feynman-Kac path estimates", {}, {}};
  const DomainSpec unit = DomainSpec::box({0}, {1});
  const auto id = CovarianceModel::identity(1);
  const auto zero = [](const Vec&) { return point(0.0); };
  PathConfig cfg;
  cfg.n_paths = 10000;
  cfg.seed = 2024;
  cfg.threads = 4;

  {
    const auto r = feynman_kac_estimate([](const Vec&) { return point(2.0); }, id, unit,
                                        [](const Vec& x) { return std::exp(x[0]); }, point(0.5), cfg);
    // the weights agree to rounding, so the standard error gets a two-ulp floor
    const double floor = 4 * std::numeric_limits<double>::epsilon();
    const double err = std::abs(r.estimate - std::exp(0.5));
    c.checks.push_back({"6.gradient_case", err <= 3 * r.std_error + floor && r.n_censored == 0,
                        fmt("estimate %.17g, |error| %.2e, 3 se %.2e, per-path sd %.2e", r.estimate, err, 3 * r.std_error, r.path_sd)});
  }
  for (double x0 : {0.2, 0.5, 0.7}) {
    const auto r = feynman_kac_estimate(zero, id, unit, [](const Vec& x) { return x[0] < 0.5 ? 2.0 : 5.0; }, point(x0), cfg);
    const double expected = (1 - x0) * 2 + x0 * 5;
    c.checks.push_back({fmt("6.harmonic.x0=%g", x0), std::abs(r.estimate - expected) <= 3 * r.std_error,
                        fmt("estimate %.5f vs %.5f, 3 se %.5f", r.estimate, expected, 3 * r.std_error)});
  }
  {
    const DomainSpec square = DomainSpec::box({0, 0}, {1, 1});
    const auto b = [](const Vec& x) {
      Vec out(2);
      out << std::sin(x[1]), x[0] * x[0];
      return out;
    };
    const auto root = [](const Vec& x) { return 1 + x[0] + 0.5 * x[1]; };
    PathConfig d = cfg;
    d.n_paths = 2000;
    d.threads = 1;
    const auto serial = feynman_kac_estimate(b, CovarianceModel::identity(2), square, root, Vec::Constant(2, 0.5), d);
    const auto again = feynman_kac_estimate(b, CovarianceModel::identity(2), square, root, Vec::Constant(2, 0.5), d);
    d.threads = 7;
    const auto parallel = feynman_kac_estimate(b, CovarianceModel::identity(2), square, root, Vec::Constant(2, 0.5), d);
    c.checks.push_back({"6.determinism",
                        serial.estimate == again.estimate && serial.estimate == parallel.estimate &&
                            serial.std_error == parallel.std_error,
                        fmt("estimate %.17g on 1 thread twice and on 7 threads: %s", serial.estimate,
                            serial.estimate == parallel.estimate ? "bitwise equal" : "different")});
  }
  {
    // constant, non-gradient decision: the Dirichlet matching solve and the path
    // formula need not agree, so this is reported only
    const Grid g = build_grid(unit, {401});
    const auto r = risk_matching_prior(VectorField::from_function(g, [](const Vec&) { return point(1.0); }), identity_tensor(g),
                                       ScalarField::from_function(g, [](const Vec&) { return 1.0; }));
    const auto fk = feynman_kac_estimate([](const Vec&) { return point(1.0); }, id, unit, [](const Vec&) { return 1.0; },
                                         point(0.5), cfg);
    c.notes.push_back(fmt("non-gradient b = 1: path estimate of sqrt p(0.5) %.5f (se %.5f), matching solve %.5f", fk.estimate,
                          fk.std_error, std::sqrt(r.p.interpolate(point(0.5)))));
  }
  return c;
}

// ---- 7: attenuation ----

Criterion attenuation() {
  Criterion c{7, "attenuation repairs the flat prior on the unit interval", {}, {}};
  const DomainSpec unit = DomainSpec::box({0}, {1});
  const auto flat = [](const Vec&) { return 1.0; };
  const auto id = CovarianceModel::identity(1);
  const auto before = check_1d({[](double) { return 1.0; }, {}, {}}, 0, 1);
  const auto att = attenuate(flat, id, unit, 0.1);
  const auto after = check_1d(attenuated_product_1d(att), 0, 1);
  c.checks.push_back({"7.flat_fails", before.verdict == Verdict::Inadmissible && !before.boundaries[0].pass,
                      std::string("unattenuated verdict ") + to_string(before.verdict)});
  c.checks.push_back({"7.attenuated_passes",
                      att.attenuated(0, Side::Lower) && after.boundaries[0].pass && after.boundaries[1].pass &&
                          after.verdict == Verdict::Admissible,
                      fmt("attenuated verdict %s, lower wall exponent %.4f", to_string(after.verdict), after.boundaries[0].exponent)});
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> known;
  std::vector<int> only;
  app.add_option("--known-failure", known, "Check id expected to fail");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Criterion()>> suite = {beat_uniform, mixture_limits,  classification, operator_identities,
                                                         eigen_properties, feynman_kac, attenuation};
  const std::set<std::string> expected(known.begin(), known.end());
  std::set<std::string> failed, seen;
  int criteria_failed = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c = suite[i]();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t passed = 0;
    for (const auto& ch : c.checks) {
      seen.insert(ch.id);
      if (ch.pass) {
        ++passed;
      } else {
        failed.insert(ch.id);
      }
    }
    const bool ok = passed == c.checks.size();
    if (!ok) ++criteria_failed;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title << " (" << passed << "/"
              << c.checks.size() << " checks, " << fmt("%.1f", c.seconds) << " s)\n";
    for (const auto& ch : c.checks) {
      std::cout << "    " << (ch.pass ? "ok      " : (expected.count(ch.id) ? "known   " : "not met ")) << ch.id << ": "
                << ch.detail << '\n';
    }
    for (const auto& n : c.notes) std::cout << "    info    " << n << '\n';
  }

  std::vector<std::string> unexpected, fixed;
  for (const auto& f : failed) {
    if (!expected.count(f)) unexpected.push_back(f);
  }
  for (const auto& k : expected) {
    if (seen.count(k) && !failed.count(k)) fixed.push_back(k);
  }
  std::cout << "\n" << suite.size() - static_cast<std::size_t>(criteria_failed) << " of " << suite.size()
            << " criteria pass; " << failed.size() << " failing checks, " << unexpected.size() << " unexpected\n";
  for (const auto& u : unexpected) std::cout << "unexpected failure: " << u << '\n';
  for (const auto& f : fixed) std::cout << "known failure now passes: " << f << '\n';
  return unexpected.empty() && fixed.empty() ? 0 : 1;
}
