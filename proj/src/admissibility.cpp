#include "admpriors/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "admpriors/error.hpp"
#include "admpriors/parallel.hpp"
#include "admpriors/quadrature.hpp"

namespace admpriors {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Admissible: return "Admissible";
    case Verdict::Inadmissible: return "Inadmissible";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

namespace {

nlohmann::json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

BoundaryDiagnostic diagnostic(std::string id, const IntegralClassification& c) {
  BoundaryDiagnostic d;
  d.id = std::move(id);
  d.cutoffs = c.cutoffs;
  d.integrals = c.integrals;
  d.exponent = c.exponent;
  d.pass = c.kind == Divergence::Divergent;
  d.ambiguous = c.kind == Divergence::Ambiguous;
  return d;
}

/// Verdict from boundary diagnostics: any failure is sound evidence of
/// inadmissibility; a full pass is only sufficient when `iff`.
void settle(AdmissibilityVerdict& v, bool iff) {
  bool fail = false, ambiguous = false;
  for (const auto& b : v.boundaries) {
    if (b.ambiguous) {
      ambiguous = true;
    } else if (!b.pass) {
      fail = true;
    }
  }
  v.necessary_condition_holds = !fail && !ambiguous;
  if (fail) {
    v.verdict = Verdict::Inadmissible;
  } else if (ambiguous) {
    v.verdict = Verdict::Inconclusive;
  } else {
    v.verdict = iff ? Verdict::Admissible : Verdict::Inconclusive;
  }
}

double positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::NonPositive, std::string(what) + ": non-positive or non-finite sample " + std::to_string(x));
  }
  return x;
}

}  // namespace

nlohmann::json AdmissibilityVerdict::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["method"] = method;
  j["necessary_condition_holds"] = necessary_condition_holds;
  if (sphere_integral) j["sphere_integral"] = finite_or_string(*sphere_integral);
  j["boundaries"] = nlohmann::json::array();
  for (const auto& b : boundaries) {
    nlohmann::json jb;
    jb["id"] = b.id;
    jb["exponent"] = finite_or_string(b.exponent);
    jb["pass"] = b.pass;
    jb["ambiguous"] = b.ambiguous;
    jb["cutoffs"] = nlohmann::json::array();
    jb["integrals"] = nlohmann::json::array();
    for (double c : b.cutoffs) jb["cutoffs"].push_back(finite_or_string(c));
    for (double c : b.integrals) jb["integrals"].push_back(finite_or_string(c));
    j["boundaries"].push_back(jb);
  }
  return j;
}

Function1D product_1d(const PriorFamily& prior, const CovarianceModel& v) {
  if (dimension(prior) != 1 || v.dimension() != 1) {
    throw Error(ErrorCode::InvalidArgument, "product_1d: prior and covariance must be one-dimensional");
  }
  return {[prior, v](double x) {
            const Vec p = Vec::Constant(1, x);
            return evaluate(prior, p) * v(p)(0, 0);
          },
          {},
          {}};
}

Function1D correlation_product(double alpha) {
  auto from_w = [alpha](double w) { return std::pow(w, 2.0 - alpha); };
  auto near = [from_w](double u) { return from_w(u * (2.0 - u)); };
  return {[from_w](double rho) { return from_w((1.0 - rho) * (1.0 + rho)); }, near, near};
}

AdmissibilityVerdict check_1d(const Function1D& pv, double a, double b, const ClassifierConfig& cfg) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "check_1d: need a < b");
  AdmissibilityVerdict out;
  out.method = "one_dimensional";
  const bool a_finite = std::isfinite(a), b_finite = std::isfinite(b);
  const double reach = a_finite && b_finite ? 0.5 * (b - a) : 1.0;

  if (a_finite) {
    auto g = [&](double u) { return 1.0 / positive(pv.near_lower ? pv.near_lower(u) : pv.value(a + u), "check_1d"); };
    out.boundaries.push_back(diagnostic("lower", classify_endpoint_integral(g, reach, cfg)));
  } else {
    const double start = b_finite ? std::max(1.0, 1.0 - b) : 1.0;
    auto g = [&](double r) { return 1.0 / positive(pv.value(-r), "check_1d"); };
    out.boundaries.push_back(diagnostic("lower", classify_tail_integral(g, start, cfg)));
  }
  if (b_finite) {
    auto g = [&](double u) { return 1.0 / positive(pv.near_upper ? pv.near_upper(u) : pv.value(b - u), "check_1d"); };
    out.boundaries.push_back(diagnostic("upper", classify_endpoint_integral(g, reach, cfg)));
  } else {
    const double start = a_finite ? std::max(1.0, a + 1.0) : 1.0;
    auto g = [&](double r) { return 1.0 / positive(pv.value(r), "check_1d"); };
    out.boundaries.push_back(diagnostic("upper", classify_tail_integral(g, start, cfg)));
  }
  settle(out, true);
  return out;
}

std::vector<Vec> sphere_directions(int d, const RadialConfig& cfg, double& weight) {
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    weight = 1.0;
  } else if (d == 2) {
    const int n = cfg.directions_2d;
    const double span = cfg.sector_end - cfg.sector_begin;
    weight = span / n;
    for (int k = 0; k < n; ++k) {
      const double t = cfg.sector_begin + (k + 0.5) * weight;
      Vec s(2);
      s << std::cos(t), std::sin(t);
      dirs.push_back(s);
    }
  } else if (d == 3) {
    const int n = cfg.directions_3d;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    weight = 4.0 * std::numbers::pi / n;
    for (int k = 0; k < n; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / n;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec s(3);
      s << rho * std::cos(golden * k), rho * std::sin(golden * k), z;
      dirs.push_back(s);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "sphere_directions: d must be 1, 2 or 3");
  }
  return dirs;
}

namespace {

struct DirectionResult {
  IntegralClassification cls;
  double f_limit = 0.0;
};

// g_k = 1 / (s' M_k^{-1} s) with M_k the matrix integral over the first k+1 shells.
DirectionResult radial_direction(const std::function<double(const Vec&)>& p, const CovarianceModel& v, int d,
                                 const Vec& s, bool towards_origin, const RadialConfig& cfg) {
  Mat m = Mat::Zero(d, d);
  std::vector<double> cutoffs, inc;
  double previous = 0.0;
  for (int k = 0; k < cfg.classifier.shells; ++k) {
    const double lo = towards_origin ? std::ldexp(cfg.r0, -k - 1) : std::ldexp(cfg.r0, k);
    const double hi = towards_origin ? std::ldexp(cfg.r0, -k) : std::ldexp(cfg.r0, k + 1);
    for_each_gauss_point(std::log(lo), std::log(hi), [&](double t, double w) {
      const double r = std::exp(t);
      const Vec x = r * s;
      const double pr = positive(p(x), "check_radial");
      m += (w * r * std::pow(r, 1 - d) / pr) * v.inverse(x);
    });
    const double g = 1.0 / (s.transpose() * small_inverse(m) * s)(0, 0);
    double delta = g - previous;
    if (delta < 64.0 * std::numeric_limits<double>::epsilon() * std::abs(g)) delta = std::max(delta, 0.0);
    inc.push_back(delta);
    cutoffs.push_back(towards_origin ? lo : hi);
    previous = g;
  }
  DirectionResult r;
  r.cls = classify_increments(std::move(cutoffs), inc, cfg.classifier);
  if (r.cls.kind == Divergence::Divergent) {
    r.f_limit = 0.0;
  } else if (r.cls.kind == Divergence::Convergent) {
    r.f_limit = 1.0 / r.cls.limit;
  } else {
    r.f_limit = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace

AdmissibilityVerdict check_radial(const std::function<double(const Vec&)>& p, const CovarianceModel& v, int d,
                                  const RadialConfig& cfg) {
  if (v.dimension() != d) throw Error(ErrorCode::InvalidArgument, "check_radial: covariance dimension mismatch");
  double weight = 0.0;
  const auto dirs = sphere_directions(d, cfg, weight);
  AdmissibilityVerdict out;
  out.method = "radial";
  double sphere = 0.0;
  std::vector<bool> sides{false};
  if (cfg.excluded_origin) sides.push_back(true);
  for (bool towards_origin : sides) {
    std::vector<DirectionResult> results(dirs.size());
    parallel_for(dirs.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) results[k] = radial_direction(p, v, d, dirs[k], towards_origin, cfg);
    });
    // report the slowest-diverging (smallest exponent) direction
    std::size_t worst = 0;
    bool any_conv = false, any_amb = false;
    double side_integral = 0.0;
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (results[k].cls.exponent < results[worst].cls.exponent) worst = k;
      any_conv |= results[k].cls.kind == Divergence::Convergent;
      any_amb |= results[k].cls.kind == Divergence::Ambiguous;
      if (std::isfinite(results[k].f_limit)) side_integral += weight * results[k].f_limit;
    }
    BoundaryDiagnostic b = diagnostic(towards_origin ? "origin" : "infinity", results[worst].cls);
    b.pass = !any_conv && !any_amb && side_integral <= cfg.sphere_tol;
    b.ambiguous = !any_conv && any_amb;
    out.boundaries.push_back(b);
    sphere += side_integral;
  }
  out.sphere_integral = sphere;
  settle(out, cfg.sufficiency);
  return out;
}

AdmissibilityVerdict check_bounded_boundary(const std::function<double(const Vec&)>& p, const CovarianceModel& v,
                                            const DomainSpec& domain, const BoundaryConfig& cfg) {
  domain.validate();
  const int d = domain.dimension();
  if (v.dimension() != d) throw Error(ErrorCode::InvalidArgument, "check_bounded_boundary: dimension mismatch");
  double reach = cfg.reach;
  if (!(reach > 0.0)) {
    reach = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) reach = std::min(reach, 0.25 * (domain.upper[i] - domain.lower[i]));
  }
  AdmissibilityVerdict out;
  out.method = "bounded_boundary";
  bool any_wall = false;
  for (int axis = 0; axis < d; ++axis) {
    for (Side side : {Side::Lower, Side::Upper}) {
      if (domain.face(axis, side) != FaceKind::Wall) continue;
      any_wall = true;
      // sample points on the face: midpoints of an equal split of the other axes
      std::vector<int> others;
      for (int j = 0; j < d; ++j)
        if (j != axis) others.push_back(j);
      std::vector<Vec> points;
      const int per_axis =
          others.empty() ? 1 : others.size() == 1 ? cfg.samples_per_face
                                                  : std::max(1, static_cast<int>(std::lround(std::sqrt(cfg.samples_per_face))));
      const int total = others.empty() ? 1 : static_cast<int>(std::pow(per_axis, others.size()));
      for (int k = 0; k < total; ++k) {
        Vec s(d);
        s[axis] = side == Side::Lower ? domain.lower[axis] : domain.upper[axis];
        int rest = k;
        for (int j : others) {
          const int c = rest % per_axis;
          rest /= per_axis;
          s[j] = domain.lower[j] + (c + 0.5) * (domain.upper[j] - domain.lower[j]) / per_axis;
        }
        points.push_back(s);
      }
      const double sign = side == Side::Lower ? 1.0 : -1.0;
      std::vector<IntegralClassification> cls(points.size());
      parallel_for(points.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
          auto g = [&](double u) {
            Vec x = points[k];
            x[axis] += sign * u;
            return v.inverse(x)(axis, axis) / positive(p(x), "check_bounded_boundary");
          };
          cls[k] = classify_endpoint_integral(g, reach, cfg.classifier);
        }
      });
      std::size_t worst = 0;
      bool any_conv = false, any_amb = false;
      for (std::size_t k = 0; k < cls.size(); ++k) {
        if (cls[k].exponent < cls[worst].exponent) worst = k;
        any_conv |= cls[k].kind == Divergence::Convergent;
        any_amb |= cls[k].kind == Divergence::Ambiguous;
      }
      BoundaryDiagnostic b = diagnostic("x" + std::to_string(axis + 1) + (side == Side::Lower ? "_lower" : "_upper"),
                                        cls[worst]);
      b.pass = !any_conv && !any_amb;
      b.ambiguous = !any_conv && any_amb;
      out.boundaries.push_back(b);
    }
  }
  if (!any_wall) throw Error(ErrorCode::InvalidArgument, "check_bounded_boundary: domain has no wall faces");
  settle(out, d == 1 && domain.all_walls());
  return out;
}

AdmissibilityVerdict classify_power_law(const PriorFamily& family) {
  AdmissibilityVerdict out;
  out.method = "power_law_exact";
  auto exact = [](std::string id, double exponent) {
    BoundaryDiagnostic b;
    b.id = std::move(id);
    b.exponent = exponent;
    b.pass = exponent >= 0.0;
    return b;
  };
  if (const auto* pr = std::get_if<PowerRadialPrior>(&family)) {
    // int r^{-alpha} r^{1-d} dr: towards infinity the shell exponent is
    // 2 - d - alpha, towards the origin alpha + d - 2
    const double d = pr->dimension;
    out.boundaries.push_back(exact("infinity", 2.0 - d - pr->alpha));
    if (pr->excluded_origin) out.boundaries.push_back(exact("origin", pr->alpha + d - 2.0));
  } else if (const auto* pc = std::get_if<CorrelationPowerPrior>(&family)) {
    // (pV)^{-1} = (1 - rho^2)^{alpha - 2} near rho = -1, +1
    out.boundaries.push_back(exact("lower", 1.0 - pc->alpha));
    out.boundaries.push_back(exact("upper", 1.0 - pc->alpha));
  } else {
    throw Error(ErrorCode::UnsupportedFamily, "classify_power_law: no exact classification for " + describe(family));
  }
  settle(out, true);
  return out;
}

double brown_residual(const ScalarField& p, const TensorField& v, const ScalarField& h, DivergenceScheme scheme) {
  return DivergenceOperator(v.scaled_by(p), scheme).apply(h).max_abs_interior();
}

}  // namespace admpriors
