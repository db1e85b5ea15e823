#include "admpriors/integral_classifier.hpp"

#include <cmath>
#include <limits>

#include "admpriors/error.hpp"
#include "admpriors/quadrature.hpp"

namespace admpriors {

const char* to_string(Divergence d) {
  switch (d) {
    case Divergence::Divergent: return "divergent";
    case Divergence::Convergent: return "convergent";
    case Divergence::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

double log_shell_integral(const std::function<double(double)>& g, double a, double b) {
  double s = 0.0;
  for_each_gauss_point(std::log(a), std::log(b), [&](double t, double w) {
    const double x = std::exp(t);
    s += w * x * g(x);
  });
  return s;
}

IntegralClassification classify_increments(std::vector<double> cutoffs, const std::vector<double>& increments,
                                           const ClassifierConfig& cfg) {
  const int n = static_cast<int>(increments.size());
  if (n < cfg.fit_shells || cfg.fit_shells < 2) {
    throw Error(ErrorCode::InvalidArgument, "classify_increments: not enough shells for the fit");
  }
  IntegralClassification out;
  out.cutoffs = std::move(cutoffs);
  double running = 0.0;
  for (double d : increments) {
    if (d < 0.0 || std::isnan(d)) throw Error(ErrorCode::NonPositive, "classify_increments: negative or NaN shell");
    running += d;
    out.integrals.push_back(running);
  }
  const double inf = std::numeric_limits<double>::infinity();
  if (std::isinf(running)) {
    out.kind = Divergence::Divergent;
    out.exponent = inf;
    out.limit = inf;
    return out;
  }
  // least-squares slope of log2(increment) against shell index
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  bool vanished = false;
  for (int k = n - cfg.fit_shells; k < n; ++k) {
    if (increments[k] <= 0.0) {
      vanished = true;
      break;
    }
    const double y = std::log2(increments[k]);
    sx += k;
    sy += y;
    sxx += static_cast<double>(k) * k;
    sxy += k * y;
    ++m;
  }
  if (vanished) {
    out.kind = Divergence::Convergent;
    out.exponent = -inf;
    out.limit = running;
    return out;
  }
  out.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (out.exponent >= cfg.divergent_exponent) {
    out.kind = Divergence::Divergent;
    out.limit = inf;
  } else if (out.exponent <= cfg.convergent_exponent) {
    out.kind = Divergence::Convergent;
    const double ratio = std::exp2(out.exponent);
    out.limit = running + increments.back() * ratio / (1.0 - ratio);
  } else {
    out.kind = Divergence::Ambiguous;
    out.limit = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

IntegralClassification classify_endpoint_integral(const std::function<double(double)>& g, double reach,
                                                  const ClassifierConfig& cfg) {
  if (!(reach > 0.0)) throw Error(ErrorCode::InvalidArgument, "classify_endpoint_integral: reach must be positive");
  std::vector<double> cutoffs, inc;
  for (int k = 0; k < cfg.shells; ++k) {
    const double hi = std::ldexp(reach, -k);
    const double lo = std::ldexp(reach, -k - 1);
    inc.push_back(log_shell_integral(g, lo, hi));
    cutoffs.push_back(lo);
  }
  return classify_increments(std::move(cutoffs), inc, cfg);
}

IntegralClassification classify_tail_integral(const std::function<double(double)>& g, double start,
                                              const ClassifierConfig& cfg) {
  if (!(start > 0.0)) throw Error(ErrorCode::InvalidArgument, "classify_tail_integral: start must be positive");
  std::vector<double> cutoffs, inc;
  for (int k = 0; k < cfg.shells; ++k) {
    const double lo = std::ldexp(start, k);
    const double hi = std::ldexp(start, k + 1);
    inc.push_back(log_shell_integral(g, lo, hi));
    cutoffs.push_back(hi);
  }
  return classify_increments(std::move(cutoffs), inc, cfg);
}

}  // namespace admpriors
