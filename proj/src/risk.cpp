#include "admpriors/risk.hpp"

#include <cmath>
#include <string>

#include "admpriors/error.hpp"

namespace admpriors {

namespace {

void require_positive(const ScalarField& p, const char* who) {
  const auto v = p.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0.0)) {
      throw Error(ErrorCode::NonPositive, std::string(who) + ": prior not positive at node " + std::to_string(k));
    }
  }
}

void require_same_grid(const Grid& a, const Grid& b, const char* who) {
  if (!a.same_layout(b)) throw Error(ErrorCode::InvalidArgument, std::string(who) + ": grid mismatch");
}

}  // namespace

VectorField decision_of_prior(const ScalarField& p) {
  require_positive(p, "decision_of_prior");
  std::vector<double> logs(p.values().begin(), p.values().end());
  for (double& x : logs) x = std::log(x);
  return gradient(ScalarField(p.grid(), std::move(logs)));
}

ScalarField risk_of_decision(const VectorField& b, const TensorField& v) {
  require_same_grid(b.grid(), v.grid(), "risk_of_decision");
  v.require_positive_definite();
  const Grid& g = b.grid();
  const int d = g.dimension();
  // flux w_i = sum_j V_ij b_j at every node
  std::vector<double> flux(g.size() * d, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) flux[k * d + i] += v.entry(k, i, j) * b.component(k, j);

  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k)) continue;
    double r = 0.0;
    for (int i = 0; i < d; ++i) {
      const std::size_t s = g.stride(i);
      const std::size_t at = g.multi_index(k)[i];
      const std::size_t last = g.nodes(i) - 1;
      const double h = g.spacing(i);
      // next to an edge the decision field carries a different truncation error, so
      // differentiate the flux one-sided over interior nodes instead
      if (at == 1 && last >= 4) {
        r += (-3.0 * flux[k * d + i] + 4.0 * flux[(k + s) * d + i] - flux[(k + 2 * s) * d + i]) / (2.0 * h);
      } else if (at == last - 1 && last >= 4) {
        r += (3.0 * flux[k * d + i] - 4.0 * flux[(k - s) * d + i] + flux[(k - 2 * s) * d + i]) / (2.0 * h);
      } else {
        r += (flux[(k + s) * d + i] - flux[(k - s) * d + i]) / (2.0 * h);
      }
      r += 0.5 * b.component(k, i) * flux[k * d + i];
    }
    out[k] = r;
  }
  return ScalarField(g, std::move(out), Support::Interior);
}

ScalarField risk_of_prior(const ScalarField& p, const TensorField& v, DivergenceScheme scheme) {
  require_same_grid(p.grid(), v.grid(), "risk_of_prior");
  require_positive(p, "risk_of_prior");
  std::vector<double> root(p.values().begin(), p.values().end());
  for (double& x : root) x = std::sqrt(x);
  const ScalarField u(p.grid(), root);
  const ScalarField lu = DivergenceOperator(v, scheme).apply(u);
  std::vector<double> out(p.grid().size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (p.grid().is_interior(k)) out[k] = 2.0 * lu[k] / root[k];
  }
  return ScalarField(p.grid(), std::move(out), Support::Interior);
}

GainReport risk_gain_vs_uniform(const ScalarField& p, const TensorField& v, double brown_tol,
                                DivergenceScheme scheme) {
  require_same_grid(p.grid(), v.grid(), "risk_gain_vs_uniform");
  require_positive(p, "risk_gain_vs_uniform");
  const Grid& g = p.grid();
  const DivergenceOperator op(v, scheme);
  const double residual = op.apply(p).max_abs_interior();
  if (!(residual <= brown_tol)) {
    throw NonConvergenceError(ErrorCode::BrownResidual, residual, 0,
                              "risk_gain_vs_uniform: Brown residual " + std::to_string(residual) +
                                  " exceeds " + std::to_string(brown_tol));
  }
  const ScalarField risk = risk_of_prior(p, v, scheme);
  const VectorField grad = gradient(p);
  const int d = g.dimension();
  std::vector<double> gain(g.size(), 0.0), cp(g.size(), 0.0), cp2(g.size(), 0.0);
  double disc_p = 0.0, disc_p2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k)) continue;
    double q = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) q += grad.component(k, i) * v.entry(k, i, j) * grad.component(k, j);
    gain[k] = -risk[k];
    cp[k] = 0.5 * q / p[k];
    cp2[k] = 0.5 * q / (p[k] * p[k]);
    disc_p = std::max(disc_p, std::abs(gain[k] - cp[k]));
    disc_p2 = std::max(disc_p2, std::abs(gain[k] - cp2[k]));
  }
  return {ScalarField(g, std::move(gain), Support::Interior), ScalarField(g, std::move(cp), Support::Interior),
          ScalarField(g, std::move(cp2), Support::Interior), disc_p, disc_p2, residual};
}

}  // namespace admpriors
