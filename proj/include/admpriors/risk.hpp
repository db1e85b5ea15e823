#pragma once

#include "admpriors/grid.hpp"
#include "admpriors/stencil.hpp"

namespace admpriors {

/// b_i = d_i log p (central differences on log p; one-sided at edges).
VectorField decision_of_prior(const ScalarField& p);

/// sum_ij d_i(V_ij b_j) + 1/2 b'Vb at interior nodes (relative to uniform).
ScalarField risk_of_decision(const VectorField& b, const TensorField& v);

/// 2 div(V grad sqrt p) / sqrt p at interior nodes.
ScalarField risk_of_prior(const ScalarField& p, const TensorField& v,
                          DivergenceScheme scheme = DivergenceScheme::Monotone);

struct GainReport {
  ScalarField gain;           // -risk_of_prior
  ScalarField closed_form_p;  // 1/2 grad p' V grad p / p
  ScalarField closed_form_p2; // 1/2 grad p' V grad p / p^2
  double discrepancy_p;       // max |gain - closed_form_p| over interior
  double discrepancy_p2;      // max |gain - closed_form_p2| over interior
  double brown_residual;      // max |div(V grad p)| over interior
};

/// Risk reduction of p against the uniform.  p must satisfy
/// div(V grad p) = 0 to within brown_tol (max norm), else BrownResidual.
GainReport risk_gain_vs_uniform(const ScalarField& p, const TensorField& v, double brown_tol = 0.01,
                                DivergenceScheme scheme = DivergenceScheme::Monotone);

}  // namespace admpriors
