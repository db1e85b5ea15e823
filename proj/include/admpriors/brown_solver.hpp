#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "admpriors/grid.hpp"
#include "admpriors/stencil.hpp"

namespace admpriors {

enum class ResidualNorm { Max, Rms };

struct SolverConfig {
  double omega = 1.5;
  std::size_t max_iters = 200000;
  double residual_tol = 0.01;
  ResidualNorm residual_norm = ResidualNorm::Max;
  DivergenceScheme scheme = DivergenceScheme::Monotone;
  unsigned threads = 1;
  std::size_t check_every = 10;  // sweeps between residual evaluations
  void validate() const;
};

struct BrownSolution {
  ScalarField p;
  std::size_t iterations;
  double residual;
  std::vector<std::pair<std::size_t, double>> history;  // (sweep, residual)
};

/// Relaxation (multicolour SOR) for div(V grad p) = 0 with p fixed on the
/// grid edge.  Nodes are coloured by the parity of each index, so no stencil
/// couples two nodes of one colour and each colour sweep can run in parallel
/// with results identical to a serial sweep.
BrownSolution solve_brown_equation(const TensorField& v, const ScalarField& boundary, const SolverConfig& cfg = {});

/// Residual of the discrete equation in the configured norm (interior nodes).
double residual_norm(const ScalarField& r, ResidualNorm norm);

struct EigenResult {
  double lambda;
  ScalarField u;  // max 1, positive inside, zero on the edge
  std::size_t iterations;
};

/// Principal eigenpair of 2 div(V grad u) - R_b u with u = 0 on the edge.
EigenResult principal_eigenpair(const TensorField& v, const ScalarField& r_b, const SolverConfig& cfg = {});

struct MatchingResult {
  ScalarField p;
  double lambda;
  std::string branch;  // "dirichlet" or "eigenvector"
  double discrepancy;  // max |R(p) - R(b)| over interior
  double tolerance;
};

/// Prior whose risk matches that of decision b: p = u^2 with
/// 2 div(V grad u) - R(b) u = 0 and u = phi on the edge.  When the principal
/// eigenvalue is within matching_tol of zero the principal eigenvector is
/// squared instead.  matching_tol <= 0 selects 10 h^2 max(1, max|R(b)|).
MatchingResult risk_matching_prior(const VectorField& b, const TensorField& v, const ScalarField& boundary_phi,
                                   const SolverConfig& cfg = {}, double matching_tol = 0.0);

}  // namespace admpriors
