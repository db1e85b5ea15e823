#include "admpriors/brown_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "admpriors/error.hpp"
#include "admpriors/parallel.hpp"
#include "admpriors/risk.hpp"

namespace admpriors {

void SolverConfig::validate() const {
  if (!(omega > 0.0 && omega < 2.0)) throw Error(ErrorCode::InvalidArgument, "solver omega must lie in (0, 2)");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "solver max_iters must be >= 1");
  if (!(residual_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "solver residual_tol must be positive");
  if (check_every < 1) throw Error(ErrorCode::InvalidArgument, "solver check_every must be >= 1");
}

double residual_norm(const ScalarField& r, ResidualNorm norm) {
  const Grid& g = r.grid();
  double m = 0.0, s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k)) continue;
    m = std::max(m, std::abs(r[k]));
    s += r[k] * r[k];
  }
  return norm == ResidualNorm::Max ? m : std::sqrt(s / static_cast<double>(g.interior_count()));
}

namespace {

std::vector<std::vector<std::size_t>> colour_classes(const Grid& g) {
  const int d = g.dimension();
  std::vector<std::vector<std::size_t>> colours(std::size_t{1} << d);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k)) continue;
    const auto idx = g.multi_index(k);
    std::size_t c = 0;
    for (int i = 0; i < d; ++i) c |= (idx[i] & 1u) << i;
    colours[c].push_back(k);
  }
  return colours;
}

double current_residual(const DivergenceOperator& op, const std::vector<double>& u, ResidualNorm norm) {
  const Grid& g = op.grid();
  double m = 0.0, s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k)) continue;
    const double r = op.apply_at(u, k);
    m = std::max(m, std::abs(r));
    s += r * r;
  }
  return norm == ResidualNorm::Max ? m : std::sqrt(s / static_cast<double>(g.interior_count()));
}

/// Interior unknown numbering.
struct InteriorMap {
  std::vector<long> index;  // -1 on edges
  std::vector<std::size_t> nodes;
  explicit InteriorMap(const Grid& g) : index(g.size(), -1) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.is_interior(k)) {
        index[k] = static_cast<long>(nodes.size());
        nodes.push_back(k);
      }
    }
  }
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Interior block of 2 D - diag(r) + shift I; edge couplings returned as
/// (row, edge node, coefficient) for right-hand sides.
SparseMatrix interior_matrix(const DivergenceOperator& op, const InteriorMap& map, const ScalarField& r, double shift,
                             std::vector<std::tuple<long, std::size_t, double>>* edge_terms) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t row = 0; row < map.nodes.size(); ++row) {
    const std::size_t k = map.nodes[row];
    for (const auto& e : op.row(k)) {
      const long col = map.index[e.column];
      if (col >= 0) {
        trips.emplace_back(static_cast<int>(row), static_cast<int>(col), 2.0 * e.coefficient);
      } else if (edge_terms) {
        edge_terms->emplace_back(static_cast<long>(row), e.column, 2.0 * e.coefficient);
      }
    }
    trips.emplace_back(static_cast<int>(row), static_cast<int>(row), shift - r[k]);
  }
  const auto n = static_cast<Eigen::Index>(map.nodes.size());
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

void require_same(const Grid& a, const Grid& b, const char* who) {
  if (!a.same_layout(b)) throw Error(ErrorCode::InvalidArgument, std::string(who) + ": grid mismatch");
}

}  // namespace

BrownSolution solve_brown_equation(const TensorField& v, const ScalarField& boundary, const SolverConfig& cfg) {
  cfg.validate();
  require_same(v.grid(), boundary.grid(), "solve_brown_equation");
  const Grid& g = v.grid();
  const DivergenceOperator op(v, cfg.scheme);

  std::vector<double> u(g.size());
  double edge_sum = 0.0;
  std::size_t edge_count = 0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_interior(k)) continue;
    if (!(boundary[k] > 0.0)) {
      throw Error(ErrorCode::NonPositive, "solve_brown_equation: boundary value not positive at node " + std::to_string(k));
    }
    u[k] = boundary[k];
    edge_sum += boundary[k];
    lo = std::min(lo, boundary[k]);
    ++edge_count;
  }
  const double start = edge_sum / static_cast<double>(edge_count);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.is_interior(k)) u[k] = start;

  const auto colours = colour_classes(g);
  BrownSolution out{ScalarField(g, u), 0, std::numeric_limits<double>::infinity(), {}};
  const double omega = cfg.omega;
  std::size_t sweep = 0;
  double residual = current_residual(op, u, cfg.residual_norm);
  out.history.emplace_back(0, residual);
  while (residual >= cfg.residual_tol && sweep < cfg.max_iters) {
    for (const auto& colour : colours) {
      parallel_for(colour.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          const std::size_t k = colour[c];
          const double diag = op.diagonal(k);
          const double r = op.apply_at(u, k);
          u[k] -= omega * r / diag;
        }
      });
    }
    ++sweep;
    if (sweep % cfg.check_every == 0 || sweep == cfg.max_iters) {
      residual = current_residual(op, u, cfg.residual_norm);
      out.history.emplace_back(sweep, residual);
      if (!std::isfinite(residual)) break;
    }
  }
  if (!(residual < cfg.residual_tol)) {
    throw NonConvergenceError(ErrorCode::NonConvergence, residual, sweep,
                              "solve_brown_equation: residual " + std::to_string(residual) + " after " +
                                  std::to_string(sweep) + " sweeps");
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_interior(k) && !(u[k] > 0.0)) {
      throw Error(ErrorCode::NonPositive, "solve_brown_equation: non-positive interior value at node " + std::to_string(k));
    }
  }
  out.p = ScalarField(g, std::move(u));
  out.iterations = sweep;
  out.residual = residual;
  return out;
}

EigenResult principal_eigenpair(const TensorField& v, const ScalarField& r_b, const SolverConfig& cfg) {
  cfg.validate();
  require_same(v.grid(), r_b.grid(), "principal_eigenpair");
  const Grid& g = v.grid();
  const DivergenceOperator op(v, cfg.scheme);
  const InteriorMap map(g);
  const SparseMatrix a = interior_matrix(op, map, r_b, 0.0, nullptr);
  const auto n = a.rows();

  // Gershgorin bound on the spectrum from above
  double sigma = 0.0;
  {
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(n), radius = Eigen::VectorXd::Zero(n);
    for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
        if (it.row() == it.col()) {
          centre[it.row()] += it.value();
        } else {
          radius[it.row()] += std::abs(it.value());
        }
      }
    }
    sigma = (centre + radius).maxCoeff() + 1.0;
  }

  const SparseMatrix identity = [&] {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
  }();
  Eigen::SparseLU<SparseMatrix> lu;
  auto factor = [&](double s) {
    const SparseMatrix b = s * identity - a;
    lu.compute(b);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "principal_eigenpair: factorisation failed");
  };
  factor(sigma);

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = x.dot(a * x);
  double previous = std::numeric_limits<double>::infinity();
  bool reshifted = false;
  const std::size_t limit = std::min<std::size_t>(cfg.max_iters, 5000);
  std::size_t it = 0;
  for (; it < limit; ++it) {
    Eigen::VectorXd y = lu.solve(x);
    y /= y.norm();
    x = y;
    lambda = x.dot(a * x);
    const double drift = std::abs(lambda - previous);
    previous = lambda;
    const double scale = std::max(1.0, std::abs(lambda));
    if (!reshifted && drift < 1e-3 * scale) {
      factor(lambda + 1.0);
      reshifted = true;
      previous = std::numeric_limits<double>::infinity();
      continue;
    }
    if (reshifted && drift < 1e-8 * scale) break;
  }
  if (it == limit) {
    throw NonConvergenceError(ErrorCode::NonConvergence, std::abs(lambda - previous), it,
                              "principal_eigenpair: Rayleigh quotient did not settle");
  }
  // sign and positivity
  if (x.sum() < 0.0) x = -x;
  const double top = x.maxCoeff();
  x /= top;
  if (x.minCoeff() < -1e-10) {
    throw Error(ErrorCode::EigenvalueSign, "principal_eigenpair: eigenvector changes sign (non-principal convergence)");
  }
  std::vector<double> u(g.size(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) u[map.nodes[i]] = std::max(x[i], 0.0);
  return {lambda, ScalarField(g, std::move(u)), it + 1};
}

MatchingResult risk_matching_prior(const VectorField& b, const TensorField& v, const ScalarField& boundary_phi,
                                   const SolverConfig& cfg, double matching_tol) {
  cfg.validate();
  require_same(v.grid(), b.grid(), "risk_matching_prior");
  require_same(v.grid(), boundary_phi.grid(), "risk_matching_prior");
  const Grid& g = v.grid();
  const ScalarField r_b = risk_of_decision(b, v);
  const double scale = std::max(1.0, r_b.max_abs_interior());
  const double tol = matching_tol > 0.0 ? matching_tol : 10.0 * g.max_spacing() * g.max_spacing() * scale;

  const EigenResult eig = principal_eigenpair(v, r_b, cfg);
  const DivergenceOperator op(v, cfg.scheme);
  MatchingResult out{ScalarField(g, std::vector<double>(g.size(), 1.0)), eig.lambda, "", 0.0, tol};

  std::vector<double> u(g.size(), 0.0);
  // the eigenvector itself matches R(b) to within |lambda|, so it is used
  // whenever that already meets the tolerance
  if (eig.lambda < -tol) {
    out.branch = "dirichlet";
    const InteriorMap map(g);
    std::vector<std::tuple<long, std::size_t, double>> edge_terms;
    const SparseMatrix a = interior_matrix(op, map, r_b, 0.0, &edge_terms);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.is_interior(k)) continue;
      if (!(boundary_phi[k] > 0.0)) throw Error(ErrorCode::NonPositive, "risk_matching_prior: boundary phi must be positive");
      u[k] = boundary_phi[k];
    }
    for (const auto& [row, node, c] : edge_terms) rhs[row] -= c * u[node];
    Eigen::SparseLU<SparseMatrix> lu(a);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "risk_matching_prior: factorisation failed");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t i = 0; i < map.nodes.size(); ++i) u[map.nodes[i]] = x[static_cast<Eigen::Index>(i)];
  } else {
    out.branch = "eigenvector";
    const auto ev = eig.u.values();
    u.assign(ev.begin(), ev.end());
  }
  double disc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k)) continue;
    if (!(u[k] > 0.0)) throw Error(ErrorCode::NonPositive, "risk_matching_prior: root prior not positive at node " + std::to_string(k));
    disc = std::max(disc, std::abs(2.0 * op.apply_at(u, k) / u[k] - r_b[k]));
  }
  for (double& x : u) x *= x;
  out.p = ScalarField(g, std::move(u));
  out.discrepancy = disc;
  if (!(disc <= tol)) {
    throw NonConvergenceError(ErrorCode::MatchingTolerance, disc, 0,
                              "risk_matching_prior: matching discrepancy " + std::to_string(disc) + " exceeds " +
                                  std::to_string(tol));
  }
  return out;
}

}  // namespace admpriors
