#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "admpriors/grid.hpp"

namespace admpriors {

/// Monotone: lattice-basis (Selling) decomposition with nonnegative edge
/// weights, arithmetic averaging over each edge, shortened arms where an
/// offset leaves the grid.  NestedCentral: half-node averages on the
/// diagonal, nested central differences off the diagonal (not monotone when
/// A is strongly anisotropic).
enum class DivergenceScheme { Monotone, NestedCentral };

using Offset = std::array<int, 3>;

struct OffsetWeight {
  Offset offset;  // canonical sign: first nonzero component positive
  double weight;  // >= 0
};

/// a = sum weight * e e' over the returned offsets (d <= 3, a symmetric
/// positive definite).  Offsets are primitive integer vectors.
std::vector<OffsetWeight> selling_decomposition(const Mat& a);

/// Sparse representation of u -> sum_ij d_i(A_ij d_j u) on interior nodes.
/// Rows of edge nodes are empty.  Columns may reference edge nodes.
class DivergenceOperator {
 public:
  struct Entry {
    std::size_t column;
    double coefficient;
  };

  explicit DivergenceOperator(const TensorField& a, DivergenceScheme scheme = DivergenceScheme::Monotone);

  const Grid& grid() const { return grid_; }
  DivergenceScheme scheme() const { return scheme_; }
  std::span<const Entry> row(std::size_t node) const {
    return {entries_.data() + row_start_[node], row_start_[node + 1] - row_start_[node]};
  }
  double diagonal(std::size_t node) const { return diagonal_[node]; }
  std::size_t nonzeros() const { return entries_.size(); }

  double apply_at(std::span<const double> u, std::size_t node) const;
  ScalarField apply(const ScalarField& u) const;  // interior support

  /// Largest offset length (in nodes) used by any row.
  int max_reach() const { return max_reach_; }

 private:
  void build_monotone(const TensorField& a);
  void build_nested_central(const TensorField& a);
  void finish_row(std::size_t node, std::vector<Entry>& row);

  Grid grid_;
  DivergenceScheme scheme_;
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
  std::vector<double> diagonal_;
  int max_reach_ = 1;
};

ScalarField divergence_form_apply(const TensorField& a, const ScalarField& u,
                                  DivergenceScheme scheme = DivergenceScheme::Monotone);

}  // namespace admpriors
