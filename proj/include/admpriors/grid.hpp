#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "admpriors/linalg.hpp"

namespace admpriors {

/// Wall: the grid edge is a true boundary of D.  Asymptotic: the true
/// boundary lies at 0 (lower faces) or infinity (upper faces) and the grid
/// edge is a truncation.
enum class FaceKind { Wall, Asymptotic };
enum class Side { Lower, Upper };

struct DomainSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<FaceKind> face_kinds;  // 2*d entries: axis 0 lower, axis 0 upper, axis 1 lower, ...
  bool excluded_origin = false;

  static DomainSpec box(std::vector<double> lower, std::vector<double> upper,
                        FaceKind kind = FaceKind::Wall);

  int dimension() const { return static_cast<int>(lower.size()); }
  FaceKind face(int axis, Side side) const {
    return face_kinds[2 * axis + (side == Side::Upper ? 1 : 0)];
  }
  bool all_walls() const;
  bool contains(const Vec& x) const;  // open box
  void validate() const;
};

/// Rectangular node lattice over a DomainSpec; row-major with axis 0 slowest.
class Grid {
 public:
  Grid(DomainSpec spec, std::vector<std::size_t> nodes);

  const DomainSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension(); }
  std::size_t nodes(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double max_spacing() const;
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  double coordinate(int axis, std::size_t k) const {
    return spec_.lower[axis] + static_cast<double>(k) * h_[axis];
  }
  std::array<std::size_t, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<std::size_t, 3>& idx) const;
  Vec point(std::size_t flat) const;
  bool is_interior(std::size_t flat) const;
  std::size_t interior_count() const;

  /// Multilinear interpolation weights at a (fractional) index-space point
  /// inside the lattice.  Returns (node, weight) pairs with weights summing to 1.
  std::vector<std::pair<std::size_t, double>> interpolation_weights(
      const std::array<double, 3>& index_point) const;

  bool same_layout(const Grid& other) const;

 private:
  DomainSpec spec_;
  std::vector<std::size_t> n_;
  std::vector<double> h_;
  std::array<std::size_t, 3> stride_{};
  std::size_t size_ = 0;
};

Grid build_grid(const DomainSpec& spec, const std::vector<std::size_t>& nodes);

/// Which nodes carry values.  Interior-support fields hold NaN (missing) at
/// edge nodes.
enum class Support { All, Interior };

class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values, Support support = Support::All);
  static ScalarField from_function(const Grid& grid, const std::function<double(const Vec&)>& f);

  const Grid& grid() const { return grid_; }
  Support support() const { return support_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  double interpolate(const Vec& x) const;  // multilinear, x inside the grid box

  double max_abs_interior() const;
  double min_interior() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  Support support_;
};

class VectorField {
 public:
  VectorField(Grid grid, std::vector<double> values);  // node-major, d entries per node
  static VectorField from_function(const Grid& grid, const std::function<Vec(const Vec&)>& f);

  const Grid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }
  std::span<const double> values() const { return values_; }
  double component(std::size_t node, int i) const { return values_[node * dimension() + i]; }
  Vec at(std::size_t node) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class TensorField {
 public:
  TensorField(Grid grid, std::vector<double> values);  // node-major, d*d entries per node
  static TensorField from_function(const Grid& grid, const std::function<Mat(const Vec&)>& f);

  const Grid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }
  Mat at(std::size_t node) const;
  double entry(std::size_t node, int i, int j) const {
    const int d = dimension();
    return values_[node * d * d + i * d + j];
  }
  std::span<const double> values() const { return values_; }

  /// Throws NonPositive naming the first interior node that fails.
  void require_positive_definite() const;
  /// Nodewise product s(x) * A(x).
  TensorField scaled_by(const ScalarField& s) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Central differences in the interior, one-sided second order at edges.
VectorField gradient(const ScalarField& f);

/// CSV emission (17 significant digits, node order as stored).  Interior
/// support fields skip edge nodes.
void write_csv(std::ostream& os, const ScalarField& f, const std::string& value_name = "value");
void write_csv(std::ostream& os, const VectorField& f);
void write_csv(std::ostream& os, const TensorField& f);  // upper triangle, row-major

/// Reads `x1,...,xd,value` rows (comment lines starting with # skipped) and
/// rebuilds the lattice from the distinct coordinates.  Empty face_kinds means
/// all walls.
ScalarField read_scalar_csv(std::istream& is, std::vector<FaceKind> face_kinds = {});

}  // namespace admpriors
