#include "admpriors/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "admpriors/error.hpp"

namespace admpriors {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

DomainSpec DomainSpec::box(std::vector<double> lower, std::vector<double> upper, FaceKind kind) {
  DomainSpec spec;
  spec.face_kinds.assign(2 * lower.size(), kind);
  spec.lower = std::move(lower);
  spec.upper = std::move(upper);
  spec.validate();
  return spec;
}

bool DomainSpec::all_walls() const {
  return std::all_of(face_kinds.begin(), face_kinds.end(),
                     [](FaceKind k) { return k == FaceKind::Wall; });
}

bool DomainSpec::contains(const Vec& x) const {
  for (int i = 0; i < dimension(); ++i) {
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  }
  return true;
}

void DomainSpec::validate() const {
  const auto d = lower.size();
  require(d >= 1 && d <= 3, "DomainSpec: dimension must be 1, 2 or 3");
  require(upper.size() == d, "DomainSpec: lower/upper size mismatch");
  require(face_kinds.size() == 2 * d, "DomainSpec: need 2*d face kinds");
  for (std::size_t i = 0; i < d; ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]), "DomainSpec: non-finite bound");
    require(lower[i] < upper[i], "DomainSpec: non-positive extent on axis " + std::to_string(i));
  }
}

Grid::Grid(DomainSpec spec, std::vector<std::size_t> nodes) : spec_(std::move(spec)), n_(std::move(nodes)) {
  spec_.validate();
  const int d = spec_.dimension();
  require(static_cast<int>(n_.size()) == d, "Grid: node counts must match dimension");
  h_.resize(d);
  size_ = 1;
  for (int i = 0; i < d; ++i) {
    require(n_[i] >= 3, "Grid: need at least 3 nodes per axis");
    h_[i] = (spec_.upper[i] - spec_.lower[i]) / static_cast<double>(n_[i] - 1);
    size_ *= n_[i];
  }
  std::size_t s = 1;
  for (int i = d - 1; i >= 0; --i) {
    stride_[i] = s;
    s *= n_[i];
  }
}

double Grid::max_spacing() const { return *std::max_element(h_.begin(), h_.end()); }

std::array<std::size_t, 3> Grid::multi_index(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int i = 0; i < dimension(); ++i) {
    idx[i] = flat / stride_[i];
    flat %= stride_[i];
  }
  return idx;
}

std::size_t Grid::flat_index(const std::array<std::size_t, 3>& idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < dimension(); ++i) flat += idx[i] * stride_[i];
  return flat;
}

Vec Grid::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Vec x(dimension());
  for (int i = 0; i < dimension(); ++i) x[i] = coordinate(i, idx[i]);
  return x;
}

bool Grid::is_interior(std::size_t flat) const {
  const auto idx = multi_index(flat);
  for (int i = 0; i < dimension(); ++i) {
    if (idx[i] == 0 || idx[i] + 1 == n_[i]) return false;
  }
  return true;
}

std::size_t Grid::interior_count() const {
  std::size_t c = 1;
  for (int i = 0; i < dimension(); ++i) c *= n_[i] - 2;
  return c;
}

std::vector<std::pair<std::size_t, double>> Grid::interpolation_weights(
    const std::array<double, 3>& index_point) const {
  const int d = dimension();
  std::array<std::size_t, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    const double top = static_cast<double>(n_[i] - 1);
    const double q = std::clamp(index_point[i], 0.0, top);
    auto b = static_cast<std::size_t>(std::floor(q));
    if (b >= n_[i] - 1) b = n_[i] - 2;
    base[i] = b;
    frac[i] = q - static_cast<double>(b);
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::array<std::size_t, 3> idx = base;
    for (int i = 0; i < d; ++i) {
      if (corner & (1 << i)) {
        w *= frac[i];
        idx[i] += 1;
      } else {
        w *= 1.0 - frac[i];
      }
    }
    if (w != 0.0) out.emplace_back(flat_index(idx), w);
  }
  return out;
}

bool Grid::same_layout(const Grid& other) const {
  return n_ == other.n_ && spec_.lower == other.spec_.lower && spec_.upper == other.spec_.upper;
}

Grid build_grid(const DomainSpec& spec, const std::vector<std::size_t>& nodes) { return Grid(spec, nodes); }

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, std::vector<double> values, Support support)
    : grid_(std::move(grid)), values_(std::move(values)), support_(support) {
  require(values_.size() == grid_.size(), "ScalarField: value count does not match grid");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (support_ == Support::Interior && !grid_.is_interior(k)) {
      values_[k] = kMissing;
      continue;
    }
    if (!std::isfinite(values_[k])) {
      throw Error(ErrorCode::InvalidArgument, "ScalarField: non-finite value at node " + std::to_string(k));
    }
  }
}

ScalarField ScalarField::from_function(const Grid& grid, const std::function<double(const Vec&)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.point(k));
  return ScalarField(grid, std::move(v));
}

double ScalarField::interpolate(const Vec& x) const {
  std::array<double, 3> q{0, 0, 0};
  for (int i = 0; i < grid_.dimension(); ++i) {
    q[i] = (x[i] - grid_.spec().lower[i]) / grid_.spacing(i);
  }
  double s = 0.0;
  for (const auto& [node, w] : grid_.interpolation_weights(q)) s += w * values_[node];
  return s;
}

double ScalarField::max_abs_interior() const {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (grid_.is_interior(k)) m = std::max(m, std::abs(values_[k]));
  }
  return m;
}

double ScalarField::min_interior() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (grid_.is_interior(k)) m = std::min(m, values_[k]);
  }
  return m;
}

VectorField::VectorField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size() * static_cast<std::size_t>(grid_.dimension()),
          "VectorField: value count does not match grid");
  for (double v : values_) require(std::isfinite(v), "VectorField: non-finite value");
}

VectorField VectorField::from_function(const Grid& grid, const std::function<Vec(const Vec&)>& f) {
  const int d = grid.dimension();
  std::vector<double> v(grid.size() * d);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec b = f(grid.point(k));
    for (int i = 0; i < d; ++i) v[k * d + i] = b[i];
  }
  return VectorField(grid, std::move(v));
}

Vec VectorField::at(std::size_t node) const {
  Vec b(dimension());
  for (int i = 0; i < dimension(); ++i) b[i] = component(node, i);
  return b;
}

TensorField::TensorField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  const auto d = static_cast<std::size_t>(grid_.dimension());
  require(values_.size() == grid_.size() * d * d, "TensorField: value count does not match grid");
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double a = values_[k * d * d + i * d + j];
        const double b = values_[k * d * d + j * d + i];
        require(std::isfinite(a), "TensorField: non-finite entry");
        require(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}),
                "TensorField: asymmetric entry at node " + std::to_string(k));
      }
    }
  }
}

TensorField TensorField::from_function(const Grid& grid, const std::function<Mat(const Vec&)>& f) {
  const int d = grid.dimension();
  std::vector<double> v(grid.size() * d * d);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Mat a = f(grid.point(k));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v[k * d * d + i * d + j] = 0.5 * (a(i, j) + a(j, i));
  }
  return TensorField(grid, std::move(v));
}

Mat TensorField::at(std::size_t node) const {
  const int d = dimension();
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = entry(node, i, j);
  return a;
}

void TensorField::require_positive_definite() const {
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (grid_.is_interior(k) && !is_positive_definite(at(k))) {
      throw Error(ErrorCode::NonPositive,
                  "TensorField: not positive definite at interior node " + std::to_string(k));
    }
  }
}

TensorField TensorField::scaled_by(const ScalarField& s) const {
  require(s.grid().same_layout(grid_), "TensorField::scaled_by: grid mismatch");
  const auto dd = static_cast<std::size_t>(dimension() * dimension());
  std::vector<double> v(values_);
  for (std::size_t k = 0; k < grid_.size(); ++k)
    for (std::size_t e = 0; e < dd; ++e) v[k * dd + e] *= s[k];
  return TensorField(grid_, std::move(v));
}

// ---------------------------------------------------------------------------

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  const int d = g.dimension();
  std::vector<double> out(g.size() * d);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto idx = g.multi_index(k);
    for (int i = 0; i < d; ++i) {
      const std::size_t s = g.stride(i);
      const double h = g.spacing(i);
      const std::size_t last = g.nodes(i) - 1;
      double v;
      if (idx[i] == 0) {
        v = (-3.0 * f[k] + 4.0 * f[k + s] - f[k + 2 * s]) / (2.0 * h);
      } else if (idx[i] == last) {
        v = (3.0 * f[k] - 4.0 * f[k - s] + f[k - 2 * s]) / (2.0 * h);
      } else {
        v = (f[k + s] - f[k - s]) / (2.0 * h);
      }
      out[k * d + i] = v;
    }
  }
  return VectorField(g, std::move(out));
}

// ---------------------------------------------------------------------------

namespace {

void write_coordinates_header(std::ostream& os, int d) {
  for (int i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
}

void write_point(std::ostream& os, const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) os << x[i] << ',';
}

}  // namespace

void write_csv(std::ostream& os, const ScalarField& f, const std::string& value_name) {
  const Grid& g = f.grid();
  const auto old = os.precision(17);
  write_coordinates_header(os, g.dimension());
  os << value_name << '\n';
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (f.support() == Support::Interior && !g.is_interior(k)) continue;
    write_point(os, g.point(k));
    os << f[k] << '\n';
  }
  os.precision(old);
}

void write_csv(std::ostream& os, const VectorField& f) {
  const Grid& g = f.grid();
  const int d = g.dimension();
  const auto old = os.precision(17);
  write_coordinates_header(os, d);
  for (int i = 0; i < d; ++i) os << "value_" << (i + 1) << (i + 1 < d ? "," : "\n");
  for (std::size_t k = 0; k < g.size(); ++k) {
    write_point(os, g.point(k));
    for (int i = 0; i < d; ++i) os << f.component(k, i) << (i + 1 < d ? "," : "\n");
  }
  os.precision(old);
}

void write_csv(std::ostream& os, const TensorField& f) {
  const Grid& g = f.grid();
  const int d = g.dimension();
  const int count = d * (d + 1) / 2;
  const auto old = os.precision(17);
  write_coordinates_header(os, d);
  for (int c = 0; c < count; ++c) os << "value_" << (c + 1) << (c + 1 < count ? "," : "\n");
  for (std::size_t k = 0; k < g.size(); ++k) {
    write_point(os, g.point(k));
    int c = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j, ++c) os << f.entry(k, i, j) << (c + 1 < count ? "," : "\n");
  }
  os.precision(old);
}

ScalarField read_scalar_csv(std::istream& is, std::vector<FaceKind> face_kinds) {
  std::string line;
  std::vector<std::vector<double>> rows;
  int columns = -1;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != columns) {
      throw Error(ErrorCode::InvalidArgument, "read_scalar_csv: ragged row");
    }
    rows.push_back(std::move(row));
  }
  const int d = columns - 1;
  require(d >= 1 && d <= 3 && !rows.empty(), "read_scalar_csv: expected x1..xd,value columns");

  std::vector<std::vector<double>> axes(d);
  for (int i = 0; i < d; ++i) {
    for (const auto& r : rows) axes[i].push_back(r[i]);
    std::sort(axes[i].begin(), axes[i].end());
    const double tol = 1e-9 * std::max(1.0, std::abs(axes[i].back() - axes[i].front()));
    axes[i].erase(std::unique(axes[i].begin(), axes[i].end(),
                              [tol](double a, double b) { return std::abs(a - b) <= tol; }),
                  axes[i].end());
  }
  DomainSpec spec;
  std::vector<std::size_t> n(d);
  for (int i = 0; i < d; ++i) {
    spec.lower.push_back(axes[i].front());
    spec.upper.push_back(axes[i].back());
    n[i] = axes[i].size();
  }
  spec.face_kinds = face_kinds.empty() ? std::vector<FaceKind>(2 * d, FaceKind::Wall) : std::move(face_kinds);
  Grid grid(spec, n);
  require(rows.size() == grid.size(), "read_scalar_csv: rows do not form a full lattice");
  std::vector<double> values(grid.size(), kMissing);
  for (const auto& r : rows) {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<std::size_t>(std::llround((r[i] - spec.lower[i]) / grid.spacing(i)));
    }
    values[grid.flat_index(idx)] = r[d];
  }
  return ScalarField(grid, std::move(values));
}

}  // namespace admpriors
