#include "admpriors/covariance.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "admpriors/error.hpp"
#include "admpriors/parallel.hpp"

namespace admpriors {

CovarianceModel CovarianceModel::identity(int d) {
  if (d < 1 || d > 3) throw Error(ErrorCode::InvalidArgument, "identity covariance: d must be 1, 2 or 3");
  CovarianceModel m;
  m.kind_ = CovarianceKind::Identity;
  m.dimension_ = d;
  m.name_ = "identity";
  return m;
}

CovarianceModel CovarianceModel::constant(const Mat& v) {
  if (v.rows() != v.cols() || v.rows() < 1 || v.rows() > 3 || !is_positive_definite(v)) {
    throw Error(ErrorCode::NonPositive, "constant covariance must be a positive definite d x d matrix");
  }
  CovarianceModel m;
  m.kind_ = CovarianceKind::Constant;
  m.dimension_ = static_cast<int>(v.rows());
  m.name_ = "constant";
  m.constant_ = std::make_shared<const Mat>(v);
  return m;
}

CovarianceModel CovarianceModel::correlation() {
  CovarianceModel m;
  m.kind_ = CovarianceKind::Correlation;
  m.dimension_ = 1;
  m.name_ = "correlation";
  return m;
}

CovarianceModel CovarianceModel::mixture(QuadratureConfig q) {
  q.validate();
  CovarianceModel m;
  m.kind_ = CovarianceKind::Mixture;
  m.dimension_ = 2;
  m.name_ = "mixture";
  m.quadrature_ = q;
  return m;
}

CovarianceModel CovarianceModel::mixture_wall_limit() {
  CovarianceModel m;
  m.kind_ = CovarianceKind::MixtureWallLimit;
  m.dimension_ = 2;
  m.name_ = "mixture_wall_limit";
  return m;
}

CovarianceModel CovarianceModel::tabulated(TensorField field) {
  CovarianceModel m;
  m.kind_ = CovarianceKind::Tabulated;
  m.dimension_ = field.dimension();
  m.name_ = "tabulated";
  m.table_ = std::make_shared<const TensorField>(std::move(field));
  return m;
}

CovarianceModel CovarianceModel::custom(int d, std::string name, std::function<Mat(const Vec&)> v,
                                        std::function<Vec(const Vec&)> divergence) {
  CovarianceModel m;
  m.kind_ = CovarianceKind::Custom;
  m.dimension_ = d;
  m.name_ = std::move(name);
  m.custom_ = std::move(v);
  m.custom_divergence_ = std::move(divergence);
  return m;
}

CovarianceModel CovarianceModel::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "covariance scale must be positive");
  CovarianceModel m = *this;
  m.scale_ *= c;
  return m;
}

namespace {

Mat interpolate_table(const TensorField& t, const Vec& x) {
  const Grid& g = t.grid();
  const int d = g.dimension();
  std::array<double, 3> q{0, 0, 0};
  for (int i = 0; i < d; ++i) q[i] = (x[i] - g.spec().lower[i]) / g.spacing(i);
  Mat m = Mat::Zero(d, d);
  for (const auto& [node, w] : g.interpolation_weights(q)) m += w * t.at(node);
  return m;
}

Mat wall_limit_information(const Vec& x) {
  return x[0] <= x[1] ? mixture_information_limit_x1_zero(x[1]) : mixture_information_limit_x2_zero(x[0]);
}

}  // namespace

Mat CovarianceModel::operator()(const Vec& x) const {
  if (x.size() != dimension_) throw Error(ErrorCode::InvalidArgument, "covariance: point dimension mismatch");
  Mat v;
  switch (kind_) {
    case CovarianceKind::Identity:
      v = Mat::Identity(dimension_, dimension_);
      break;
    case CovarianceKind::Constant:
      v = *constant_;
      break;
    case CovarianceKind::Correlation: {
      const double w = 1.0 - x[0] * x[0];
      if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "correlation covariance: |rho| must be < 1");
      v = Mat::Constant(1, 1, w * w);
      break;
    }
    case CovarianceKind::Mixture:
      v = mixture_covariance({x[0], x[1]}, quadrature_).covariance;
      break;
    case CovarianceKind::MixtureWallLimit:
      throw NearSingularError(std::numeric_limits<double>::infinity(),
                              "mixture wall-limit information is singular; only the inverse is available");
    case CovarianceKind::Tabulated:
      v = interpolate_table(*table_, x);
      break;
    case CovarianceKind::Custom:
      v = custom_(x);
      break;
  }
  return scale_ * v;
}

Mat CovarianceModel::inverse(const Vec& x) const {
  switch (kind_) {
    case CovarianceKind::Mixture:
      return mixture_information({x[0], x[1]}, quadrature_, false).information / scale_;
    case CovarianceKind::MixtureWallLimit:
      return wall_limit_information(x) / scale_;
    case CovarianceKind::Correlation: {
      const double w = 1.0 - x[0] * x[0];
      if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "correlation covariance: |rho| must be < 1");
      return Mat::Constant(1, 1, 1.0 / (scale_ * w * w));
    }
    default:
      return small_inverse((*this)(x));
  }
}

Vec CovarianceModel::divergence(const Vec& x) const {
  const int d = dimension_;
  switch (kind_) {
    case CovarianceKind::Identity:
    case CovarianceKind::Constant:
      return Vec::Zero(d);
    case CovarianceKind::Correlation:
      return Vec::Constant(1, scale_ * -4.0 * x[0] * (1.0 - x[0] * x[0]));
    case CovarianceKind::Custom:
      if (custom_divergence_) return scale_ * custom_divergence_(x);
      break;
    default:
      break;
  }
  constexpr double step = 1e-5;
  Vec out = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    const Mat dv = ((*this)(xp) - (*this)(xm)) / (2.0 * step);
    for (int i = 0; i < d; ++i) out[i] += dv(i, j);
  }
  return out;
}

bool CovarianceModel::is_isotropic() const {
  if (kind_ == CovarianceKind::Identity) return true;
  if (kind_ == CovarianceKind::Constant) {
    const Mat& c = *constant_;
    return (c - c(0, 0) * Mat::Identity(dimension_, dimension_)).cwiseAbs().maxCoeff() == 0.0;
  }
  return false;
}

TensorField tabulate(const CovarianceModel& model, const Grid& grid, unsigned threads) {
  if (model.dimension() != grid.dimension()) throw Error(ErrorCode::InvalidArgument, "tabulate: dimension mismatch");
  const int d = grid.dimension();
  std::vector<double> values(grid.size() * d * d);
  parallel_for(grid.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Mat v = model(grid.point(k));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) values[k * d * d + i * d + j] = 0.5 * (v(i, j) + v(j, i));
    }
  });
  return TensorField(grid, std::move(values));
}

double jeffreys_density(const CovarianceModel& model, double x) {
  if (model.dimension() != 1) {
    throw Error(ErrorCode::UnsupportedFamily, "jeffreys_density: only one-dimensional models are supported");
  }
  return 1.0 / std::sqrt(model(Vec::Constant(1, x))(0, 0));
}

double chi_square2_radius(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "confidence level must be in (0, 1)");
  return std::sqrt(-2.0 * std::log1p(-level));
}

std::vector<Ellipse> covariance_ellipses(const CovarianceModel& model, const std::vector<std::array<double, 2>>& thetas,
                                         double n, double level) {
  if (model.dimension() != 2) throw Error(ErrorCode::InvalidArgument, "covariance_ellipses: model must be 2-D");
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "covariance_ellipses: sample size must be positive");
  constexpr int kSegments = 64;
  const double radius = chi_square2_radius(level) / std::sqrt(n);
  std::vector<Ellipse> out;
  for (const auto& t : thetas) {
    Ellipse e{t[0], t[1], {}, false, 0.0};
    Vec x(2);
    x << t[0], t[1];
    Mat v;
    try {
      v = model(x);
      e.condition_number = condition_number(v);
    } catch (const NearSingularError& err) {
      e.near_singular = true;
      e.condition_number = err.condition_number();
      out.push_back(std::move(e));
      continue;
    }
    const Mat root = symmetric_sqrt(v);
    for (int k = 0; k <= kSegments; ++k) {
      const double a = 2.0 * std::numbers::pi * (k % kSegments) / kSegments;
      Vec c(2);
      c << std::cos(a), std::sin(a);
      const Vec y = x + radius * root * c;
      e.vertices.push_back({y[0], y[1]});
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace admpriors
