#include "admpriors/linalg.hpp"

#include <cmath>
#include <limits>

#include "admpriors/error.hpp"

namespace admpriors {

double small_determinant(const Mat& a) {
  switch (a.rows()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      throw Error(ErrorCode::InvalidArgument, "small_determinant: dimension must be 1..3");
  }
}

Mat small_inverse(const Mat& a) {
  const auto d = a.rows();
  const double det = small_determinant(a);
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error(ErrorCode::NearSingular, "small_inverse: singular matrix");
  }
  Mat inv(d, d);
  if (d == 1) {
    inv(0, 0) = 1.0 / a(0, 0);
  } else if (d == 2) {
    inv(0, 0) = a(1, 1) / det;
    inv(0, 1) = -a(0, 1) / det;
    inv(1, 0) = -a(1, 0) / det;
    inv(1, 1) = a(0, 0) / det;
  } else {
    inv(0, 0) = (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) / det;
    inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) / det;
    inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) / det;
    inv(1, 0) = (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) / det;
    inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) / det;
    inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) / det;
    inv(2, 0) = (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) / det;
    inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) / det;
    inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) / det;
  }
  return inv;
}

double condition_number(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  const auto ev = es.eigenvalues().cwiseAbs();
  const double lo = ev.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / lo;
}

Mat symmetric_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

bool is_positive_definite(const Mat& a) {
  const auto d = a.rows();
  for (Eigen::Index k = 1; k <= d; ++k) {
    Mat lead = a.topLeftCorner(k, k);
    if (!(small_determinant(lead) > 0.0)) return false;
  }
  return true;
}

}  // namespace admpriors
