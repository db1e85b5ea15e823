#pragma once

#include <Eigen/Dense>

namespace admpriors {

// Fixed-capacity (d <= 3) dense types; no heap allocation per node.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Closed-form inverse of a 1x1, 2x2 or 3x3 matrix (cofactor expansion).
Mat small_inverse(const Mat& a);

double small_determinant(const Mat& a);

/// Ratio of largest to smallest eigenvalue magnitude of a symmetric matrix.
double condition_number(const Mat& a);

/// Symmetric positive semi-definite square root.
Mat symmetric_sqrt(const Mat& a);

/// Leading principal minors all positive (symmetric input assumed).
bool is_positive_definite(const Mat& a);

}  // namespace admpriors
