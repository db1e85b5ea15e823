#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "admpriors/linalg.hpp"

namespace admpriors {

/// Location parameter (x1, x2) of the two-component normal mixture.
struct MixtureParams {
  double x1;
  double x2;
  void validate() const;
  double q() const { return x1 / (x1 + x2); }
};

struct QuadratureConfig {
  double half_width = 10.0;  // window beyond the component means
  std::size_t nodes = 2000;  // total Gauss-Legendre nodes
  double rel_tol = 1e-8;     // node-doubling agreement
  void validate() const;
};

double normal_density(double z);

double mixture_density(double y, const MixtureParams& theta);

struct Scores {
  double l1;
  double l2;
};

Scores mixture_scores(double y, const MixtureParams& theta);

struct InformationResult {
  Mat information;            // 2x2
  double achieved_tolerance;  // relative change under node doubling
};

/// Expected score outer product over the mixture.  With check=true the
/// integral is repeated with doubled nodes and QuadratureNonConvergence is
/// thrown when the two disagree by more than rel_tol.
InformationResult mixture_information(const MixtureParams& theta, const QuadratureConfig& q = {}, bool check = true);

struct CovarianceResult {
  Mat covariance;
  Mat information;
  double condition_number;
};

/// Inverse information.  Throws NearSingularError when cond(L) >= 1e12 or
/// the point lies within 1e-2 of a wall.
CovarianceResult mixture_covariance(const MixtureParams& theta, const QuadratureConfig& q = {});

constexpr double kNearSingularCondition = 1e12;
constexpr double kNearWallBand = 1e-2;

/// Limits of the information matrix: x1 -> 0 at fixed x2, x2 -> 0 at fixed
/// x1, and r -> infinity along direction (s1, s2).
Mat mixture_information_limit_x1_zero(double x2);
Mat mixture_information_limit_x2_zero(double x1);
Mat mixture_information_limit_radial(double s1, double s2);

struct MixtureDraw {
  double y;
  bool second_component;  // B = 1
};

/// Deterministic draws: Y = Z - x1 with probability 1-q, Y = Z + x2 with
/// probability q.  Draws are generated in fixed blocks keyed by (seed, block)
/// so any parallel split reproduces the serial sequence.
std::vector<MixtureDraw> mixture_sample_detailed(const MixtureParams& theta, std::size_t n, std::uint64_t seed);
std::vector<double> mixture_sample(const MixtureParams& theta, std::size_t n, std::uint64_t seed);

double mixture_mean(const MixtureParams& theta);

}  // namespace admpriors
