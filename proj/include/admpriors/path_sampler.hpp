#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "admpriors/covariance.hpp"

namespace admpriors {

struct PathConfig {
  double step = 1e-3;
  double max_time = 1e3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool substep = true;  // step / 10 within sqrt(step tr V) of a wall
  void validate() const;
};

using Drift = std::function<Vec(const Vec&)>;

struct PathPoint {
  double t;
  Vec x;
};

struct SdePath {
  bool exited = false;
  double exit_time = 0.0;
  Vec exit_point;
  double stratonovich = 0.0;  // sum b(midpoint) . dX
  std::size_t steps = 0;
  std::vector<PathPoint> points;  // filled only when recording
};

/// Euler-Maruyama for dX = V^{1/2} dW + 1/2 (b - div V) dt started at x0,
/// stopped at the first step leaving the box (linear interpolation to the
/// crossing) or at max_time.  Path `index` draws from its own stream keyed
/// by (seed, index).
SdePath simulate_sde(const Drift& b, const CovarianceModel& v, const DomainSpec& domain, const Vec& x0,
                     const PathConfig& cfg, std::uint64_t index, bool record = false);

struct PathResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_exited = 0;
  std::size_t n_censored = 0;
  bool censoring_flagged = false;  // more than 1% censored
  double max_exponent = 0.0;       // largest -1/2 integral seen
  double path_sd = 0.0;            // per-path standard deviation of the weighted values
};

/// Mean over exited paths of exp(-1/2 int b o dX) root_p(X(T)).
PathResult feynman_kac_estimate(const Drift& b, const CovarianceModel& v, const DomainSpec& domain,
                                const std::function<double(const Vec&)>& boundary_root_p, const Vec& x0,
                                const PathConfig& cfg);

/// `path_id,t,x1,...,xd` rows.
void write_paths_csv(std::ostream& os, const std::vector<SdePath>& paths);

}  // namespace admpriors
