#include "admpriors/path_sampler.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "admpriors/error.hpp"
#include "admpriors/parallel.hpp"

namespace admpriors {

void PathConfig::validate() const {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "path step must be positive");
  if (!(max_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "path max_time must be positive");
  if (n_paths < 1) throw Error(ErrorCode::InvalidArgument, "n_paths must be >= 1");
}

namespace {

double wall_distance(const DomainSpec& d, const Vec& x) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d.dimension(); ++i) m = std::min({m, x[i] - d.lower[i], d.upper[i] - x[i]});
  return m;
}

Mat root_of(const CovarianceModel& v, const Vec& x) {
  const Mat m = v(x);
  if (!is_positive_definite(m)) throw Error(ErrorCode::NonPositive, "simulate_sde: V not positive definite on the path");
  if (m.rows() == 1) return Mat::Constant(1, 1, std::sqrt(m(0, 0)));
  return symmetric_sqrt(m);
}

}  // namespace

SdePath simulate_sde(const Drift& b, const CovarianceModel& v, const DomainSpec& domain, const Vec& x0,
                     const PathConfig& cfg, std::uint64_t index, bool record) {
  cfg.validate();
  const int d = domain.dimension();
  if (x0.size() != d || !domain.contains(x0)) throw Error(ErrorCode::InvalidArgument, "simulate_sde: x0 must be interior");
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  const bool constant_v = v.kind() == CovarianceKind::Identity || v.kind() == CovarianceKind::Constant;
  const Mat fixed_root = constant_v ? root_of(v, x0) : Mat();
  const Vec zero = Vec::Zero(d);

  SdePath path;
  Vec x = x0;
  double t = 0.0;
  if (record) path.points.push_back({t, x});
  Vec z(d);
  while (t < cfg.max_time) {
    const Mat root = constant_v ? fixed_root : root_of(v, x);
    double h = cfg.step;
    if (cfg.substep) {
      const double trace = (root * root).trace();
      if (wall_distance(domain, x) < std::sqrt(cfg.step * trace)) h = cfg.step / 10.0;
    }
    for (int i = 0; i < d; ++i) z[i] = normal(engine);
    const Vec drift = 0.5 * (b(x) - (constant_v ? zero : v.divergence(x)));
    Vec dx = std::sqrt(h) * (root * z) + h * drift;
    Vec next = x + dx;
    ++path.steps;
    if (!domain.contains(next)) {
      double tau = 1.0;
      int hit_axis = -1;
      double hit_value = 0.0;
      for (int i = 0; i < d; ++i) {
        if (next[i] <= domain.lower[i]) {
          const double f = (domain.lower[i] - x[i]) / dx[i];
          if (f < tau) { tau = f; hit_axis = i; hit_value = domain.lower[i]; }
        } else if (next[i] >= domain.upper[i]) {
          const double f = (domain.upper[i] - x[i]) / dx[i];
          if (f < tau) { tau = f; hit_axis = i; hit_value = domain.upper[i]; }
        }
      }
      next = x + tau * dx;
      if (hit_axis >= 0) next[hit_axis] = hit_value;
      dx = next - x;
      path.stratonovich += b(0.5 * (x + next)).dot(dx);
      path.exited = true;
      path.exit_time = t + tau * h;
      path.exit_point = next;
      if (record) path.points.push_back({path.exit_time, next});
      return path;
    }
    path.stratonovich += b(0.5 * (x + next)).dot(dx);
    x = next;
    t += h;
    if (record) path.points.push_back({t, x});
  }
  path.exit_time = t;
  path.exit_point = x;
  return path;
}

PathResult feynman_kac_estimate(const Drift& b, const CovarianceModel& v, const DomainSpec& domain,
                                const std::function<double(const Vec&)>& boundary_root_p, const Vec& x0,
                                const PathConfig& cfg) {
  cfg.validate();
  if (!domain.all_walls()) throw Error(ErrorCode::InvalidArgument, "feynman_kac_estimate: domain must be bounded by walls");
  struct Outcome {
    bool exited;
    double exponent;
    double value;
  };
  std::vector<Outcome> outcomes(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SdePath path = simulate_sde(b, v, domain, x0, cfg, i);
      Outcome o{path.exited, -0.5 * path.stratonovich, 0.0};
      if (o.exited) o.value = std::exp(o.exponent) * boundary_root_p(path.exit_point);
      outcomes[i] = o;
    }
  });

  PathResult r;
  r.max_exponent = -std::numeric_limits<double>::infinity();
  // Neumaier summation: in the gradient case the per-path values agree to an ulp,
  // and a naive sum over many paths would bias the mean by far more than that
  double sum = 0.0, carry = 0.0;
  for (const auto& o : outcomes) {
    if (!o.exited) {
      ++r.n_censored;
      continue;
    }
    ++r.n_exited;
    r.max_exponent = std::max(r.max_exponent, o.exponent);
    const double t = sum + o.value;
    carry += std::abs(sum) >= std::abs(o.value) ? (sum - t) + o.value : (o.value - t) + sum;
    sum = t;
  }
  sum += carry;
  if (r.n_exited == 0) throw Error(ErrorCode::AllPathsCensored, "feynman_kac_estimate: every path was censored");
  if (r.max_exponent > std::log(std::numeric_limits<double>::max())) {
    throw NonConvergenceError(ErrorCode::WeightOverflow, r.max_exponent, cfg.n_paths,
                              "feynman_kac_estimate: path weight overflow, max exponent " + std::to_string(r.max_exponent));
  }
  r.estimate = sum / static_cast<double>(r.n_exited);
  double ss = 0.0;
  for (const auto& o : outcomes) {
    if (o.exited) ss += (o.value - r.estimate) * (o.value - r.estimate);
  }
  r.path_sd = r.n_exited > 1 ? std::sqrt(ss / static_cast<double>(r.n_exited - 1)) : 0.0;
  r.std_error = r.path_sd / std::sqrt(static_cast<double>(r.n_exited));
  r.censoring_flagged = static_cast<double>(r.n_censored) > 0.01 * static_cast<double>(cfg.n_paths);
  return r;
}

void write_paths_csv(std::ostream& os, const std::vector<SdePath>& paths) {
  const auto old = os.precision(17);
  int d = 0;
  for (const auto& p : paths)
    if (!p.points.empty()) d = static_cast<int>(p.points.front().x.size());
  os << "path_id,t";
  for (int i = 0; i < d; ++i) os << ",x" << (i + 1);
  os << '\n';
  for (std::size_t id = 0; id < paths.size(); ++id) {
    for (const auto& pt : paths[id].points) {
      os << id << ',' << pt.t;
      for (int i = 0; i < d; ++i) os << ',' << pt.x[i];
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace admpriors
