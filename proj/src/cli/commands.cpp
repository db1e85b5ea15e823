#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "admpriors/attenuation.hpp"
#include "admpriors/error.hpp"
#include "admpriors/io.hpp"
#include "admpriors/mixture.hpp"
#include "admpriors/risk.hpp"
#include "builders.hpp"

namespace admpriors::cli {

using nlohmann::json;

namespace {

const json& section(const RunConfig& cfg, const char* name) {
  static const json empty = json::object();
  return cfg.doc.contains(name) ? cfg.doc[name] : empty;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::Config, msg);
}

std::string with_hash(const RunConfig& cfg, const std::string& body) { return csv_hash_line(cfg.hash) + body; }

void emit(CommandResult& result, const std::filesystem::path& path, const std::string& content) {
  atomic_write(path, content);
  result.outputs.push_back(path);
}

void emit_json(CommandResult& result, const RunConfig& cfg, const std::filesystem::path& path, json j) {
  j["config_hash"] = cfg.hash;
  emit(result, path, j.dump(2) + "\n");
}

double finite_or_nan(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::function<double(const Vec&)> density_of(const PriorFamily& prior) {
  return [prior](const Vec& x) { return evaluate(prior, x); };
}

// ---- risk-map ----

DomainSpec unit_box(int d) { return DomainSpec::box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)); }

}  // namespace

CommandResult run_risk_map(const RunConfig& cfg) {
  require(cfg.doc.contains("domain"), "risk-map: domain is required");
  const DomainSpec domain = build_domain(cfg, {});
  const int d = domain.dimension();
  const Grid grid = build_grid_from(cfg, domain, std::vector<std::size_t>(d, 41));
  const unsigned nthreads = threads(cfg);
  const TensorField v = tabulate(build_covariance(cfg, d, "identity"), grid, nthreads);
  const PriorFamily prior = build_prior(cfg, domain, "uniform");
  const ScalarField p = ScalarField::from_function(grid, density_of(prior));

  const json& r = section(cfg, "risk");
  const std::string route = r.value("route", std::string("prior"));
  const DivergenceScheme scheme = parse_scheme(r.value("scheme", std::string("monotone")));
  const ScalarField risk =
      route == "decision" ? risk_of_decision(decision_of_prior(p), v) : risk_of_prior(p, v, scheme);

  CommandResult result;
  const auto dir = output_dir(cfg);
  std::ostringstream csv;
  write_csv(csv, risk, "risk");
  emit(result, dir / "risk_map.csv", with_hash(cfg, csv.str()));

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.is_interior(k)) continue;
    lo = std::min(lo, risk[k]);
    hi = std::max(hi, risk[k]);
  }
  result.summary = {{"command", "risk-map"}, {"prior", describe(prior)}, {"route", route},
                    {"interior_nodes", grid.interior_count()}, {"min_risk", number(lo)}, {"max_risk", number(hi)}};
  emit_json(result, cfg, dir / "risk_map.json", result.summary);
  return result;
}

// ---- check ----

namespace {

double interval_end(const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw Error(ErrorCode::Config, "check.interval: expected a number, \"inf\" or \"-inf\", got " + s);
}

RadialConfig radial_config(const RunConfig& cfg, const PriorFamily& prior) {
  RadialConfig rc;
  rc.threads = threads(cfg);
  rc.classifier = build_classifier(cfg);
  if (const auto* pr = std::get_if<PowerRadialPrior>(&prior)) {
    // the radial integrals are also sufficient for power priors
    rc.excluded_origin = pr->excluded_origin;
    rc.sufficiency = true;
  }
  const json& chk = section(cfg, "check");
  if (chk.contains("radial")) {
    const json& j = chk["radial"];
    rc.r0 = j.value("r0", rc.r0);
    rc.directions_2d = j.value("directions_2d", rc.directions_2d);
    rc.directions_3d = j.value("directions_3d", rc.directions_3d);
    rc.sufficiency = j.value("sufficiency", rc.sufficiency);
    rc.sphere_tol = j.value("sphere_tol", rc.sphere_tol);
    if (j.contains("sector")) {
      rc.sector_begin = j["sector"][0];
      rc.sector_end = j["sector"][1];
      require(rc.sector_begin < rc.sector_end, "check.radial.sector: begin must be below end");
    }
  }
  return rc;
}

BoundaryConfig boundary_config(const RunConfig& cfg) {
  BoundaryConfig bc;
  bc.threads = threads(cfg);
  bc.classifier = build_classifier(cfg);
  const json& chk = section(cfg, "check");
  if (chk.contains("boundary")) {
    bc.samples_per_face = chk["boundary"].value("samples_per_face", bc.samples_per_face);
    bc.reach = chk["boundary"].value("reach", bc.reach);
  }
  return bc;
}

std::string auto_method(const PriorFamily& prior, const DomainSpec& domain, bool has_domain, int d) {
  if (std::holds_alternative<CorrelationPowerPrior>(prior)) return "one_dimensional";
  if (std::holds_alternative<PowerRadialPrior>(prior) && !has_domain) return "radial";
  if (d == 1) return "one_dimensional";
  if (has_domain) {
    for (int i = 0; i < d; ++i) {
      if (domain.face(i, Side::Lower) == FaceKind::Wall || domain.face(i, Side::Upper) == FaceKind::Wall) {
        return "bounded";
      }
    }
  }
  return "radial";
}

}  // namespace

CommandResult run_check(const RunConfig& cfg) {
  const json& chk = section(cfg, "check");
  const bool has_domain = cfg.doc.contains("domain");
  const json& jp = section(cfg, "prior");
  require(jp.contains("family"), "check: prior.family is required");
  DomainSpec domain = has_domain ? build_domain(cfg, {}) : unit_box(jp.value("dimension", 1));
  const PriorFamily prior = build_prior(cfg, domain, "uniform");
  if (!has_domain && std::holds_alternative<TabulatedPrior>(prior)) {
    domain = std::get<TabulatedPrior>(prior).field.grid().spec();
  }
  const int d = dimension(prior);
  const std::string fallback_model = std::holds_alternative<CorrelationPowerPrior>(prior) ? "correlation" : "identity";
  const CovarianceModel v = build_covariance(cfg, d, fallback_model);
  require(v.dimension() == d, "check: covariance and prior dimensions differ");

  std::string method = chk.value("method", std::string("auto"));
  if (method == "auto") method = auto_method(prior, domain, has_domain, d);

  const ClassifierConfig classifier = build_classifier(cfg);
  double a = has_domain ? domain.lower[0] : -1.0;
  double b = has_domain ? domain.upper[0] : 1.0;
  if (has_domain && d == 1) {
    if (domain.face(0, Side::Lower) == FaceKind::Asymptotic) a = -std::numeric_limits<double>::infinity();
    if (domain.face(0, Side::Upper) == FaceKind::Asymptotic) b = std::numeric_limits<double>::infinity();
  }
  if (chk.contains("interval")) {
    a = interval_end(chk["interval"][0]);
    b = interval_end(chk["interval"][1]);
  }
  require(a < b, "check.interval: lower end must be below upper end");

  AdmissibilityVerdict verdict;
  std::optional<AdmissibilityVerdict> exact;
  if (method == "power_law" || std::holds_alternative<PowerRadialPrior>(prior) ||
      std::holds_alternative<CorrelationPowerPrior>(prior)) {
    exact = classify_power_law(prior);
  }
  if (method == "power_law") {
    verdict = *exact;
  } else if (method == "one_dimensional") {
    require(d == 1, "check: the one-dimensional method needs d = 1");
    const Function1D pv = std::holds_alternative<CorrelationPowerPrior>(prior)
                              ? correlation_product(std::get<CorrelationPowerPrior>(prior).alpha)
                              : product_1d(prior, v);
    verdict = check_1d(pv, a, b, classifier);
  } else if (method == "radial") {
    verdict = check_radial(density_of(prior), v, d, radial_config(cfg, prior));
  } else {
    require(has_domain || std::holds_alternative<TabulatedPrior>(prior), "check: the bounded method needs a domain");
    verdict = check_bounded_boundary(density_of(prior), v, domain, boundary_config(cfg));
  }

  CommandResult result;
  json out = verdict.to_json();
  out["prior"] = describe(prior);
  out["covariance"] = v.name();
  if (exact && method != "power_law") {
    out["exact"] = exact->to_json();
    out["exact_agrees"] = exact->verdict == verdict.verdict;
  }

  if (chk.contains("attenuate") && verdict.verdict != Verdict::Admissible) {
    const double eps = chk["attenuate"]["epsilon"];
    require(has_domain, "check.attenuate: needs a bounded domain");
    const AttenuatedPrior att = attenuate(density_of(prior), v, domain, eps, boundary_config(cfg));
    const AdmissibilityVerdict again =
        d == 1 ? check_1d(attenuated_product_1d(att), domain.lower[0], domain.upper[0], classifier)
               : check_bounded_boundary([&att](const Vec& x) { return att(x); }, v, domain, boundary_config(cfg));
    out["attenuated"] = again.to_json();
    out["attenuated"]["epsilon"] = eps;
  }

  const auto dir = output_dir(cfg);
  emit_json(result, cfg, dir / "verdict.json", out);
  result.summary = {{"command", "check"}, {"verdict", to_string(verdict.verdict)}, {"method", verdict.method}};
  if (exact && method != "power_law") result.summary["exact_agrees"] = out["exact_agrees"];
  if (verdict.verdict == Verdict::Inconclusive) result.exit_code = kExitInconclusive;
  if (out.value("exact_agrees", true) == false) result.exit_code = kExitPostCheckFailed;
  return result;
}

// ---- mixture ----

namespace {

std::vector<std::array<double, 2>> mixture_thetas(const json& m) {
  std::vector<std::array<double, 2>> out;
  if (m.contains("thetas")) {
    for (const auto& t : m["thetas"]) out.push_back({t[0].get<double>(), t[1].get<double>()});
  }
  if (m.contains("theta_grid") || out.empty()) {
    const json g = m.value("theta_grid", json{{"start", 1.0}, {"stop", 9.0}, {"step", 2.0}});
    const double start = g["start"], stop = g["stop"], step = g["step"];
    require(start <= stop, "mixture.theta_grid: start exceeds stop");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        out.push_back({start + static_cast<double>(i) * step, start + static_cast<double>(j) * step});
      }
    }
  }
  return out;
}

}  // namespace

CommandResult run_mixture(const RunConfig& cfg) {
  const json& m = section(cfg, "mixture");
  const CovarianceModel model = build_covariance(cfg, 2, "mixture");
  const auto thetas = mixture_thetas(m);
  const double n = m.value("n", 1000.0);
  const double level = m.value("level", 0.95);

  std::ostringstream info;
  info.precision(17);
  info << "x1,x2,L11,L12,L22,V11,V12,V22,cond,status\n";
  std::size_t flagged = 0;
  for (const auto& t : thetas) {
    Vec x(2);
    x << t[0], t[1];
    Mat l = Mat::Constant(2, 2, std::numeric_limits<double>::quiet_NaN());
    Mat v = l;
    double cond = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
    try {
      v = model(x);
      l = small_inverse(v);
      cond = condition_number(l);
    } catch (const NearSingularError& err) {
      status = "near_singular";
      cond = err.condition_number();
      ++flagged;
      if (model.kind() == CovarianceKind::Mixture) {
        QuadratureConfig q;
        if (section(cfg, "covariance").contains("quadrature")) {
          const json& jq = section(cfg, "covariance")["quadrature"];
          q.half_width = jq.value("half_width", q.half_width);
          q.nodes = jq.value("nodes", q.nodes);
          q.rel_tol = jq.value("rel_tol", q.rel_tol);
        }
        l = mixture_information({t[0], t[1]}, q).information;
      }
    }
    info << t[0] << ',' << t[1] << ',' << l(0, 0) << ',' << l(0, 1) << ',' << l(1, 1) << ',' << v(0, 0) << ','
         << v(0, 1) << ',' << v(1, 1) << ',' << finite_or_nan(cond) << ',' << status << '\n';
  }

  std::ostringstream ell;
  ell.precision(17);
  ell << "theta1,theta2,vertex_index,y1,y2\n";
  for (const auto& e : covariance_ellipses(model, thetas, n, level)) {
    for (std::size_t k = 0; k < e.vertices.size(); ++k) {
      ell << e.theta1 << ',' << e.theta2 << ',' << k << ',' << e.vertices[k][0] << ',' << e.vertices[k][1] << '\n';
    }
  }

  CommandResult result;
  const auto dir = output_dir(cfg);
  emit(result, dir / "information.csv", with_hash(cfg, info.str()));
  emit(result, dir / "ellipses.csv", with_hash(cfg, ell.str()));

  const std::size_t points = m.value("sample_points", 0);
  if (points > 0) {
    const std::uint64_t seed = section(cfg, "paths").value("seed", std::uint64_t{0});
    std::ostringstream s;
    s.precision(17);
    s << "theta1,theta2,index,y,component\n";
    for (const auto& t : thetas) {
      const auto draws = mixture_sample_detailed({t[0], t[1]}, points, seed);
      for (std::size_t k = 0; k < draws.size(); ++k) {
        s << t[0] << ',' << t[1] << ',' << k << ',' << draws[k].y << ',' << (draws[k].second_component ? 1 : 0) << '\n';
      }
    }
    emit(result, dir / "samples.csv", with_hash(cfg, s.str()));
  }

  result.summary = {{"command", "mixture"}, {"covariance", model.name()}, {"thetas", thetas.size()},
                    {"near_singular", flagged}, {"n", n}, {"level", level}};
  emit_json(result, cfg, dir / "summary.json", result.summary);
  return result;
}

// ---- beat-uniform ----

CommandResult run_beat_uniform(const RunConfig& cfg) {
  const DomainSpec domain = build_domain(cfg, DomainSpec::box({0.1, 0.1}, {10.0, 10.0}, FaceKind::Asymptotic));
  const int d = domain.dimension();
  const Grid grid = build_grid_from(cfg, domain, std::vector<std::size_t>(d, 100));
  const unsigned nthreads = threads(cfg);
  const TensorField v = tabulate(build_covariance(cfg, d, d == 2 ? "mixture" : "identity"), grid, nthreads);
  const PriorFamily boundary_prior = build_prior(cfg, domain, "beat_uniform_boundary");
  const ScalarField boundary = ScalarField::from_function(grid, density_of(boundary_prior));
  const SolverConfig solver = build_solver(cfg);

  const BrownSolution sol = solve_brown_equation(v, boundary, solver);
  // the residual certificate is measured in the max norm whatever norm stopped the sweeps
  const double brown_tol =
      solver.residual_norm == ResidualNorm::Max ? solver.residual_tol : std::numeric_limits<double>::infinity();
  const GainReport gain = risk_gain_vs_uniform(sol.p, v, brown_tol, solver.scheme);

  const json& bu = section(cfg, "beat_uniform");
  const double band_width = bu.value("band_width", 1.0);
  const double near_wall = bu.value("near_wall", 0.2);
  const double min_gain_floor = bu.value("min_gain", -1e-8);
  const bool require_band = bu.value("require_band_excess", true);

  std::ostringstream g;
  g.precision(17);
  for (int i = 0; i < d; ++i) g << 'x' << (i + 1) << ',';
  g << "gain,closed_form_p,closed_form_p2,near_wall\n";
  double min_gain = std::numeric_limits<double>::infinity();
  double band_sum = 0.0, interior_sum = 0.0;
  std::size_t band_n = 0, interior_n = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.is_interior(k)) continue;
    const Vec x = grid.point(k);
    double coordmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) coordmin = std::min(coordmin, x[i]);
    const double value = gain.gain[k];
    min_gain = std::min(min_gain, value);
    if (coordmin <= band_width) {
      band_sum += value;
      ++band_n;
    } else {
      interior_sum += value;
      ++interior_n;
    }
    for (int i = 0; i < d; ++i) g << x[i] << ',';
    g << value << ',' << gain.closed_form_p[k] << ',' << gain.closed_form_p2[k] << ',' << (coordmin <= near_wall ? 1 : 0)
      << '\n';
  }
  const double band_mean = band_n ? band_sum / static_cast<double>(band_n) : 0.0;
  const double interior_mean = interior_n ? interior_sum / static_cast<double>(interior_n) : 0.0;

  // mean solution on the lower faces against the upper faces
  double lower_sum = 0.0, upper_sum = 0.0;
  std::size_t lower_n = 0, upper_n = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto idx = grid.multi_index(k);
    for (int i = 0; i < d; ++i) {
      if (idx[i] == 1) {
        lower_sum += sol.p[k];
        ++lower_n;
      }
      if (idx[i] + 2 == grid.nodes(i)) {
        upper_sum += sol.p[k];
        ++upper_n;
      }
    }
  }

  CommandResult result;
  const auto dir = output_dir(cfg);
  std::ostringstream prior_csv;
  write_csv(prior_csv, sol.p, "p");
  emit(result, dir / "prior.csv", with_hash(cfg, prior_csv.str()));
  emit(result, dir / "gain.csv", with_hash(cfg, g.str()));
  std::ostringstream hist;
  hist.precision(17);
  hist << "iter,residual\n";
  for (const auto& [it, res] : sol.history) hist << it << ',' << res << '\n';
  emit(result, dir / "residual_history.csv", with_hash(cfg, hist.str()));

  const bool gain_ok = min_gain >= min_gain_floor;
  const bool band_ok = !require_band || band_mean > interior_mean;
  result.summary = {{"command", "beat-uniform"},
                    {"boundary_prior", describe(boundary_prior)},
                    {"iterations", sol.iterations},
                    {"residual", sol.residual},
                    {"residual_tol", solver.residual_tol},
                    {"brown_residual", gain.brown_residual},
                    {"min_gain", min_gain},
                    {"min_gain_floor", min_gain_floor},
                    {"band_width", band_width},
                    {"band_mean_gain", band_mean},
                    {"interior_mean_gain", interior_mean},
                    {"discrepancy_p", gain.discrepancy_p},
                    {"discrepancy_p2", gain.discrepancy_p2},
                    {"mean_p_next_to_lower_faces", lower_n ? lower_sum / static_cast<double>(lower_n) : 0.0},
                    {"mean_p_next_to_upper_faces", upper_n ? upper_sum / static_cast<double>(upper_n) : 0.0},
                    {"post_checks", {{"min_gain", gain_ok}, {"band_excess", band_ok}}}};
  emit_json(result, cfg, dir / "summary.json", result.summary);
  if (!gain_ok || !band_ok) result.exit_code = kExitPostCheckFailed;
  return result;
}

// ---- fk ----

namespace {

Drift build_drift(const json& j, const json& prior_doc, const PriorFamily& prior, int d) {
  const std::string kind = j.value("kind", std::string("zero"));
  if (kind == "zero") return [d](const Vec&) { return Vec::Zero(d).eval(); };
  if (kind == "constant") {
    require(j.contains("value") && static_cast<int>(j["value"].size()) == d, "fk.drift: constant needs d values");
    Vec c(d);
    for (int i = 0; i < d; ++i) c[i] = j["value"][i];
    return [c](const Vec&) { return c; };
  }
  if (prior_doc.value("family", std::string()) == "exp_linear") {
    const auto coef = prior_doc["coefficients"].get<std::vector<double>>();
    Vec c(d);
    for (int i = 0; i < d; ++i) c[i] = coef[i];
    return [c](const Vec&) { return c; };
  }
  if (prior_doc.value("family", std::string()) == "gaussian") return [](const Vec& x) { return (-2.0 * x).eval(); };
  // central differences of log p
  return [prior, d](const Vec& x) {
    Vec out(d);
    for (int i = 0; i < d; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
      Vec up = x, dn = x;
      up[i] += h;
      dn[i] -= h;
      out[i] = (std::log(evaluate(prior, up)) - std::log(evaluate(prior, dn))) / (2.0 * h);
    }
    return out;
  };
}

std::function<double(const Vec&)> build_boundary(const json& j, const PriorFamily& prior, const DomainSpec& domain) {
  const std::string kind = j.value("kind", std::string("sqrt_prior"));
  if (kind == "constant") {
    const double c = j.value("value", 1.0);
    return [c](const Vec&) { return c; };
  }
  if (kind == "faces") {
    const int d = domain.dimension();
    require(j.contains("values") && static_cast<int>(j["values"].size()) == 2 * d, "fk.boundary: faces needs 2*d values");
    const auto values = j["values"].get<std::vector<double>>();
    return [values, domain, d](const Vec& x) {
      std::size_t best = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (int i = 0; i < d; ++i) {
        const double lo = std::abs(x[i] - domain.lower[i]);
        const double hi = std::abs(x[i] - domain.upper[i]);
        if (lo < dist) dist = lo, best = 2 * i;
        if (hi < dist) dist = hi, best = 2 * i + 1;
      }
      return values[best];
    };
  }
  return [prior](const Vec& x) { return std::sqrt(evaluate(prior, x)); };
}

}  // namespace

CommandResult run_fk(const RunConfig& cfg) {
  require(cfg.doc.contains("domain"), "fk: domain is required");
  const json& f = section(cfg, "fk");
  require(f.contains("x0"), "fk: fk.x0 is required");
  const DomainSpec domain = build_domain(cfg, {});
  const int d = domain.dimension();
  const CovarianceModel v = build_covariance(cfg, d, "identity");
  const PriorFamily prior = build_prior(cfg, domain, "uniform");
  require(dimension(prior) == d, "fk: prior and domain dimensions differ");
  const auto x0v = f["x0"].get<std::vector<double>>();
  require(static_cast<int>(x0v.size()) == d, "fk.x0: needs one coordinate per axis");
  Vec x0(d);
  for (int i = 0; i < d; ++i) x0[i] = x0v[i];

  const Drift b = build_drift(f.value("drift", json{{"kind", "zero"}}), section(cfg, "prior"), prior, d);
  const auto root = build_boundary(f.value("boundary", json{{"kind", "sqrt_prior"}}), prior, domain);
  const PathConfig paths = build_paths(cfg);
  const PathResult r = feynman_kac_estimate(b, v, domain, root, x0, paths);

  CommandResult result;
  const auto dir = output_dir(cfg);
  const std::size_t dump = f.value("dump_paths", 0);
  if (dump > 0) {
    std::vector<SdePath> recorded;
    for (std::size_t i = 0; i < dump; ++i) recorded.push_back(simulate_sde(b, v, domain, x0, paths, i, true));
    std::ostringstream os;
    write_paths_csv(os, recorded);
    emit(result, dir / "paths.csv", with_hash(cfg, os.str()));
  }
  result.summary = {{"command", "fk"},
                    {"estimate", r.estimate},
                    {"std_error", r.std_error},
                    {"n_exited", r.n_exited},
                    {"n_censored", r.n_censored},
                    {"censoring_flagged", r.censoring_flagged},
                    {"max_exponent", r.max_exponent},
                    {"path_sd", r.path_sd},
                    {"seed", paths.seed},
                    {"n_paths", paths.n_paths},
                    {"step", paths.step}};
  emit_json(result, cfg, dir / "estimate.json", result.summary);
  return result;
}

}  // namespace admpriors::cli
