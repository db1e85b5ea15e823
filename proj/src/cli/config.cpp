#include <fstream>
#include <sstream>

#include "admpriors/error.hpp"
#include "admpriors/io.hpp"
#include "admpriors/parallel.hpp"
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

}  // namespace

RunConfig load_config(const std::string& text, const std::filesystem::path& base, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  const auto errors = validate(doc, run_config_schema());
  if (!errors.empty()) {
    std::string msg = "config violates the schema:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorCode::Config, msg);
  }
  if (overrides.out) doc["output"]["dir"] = *overrides.out;
  if (overrides.seed) doc["paths"]["seed"] = *overrides.seed;
  if (overrides.threads) doc["threads"] = *overrides.threads;
  if (overrides.residual_tol) doc["solver"]["residual_tol"] = *overrides.residual_tol;
  // overrides go through the same schema
  const auto late = validate(doc, run_config_schema());
  if (!late.empty()) throw Error(ErrorCode::Config, "override violates the schema: " + late.front());
  return {doc, base, config_hash(doc.dump())};
}

RunConfig load_config_file(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), path.parent_path(), overrides);
}

DomainSpec build_domain(const RunConfig& cfg, const DomainSpec& fallback) {
  const json& d = section(cfg, "domain");
  if (d.empty()) return fallback;
  DomainSpec spec;
  spec.lower = d["lower"].get<std::vector<double>>();
  spec.upper = d["upper"].get<std::vector<double>>();
  require(spec.lower.size() == spec.upper.size(), "domain: lower and upper differ in length");
  const std::size_t faces = 2 * spec.lower.size();
  if (d.contains("faces")) {
    require(d["faces"].size() == faces, "domain: faces needs 2*d entries");
    for (const auto& f : d["faces"]) spec.face_kinds.push_back(f == "wall" ? FaceKind::Wall : FaceKind::Asymptotic);
  } else {
    spec.face_kinds.assign(faces, FaceKind::Wall);
  }
  spec.excluded_origin = d.value("excluded_origin", false);
  spec.validate();
  return spec;
}

Grid build_grid_from(const RunConfig& cfg, const DomainSpec& domain, std::vector<std::size_t> fallback_nodes) {
  const json& g = section(cfg, "grid");
  std::vector<std::size_t> nodes = g.empty() ? std::move(fallback_nodes) : g["nodes"].get<std::vector<std::size_t>>();
  if (nodes.size() == 1 && domain.dimension() > 1) nodes.assign(domain.dimension(), nodes.front());
  require(static_cast<int>(nodes.size()) == domain.dimension(), "grid: nodes must have one entry per axis");
  return build_grid(domain, nodes);
}

CovarianceModel build_covariance(const RunConfig& cfg, int d, const std::string& fallback_model) {
  const json& c = section(cfg, "covariance");
  const std::string model = c.value("model", fallback_model);
  if (model == "identity") return CovarianceModel::identity(d);
  if (model == "constant") {
    require(c.contains("matrix"), "covariance: constant model needs a matrix");
    const auto rows = c["matrix"].get<std::vector<std::vector<double>>>();
    require(static_cast<int>(rows.size()) == d, "covariance: matrix size does not match the dimension");
    Mat m(d, d);
    for (int i = 0; i < d; ++i) {
      require(static_cast<int>(rows[i].size()) == d, "covariance: matrix must be square");
      for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
    }
    return CovarianceModel::constant(m);
  }
  if (model == "correlation") {
    require(d == 1, "covariance: the correlation model is one-dimensional");
    return CovarianceModel::correlation();
  }
  require(d == 2, "covariance: mixture models are two-dimensional");
  if (model == "mixture_wall_limit") return CovarianceModel::mixture_wall_limit();
  QuadratureConfig q;
  if (c.contains("quadrature")) {
    const json& jq = c["quadrature"];
    q.half_width = jq.value("half_width", q.half_width);
    q.nodes = jq.value("nodes", q.nodes);
    q.rel_tol = jq.value("rel_tol", q.rel_tol);
  }
  return CovarianceModel::mixture(q);
}

PriorFamily build_prior(const RunConfig& cfg, const DomainSpec& domain, const std::string& fallback_family) {
  const json& p = section(cfg, "prior");
  const std::string family = p.value("family", fallback_family);
  const int d = p.value("dimension", domain.dimension());
  auto alpha = [&]() {
    require(p.contains("alpha"), "prior: family " + family + " needs alpha");
    return p["alpha"].get<double>();
  };
  if (family == "uniform") return UniformPrior{d};
  if (family == "power_radial") return PowerRadialPrior{alpha(), d, p.value("excluded_origin", true)};
  if (family == "correlation_power") return CorrelationPowerPrior{alpha()};
  if (family == "distance_to_boundary") return DistanceToBoundaryPrior{domain};
  if (family == "uniform_in_power_radius") return uniform_in_power_radius(alpha(), d);
  if (family == "gaussian") return priors::gaussian(d);
  if (family == "exp_linear") {
    require(p.contains("coefficients"), "prior: exp_linear needs coefficients");
    return priors::exp_linear(p["coefficients"].get<std::vector<double>>());
  }
  if (family == "mixture_reference") return priors::mixture_reference();
  if (family == "beat_uniform_boundary") return priors::beat_uniform_boundary();
  require(family == "tabulated" && p.contains("path"), "prior: tabulated family needs a path");
  std::filesystem::path path = p["path"].get<std::string>();
  if (path.is_relative()) path = cfg.base / path;
  std::ifstream in(path);
  require(static_cast<bool>(in), "prior: cannot read " + path.string());
  return TabulatedPrior{read_scalar_csv(in, domain.face_kinds)};
}

DivergenceScheme parse_scheme(const std::string& s) {
  return s == "nested_central" ? DivergenceScheme::NestedCentral : DivergenceScheme::Monotone;
}

SolverConfig build_solver(const RunConfig& cfg) {
  const json& s = section(cfg, "solver");
  SolverConfig c;
  c.omega = s.value("omega", c.omega);
  c.max_iters = s.value("max_iters", c.max_iters);
  c.residual_tol = s.value("residual_tol", c.residual_tol);
  c.residual_norm = s.value("residual_norm", std::string("max")) == "rms" ? ResidualNorm::Rms : ResidualNorm::Max;
  c.scheme = parse_scheme(s.value("scheme", std::string("monotone")));
  c.check_every = s.value("check_every", c.check_every);
  c.threads = threads(cfg);
  c.validate();
  return c;
}

PathConfig build_paths(const RunConfig& cfg) {
  const json& s = section(cfg, "paths");
  PathConfig c;
  c.step = s.value("step", c.step);
  c.max_time = s.value("max_time", c.max_time);
  c.n_paths = s.value("n_paths", c.n_paths);
  c.seed = s.value("seed", c.seed);
  c.substep = s.value("substep", c.substep);
  c.threads = threads(cfg);
  c.validate();
  return c;
}

ClassifierConfig build_classifier(const RunConfig& cfg) {
  ClassifierConfig c;
  const json& chk = section(cfg, "check");
  if (!chk.contains("classifier")) return c;
  const json& k = chk["classifier"];
  c.shells = k.value("shells", c.shells);
  c.fit_shells = k.value("fit_shells", c.fit_shells);
  c.divergent_exponent = k.value("divergent_exponent", c.divergent_exponent);
  c.convergent_exponent = k.value("convergent_exponent", c.convergent_exponent);
  require(c.fit_shells <= c.shells, "check.classifier: fit_shells exceeds shells");
  require(c.convergent_exponent < c.divergent_exponent, "check.classifier: convergent exponent must be below divergent");
  return c;
}

unsigned threads(const RunConfig& cfg) { return resolve_threads(cfg.doc.value("threads", 0)); }

std::filesystem::path output_dir(const RunConfig& cfg) {
  const json& o = section(cfg, "output");
  std::filesystem::path dir = o.value("dir", std::string("out"));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace admpriors::cli
