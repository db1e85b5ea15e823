#pragma once

#include <functional>

#include "admpriors/brown_solver.hpp"
#include "admpriors/cli.hpp"
#include "admpriors/covariance.hpp"
#include "admpriors/integral_classifier.hpp"
#include "admpriors/path_sampler.hpp"
#include "admpriors/prior.hpp"

namespace admpriors::cli {

DomainSpec build_domain(const RunConfig& cfg, const DomainSpec& fallback);
Grid build_grid_from(const RunConfig& cfg, const DomainSpec& domain, std::vector<std::size_t> fallback_nodes);
CovarianceModel build_covariance(const RunConfig& cfg, int d, const std::string& fallback_model);
PriorFamily build_prior(const RunConfig& cfg, const DomainSpec& domain, const std::string& fallback_family);
SolverConfig build_solver(const RunConfig& cfg);
PathConfig build_paths(const RunConfig& cfg);
ClassifierConfig build_classifier(const RunConfig& cfg);
unsigned threads(const RunConfig& cfg);
std::filesystem::path output_dir(const RunConfig& cfg);
DivergenceScheme parse_scheme(const std::string& s);

}  // namespace admpriors::cli
