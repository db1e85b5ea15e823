#pragma once

#include <functional>
#include <string>
#include <vector>

namespace admpriors {

enum class Divergence { Divergent, Convergent, Ambiguous };
const char* to_string(Divergence d);

/// Dyadic-shell classification of a positive improper integral.  Shell k
/// covers a factor-2 range of the integration variable; for an integrand
/// behaving like a power t^beta the shell contributions scale as
/// 2^{k * exponent} with exponent = -(beta + 1) towards a finite endpoint
/// and beta + 1 towards infinity, so exponent >= 0 means divergence in both
/// cases.
struct ClassifierConfig {
  int shells = 30;
  int fit_shells = 8;
  double divergent_exponent = -1e-4;   // exponent >= this: divergent
  double convergent_exponent = -5e-4;  // exponent <= this: convergent
};

struct IntegralClassification {
  Divergence kind = Divergence::Ambiguous;
  double exponent = 0.0;
  std::vector<double> cutoffs;   // epsilon_k or R_k
  std::vector<double> integrals; // integral up to cutoff k
  double limit = 0.0;            // extrapolated value; +inf when divergent
};

/// int_0^reach g(u) du with g singular (possibly) at u = 0.  g receives the
/// distance from the endpoint.
IntegralClassification classify_endpoint_integral(const std::function<double(double)>& g, double reach,
                                                  const ClassifierConfig& cfg = {});

/// int_start^inf g(r) dr.
IntegralClassification classify_tail_integral(const std::function<double(double)>& g, double start,
                                              const ClassifierConfig& cfg = {});

/// Classification from precomputed positive shell increments.
IntegralClassification classify_increments(std::vector<double> cutoffs, const std::vector<double>& increments,
                                           const ClassifierConfig& cfg = {});

/// int_a^b g by 20-point Gauss-Legendre in log t (0 < a < b).
double log_shell_integral(const std::function<double(double)>& g, double a, double b);

}  // namespace admpriors
