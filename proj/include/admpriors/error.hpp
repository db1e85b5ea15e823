#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace admpriors {

enum class ErrorCode {
  InvalidArgument,
  NearSingular,
  NonPositive,
  NonConvergence,
  QuadratureNonConvergence,
  UnsupportedFamily,
  EigenvalueSign,
  MatchingTolerance,
  AllPathsCensored,
  WeightOverflow,
  BrownResidual,
  Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Covariance inversion refused; carries the information-matrix condition number.
class NearSingularError : public Error {
 public:
  NearSingularError(double condition_number, const std::string& what)
      : Error(ErrorCode::NearSingular, what), condition_number_(condition_number) {}
  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(ErrorCode code, double achieved, std::size_t iterations, const std::string& what)
      : Error(code, what), achieved_(achieved), iterations_(iterations) {}
  double achieved() const noexcept { return achieved_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double achieved_;
  std::size_t iterations_;
};

}  // namespace admpriors
