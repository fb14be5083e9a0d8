#pragma once

#include <stdexcept>
#include <string>

namespace schrocon {

/// Bad input: violates a documented precondition. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not deliver a trustworthy result.
/// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  /// Short machine-readable tag, e.g. "non_convergence".
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, int iterations, double residual)
      : NumericalError("non_convergence", what),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// No finite resolvent constant exists at this spectral parameter.
class Infeasible : public NumericalError {
 public:
  Infeasible(const std::string& what, double lambda)
      : NumericalError("infeasible", what), lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

class IllConditioned : public NumericalError {
 public:
  IllConditioned(const std::string& what, double lambda_min)
      : NumericalError("ill_conditioned", what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

/// Picard iteration for the nonlinear control left its contraction regime.
class Divergence : public NumericalError {
 public:
  Divergence(const std::string& what, double last_ratio)
      : NumericalError("divergence", what), last_ratio_(last_ratio) {}
  double last_ratio() const noexcept { return last_ratio_; }

 private:
  double last_ratio_;
};

class StabilizationStall : public NumericalError {
 public:
  StabilizationStall(const std::string& what, double gamma)
      : NumericalError("stabilization_stall", what), gamma_(gamma) {}
  double gamma() const noexcept { return gamma_; }

 private:
  double gamma_;
};

}  // namespace schrocon
