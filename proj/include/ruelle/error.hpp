#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ruelle {

enum class ErrorCode {
  index_out_of_family,
  domain,
  unbounded_distortion,
  summability,
  non_convergence,
  irreducibility_failure,
  theta_unknown,
  no_root_in_range,
  budget_exceeded,
  invalid_argument,
  config,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Power iteration that ran out of steps. Carries the last bracket; no value is invented.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double lower, double upper, std::size_t iterations)
      : Error(ErrorCode::non_convergence, what), lower_(lower), upper_(upper), iterations_(iterations) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double lower_;
  double upper_;
  std::size_t iterations_;
};

/// A nonpositive node in the Perron eigenfunction.
class IrreducibilityError : public Error {
 public:
  IrreducibilityError(const std::string& what, std::size_t node, double position, double value)
      : Error(ErrorCode::irreducibility_failure, what), node_(node), position_(position), value_(value) {}

  std::size_t node() const noexcept { return node_; }
  double position() const noexcept { return position_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t node_;
  double position_;
  double value_;
};

/// The root hypothesis failed; psi values observed at the probe exponents are attached.
class NoRootError : public Error {
 public:
  NoRootError(const std::string& what, std::vector<std::pair<double, double>> psi_samples)
      : Error(ErrorCode::no_root_in_range, what), psi_samples_(std::move(psi_samples)) {}

  const std::vector<std::pair<double, double>>& psi_samples() const noexcept { return psi_samples_; }

 private:
  std::vector<std::pair<double, double>> psi_samples_;
};

}  // namespace ruelle
