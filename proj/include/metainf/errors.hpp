#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace metainf {

// Argument outside the mathematical domain of an operation (q outside (0,1),
// infeasible truncation, out-of-range arm index, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A divergence or estimate would divide by a zero reference probability.
class SingularInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameter bundle cannot satisfy the identification assumption.
class InfeasibleParamsError : public std::domain_error {
 public:
  InfeasibleParamsError(const std::string& what, double minimal_T)
      : std::domain_error(what), minimal_T_(minimal_T) {}
  double minimal_T() const noexcept { return minimal_T_; }

 private:
  double minimal_T_;
};

// Iterative solver or quadrature failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

  // Episode/round where the failure happened, when known.
  std::optional<std::size_t> episode;
  std::optional<std::size_t> round;

 private:
  double residual_;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace metainf
