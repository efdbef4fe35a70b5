#pragma once

#include <stdexcept>
#include <string>

namespace purcell {

/// A precondition of a public operation was violated by the caller.
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its requested accuracy.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An integrand produced NaN or infinity.
class NonFiniteValue : public std::domain_error {
public:
  NonFiniteValue(const std::string &what, double abscissa)
      : std::domain_error(what + " (at x = " + std::to_string(abscissa) + ")"),
        abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

private:
  double abscissa_;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string &message) {
  if (!condition)
    throw ContractViolation(message);
}

} // namespace purcell
