#pragma once

#include <stdexcept>
#include <string>

namespace rsm {

/// Invalid experiment or object configuration (bad counts, out-of-range parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its target accuracy.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate = 0.0)
      : std::runtime_error(what), estimate_(estimate) {}

  /// Best error estimate (or offending value) at the point of failure.
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Argument outside the physical domain, e.g. |v| >= c.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two Coulomb partners closer than the configured minimum separation.
class ProximityError : public std::runtime_error {
 public:
  ProximityError(const std::string& what, double separation)
      : std::runtime_error(what), separation_(separation) {}
  double separation() const noexcept { return separation_; }

 private:
  double separation_;
};

/// The shock integrator exhausted its step-halving budget.
class SingularityError : public NumericalError {
 public:
  SingularityError(const std::string& what, double time, double separation)
      : NumericalError(what, separation), time_(time), separation_(separation) {}
  double time() const noexcept { return time_; }
  double separation() const noexcept { return separation_; }

 private:
  double time_;
  double separation_;
};

}  // namespace rsm
