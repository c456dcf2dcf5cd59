#pragma once

#include <stdexcept>
#include <string>

namespace photonbound {

// Numerical failures map to CLI exit code 3; everything deriving from
// std::invalid_argument maps to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear system of an estimation design is singular or too ill-conditioned.
class DesignRejected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LpInfeasible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A rate whose denominator interval touches zero.
class UndefinedRate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InadmissibleErrorRates : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UndefinedDistribution : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IncompleteData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Szegő bounds requested outside 2m - y^2 > 0.
class SzegoDomainError : public std::domain_error {
 public:
  SzegoDomainError(int order, double point, int minimal_order)
      : std::domain_error("Szego bound undefined for m=" + std::to_string(order) +
                          " at y=" + std::to_string(point) +
                          "; smallest admissible order is " + std::to_string(minimal_order)),
        minimal_order_(minimal_order) {}

  int minimal_order() const noexcept { return minimal_order_; }

 private:
  int minimal_order_;
};

}  // namespace photonbound
