#pragma once

#include <stdexcept>
#include <string>

namespace horseshoe {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity requested outside the range where it is defined (e.g. zeta at tau >= 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The horseshoe prior density is unbounded at theta = 0.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Quadrature could not reach the requested accuracy.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace horseshoe
