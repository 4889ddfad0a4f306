#pragma once

#include <stdexcept>
#include <string>

namespace rsigma {

// Argument outside the mathematical domain of an operation (r <= 1, x outside
// [0, log G), m not in {1,2,4}, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The requested tolerance is below what extended precision can certify, or a
// sign could not be decided at the precision floor.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decision depends on a bracket that straddles the decision boundary.
class IndeterminateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The caller did not supply enough primes (or similar structural input).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Work would exceed the configured memory budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsigma
