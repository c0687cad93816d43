#pragma once

#include <stdexcept>

namespace fpp {

// Argument outside the mathematical domain of an operation (vertex outside
// the window, n < 2, empty set where a nonempty one is required).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid user-supplied parameters (distribution specs, epsilon >= M, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The finite window cannot stand in for the infinite lattice for this call.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A requested window or ensemble exceeds the configured resource limits.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by search routines that ran out of window before finding a witness.
class WindowTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpp
