#pragma once

#include <stdexcept>

namespace pcshift {

/// A point was evaluated outside the domain [0,1].
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// An algorithm or generator parameter is outside its admissible range.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed input data (breakpoints, values, stream or config files).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An exact oracle would exceed its enumeration budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pcshift
