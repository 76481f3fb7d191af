#pragma once

#include <stdexcept>
#include <string>

namespace poolmech {

/// Argument outside the domain of an operation (probe outside the support,
/// reversed integration bounds, elasticity not above one, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested functional does not exist for this distribution family.
class UnsupportedProbe : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A partition that cannot carry a mechanism (e.g. two cells with the same
/// expected value).
class InvalidPartition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two algebraically equal quantities disagree; signals an assembly bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Instance is too large for exhaustive enumeration.
class RefusedError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace poolmech
