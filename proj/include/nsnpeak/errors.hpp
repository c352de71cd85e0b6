#pragma once

#include <stdexcept>
#include <string>

namespace nsnpeak {

/// Invalid parameters, initial conditions or configuration values.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace nsnpeak
