#pragma once

#include <stdexcept>
#include <string>

namespace homopart {

/// Violated precondition of a public operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters are well-formed but cannot be realized at the requested size.
class Infeasible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace homopart
