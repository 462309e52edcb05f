#pragma once

#include <stdexcept>
#include <string>

namespace cantorlc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A construction level or the precision needed to resolve it is out of reach.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace cantorlc
