#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmcmc {

// Every failure raised by the library derives from Error so callers (and the
// CLI exit-code mapping) can dispatch on the class.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotReady : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InvalidReference : public Error {
 public:
  using Error::Error;
};

class ReferenceFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Short class name of a library error ("invalid_argument", ...); "error"
/// for the base class and "internal" for foreign exceptions.
std::string_view error_kind(const std::exception& e) noexcept;

}  // namespace cmcmc
