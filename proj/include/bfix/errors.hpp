#pragma once

#include <stdexcept>
#include <string>

namespace bfix {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distance evaluator produced a negative or non-finite value.
class DistanceDomainError : public Error {
  using Error::Error;
};

/// A constructor or builtin was given a parameter outside its admissible range.
class ParameterError : public Error {
  using Error::Error;
};

/// A declared relaxation constant fails the relaxed triangle inequality.
class NotABMetric : public Error {
  using Error::Error;
};

class EmptySetError : public Error {
  using Error::Error;
};

/// A comparison function produced a negative or non-finite value.
class RangeError : public Error {
  using Error::Error;
};

/// A function was evaluated outside [0, inf).
class DomainError : public Error {
  using Error::Error;
};

class PreconditionError : public Error {
  using Error::Error;
};

class LengthError : public Error {
  using Error::Error;
};

/// No candidate y in T(x_n) with alpha(x_n, y) >= 1.
class AdmissibleSuccessorNotFound : public Error {
 public:
  AdmissibleSuccessorNotFound(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ConfigError : public Error {
  using Error::Error;
};

}  // namespace bfix
