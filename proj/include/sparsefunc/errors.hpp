#pragma once

#include <stdexcept>
#include <string>

namespace sparsefunc {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested (class, parameter) combination has no defined rate or estimator.
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class DimensionTooSmall : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Even the log-domain evaluation left the representable double range.
class NumericOverflow : public Error {
 public:
  using Error::Error;
};

class NonConstantFunctional : public Error {
 public:
  using Error::Error;
};

class WitnessOutsideClass : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsefunc
