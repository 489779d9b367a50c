#pragma once

#include <stdexcept>
#include <string>

namespace cpfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution parameter (or other argument) lies outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent observed data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// An estimator cannot produce admissible parameters for the given data.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpfit
