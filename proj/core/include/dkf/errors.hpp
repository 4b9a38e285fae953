#pragma once

#include <stdexcept>

namespace dkf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model, scenario, or config input. Messages name the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Lookup of an unknown or dead node.
class QueryError : public Error {
 public:
  using Error::Error;
};

// Numerical degeneracy: a covariance that should be positive definite is not,
// or a normal matrix is singular.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A trace stream is missing rows the aggregation needs.
class TraceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dkf
