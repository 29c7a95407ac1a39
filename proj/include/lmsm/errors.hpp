#pragma once

#include <stdexcept>
#include <string>

namespace lmsm {

// Invalid model or numerical parameter (alpha, scale, v, H bounds, grid endpoints).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A coefficient references a point that the Levy path does not resolve.
class ResolutionError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Truncation depth exceeds the depth of the coefficient pyramid.
class DepthError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Requested structure would exceed the configured memory budget.
class BudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Not enough samples / replicates for a statistic to be meaningful.
class StatisticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (CSV, pyramid container).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lmsm
