#pragma once

#include <stdexcept>
#include <string>

namespace clachar {

// Base of everything the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, invalid configuration, malformed input files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Lowering a logic network into a dynamic netlist failed.
class MappingError : public Error {
 public:
  using Error::Error;
};

// Contention, unsettled nodes, missing output activity.
class SimulationError : public Error {
 public:
  using Error::Error;
};

// Trend check could not be evaluated (missing sweep cells).
class TrendError : public Error {
 public:
  using Error::Error;
};

}  // namespace clachar
