#pragma once

#include <stdexcept>
#include <string>

namespace otconv {

/// Base class for every failure raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Construction / validation failures.
struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};
struct NegativeWeight : Error {
  explicit NegativeWeight(const std::string& what) : Error(what) {}
};
struct NonpositiveTotalMass : Error {
  explicit NonpositiveTotalMass(const std::string& what) : Error(what) {}
};
struct InvalidTotalMass : Error {
  explicit InvalidTotalMass(const std::string& what) : Error(what) {}
};
struct InvalidPlan : Error {
  explicit InvalidPlan(const std::string& what) : Error(what) {}
};
struct SourceMismatch : Error {
  explicit SourceMismatch(const std::string& what) : Error(what) {}
};

// Domain / evaluation failures.
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& what) : Error(what) {}
};
struct NoRadius : Error {
  explicit NoRadius(const std::string& what) : Error(what) {}
};
struct GradientUnavailable : Error {
  explicit GradientUnavailable(const std::string& what) : Error(what) {}
};
struct NonpositiveEpsilon : Error {
  explicit NonpositiveEpsilon(const std::string& what) : Error(what) {}
};

// I/O and solver internals.
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};
struct SolverFailure : Error {
  explicit SolverFailure(const std::string& what) : Error(what) {}
};

}  // namespace otconv
