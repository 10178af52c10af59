#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base class of all errors raised by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define FINSLER_ERROR(Name)                                   \
  struct Name : Error {                                       \
    explicit Name(const std::string& what = #Name) : Error(what) {} \
  }

FINSLER_ERROR(ZeroVector);
FINSLER_ERROR(NotConvex);
FINSLER_ERROR(NoConvergence);
FINSLER_ERROR(InvalidNorm);
FINSLER_ERROR(LeftChart);
FINSLER_ERROR(CriticalPoint);
FINSLER_ERROR(BadN);
FINSLER_ERROR(SolverDiverged);
FINSLER_ERROR(OutOfRange);
FINSLER_ERROR(CurvatureNotCertified);
FINSLER_ERROR(BadRange);
FINSLER_ERROR(EmptySet);
FINSLER_ERROR(FullSet);
FINSLER_ERROR(NotNormalized);
FINSLER_ERROR(ConfigError);

#undef FINSLER_ERROR

}  // namespace finsler
