#pragma once

#include <stdexcept>
#include <string>

namespace biofilm {

enum class ErrorCode {
  DegenerateTime,
  SingularAtOrigin,
  NonParabolic,
  SeriesDivergence,
  NegativeState,
  JacobianCollapse,
  ExtinctionReached,
  BoundaryOutsideDomain,
  DiagonalDegeneracy,
  HistoryGap,
  NonPhysicalRobin,
  NonContraction,
  ProfileUnavailable,
  DataNotC1,
  CFLViolation,
  NonPhysicalState,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the solver library carries one of the codes above.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biofilm
