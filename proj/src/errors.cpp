#include "biofilm/errors.hpp"

namespace biofilm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateTime: return "DegenerateTime";
    case ErrorCode::SingularAtOrigin: return "SingularAtOrigin";
    case ErrorCode::NonParabolic: return "NonParabolic";
    case ErrorCode::SeriesDivergence: return "SeriesDivergence";
    case ErrorCode::NegativeState: return "NegativeState";
    case ErrorCode::JacobianCollapse: return "JacobianCollapse";
    case ErrorCode::ExtinctionReached: return "ExtinctionReached";
    case ErrorCode::BoundaryOutsideDomain: return "BoundaryOutsideDomain";
    case ErrorCode::DiagonalDegeneracy: return "DiagonalDegeneracy";
    case ErrorCode::HistoryGap: return "HistoryGap";
    case ErrorCode::NonPhysicalRobin: return "NonPhysicalRobin";
    case ErrorCode::NonContraction: return "NonContraction";
    case ErrorCode::ProfileUnavailable: return "ProfileUnavailable";
    case ErrorCode::DataNotC1: return "DataNotC1";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::NonPhysicalState: return "NonPhysicalState";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace biofilm
