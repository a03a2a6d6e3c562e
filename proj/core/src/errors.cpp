#include "sphrad/errors.hpp"

namespace sphrad {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InteriorViolated: return "InteriorViolated";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ProjectionDiverged: return "ProjectionDiverged";
    case ErrorCode::TransversalityBreakdown: return "TransversalityBreakdown";
    case ErrorCode::MissingSensitivity: return "MissingSensitivity";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::LPInfeasible: return "LPInfeasible";
  }
  return "Unknown";
}

}  // namespace sphrad
