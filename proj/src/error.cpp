#include "colts/error.hpp"

namespace colts {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FewerThanThreeObservations: return "FewerThanThreeObservations";
    case ErrorCode::NonMonotonePositions: return "NonMonotonePositions";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::NonPositivePosition: return "NonPositivePosition";
    case ErrorCode::NonPositiveSlope: return "NonPositiveSlope";
    case ErrorCode::PortOutOfRange: return "PortOutOfRange";
    case ErrorCode::PositionBeyondCorpus: return "PositionBeyondCorpus";
    case ErrorCode::MissingTrend: return "MissingTrend";
    case ErrorCode::WLevelUndefined: return "WLevelUndefined";
    case ErrorCode::ScopeBeforeX: return "ScopeBeforeX";
    case ErrorCode::ExternalCommandFailed: return "ExternalCommandFailed";
    case ErrorCode::UnparsableExternalOutput: return "UnparsableExternalOutput";
    case ErrorCode::PositionBeyondFold: return "PositionBeyondFold";
    case ErrorCode::NoCLevel: return "NoCLevel";
    case ErrorCode::NonViableInflation: return "NonViableInflation";
    case ErrorCode::CorpusParse: return "CorpusParse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace colts
