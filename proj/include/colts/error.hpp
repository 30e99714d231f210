#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace colts {

enum class ErrorCode {
  InvalidArgument = 1,
  FewerThanThreeObservations,
  NonMonotonePositions,
  FitDiverged,
  NonPositivePosition,
  NonPositiveSlope,
  PortOutOfRange,
  PositionBeyondCorpus,
  MissingTrend,
  WLevelUndefined,
  ScopeBeforeX,
  ExternalCommandFailed,
  UnparsableExternalOutput,
  PositionBeyondFold,
  NoCLevel,
  NonViableInflation,
  CorpusParse,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can hand a stable integer back to callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace colts
