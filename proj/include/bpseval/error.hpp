#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bpseval {

enum class Errc {
  MissingColumn,
  UnparsableTimestamp,
  EndBeforeStart,
  EmptyLog,
  DegenerateSplit,
  LengthMismatch,
  EmptySample,
  NonFinite,
  TooLarge,
  HorizonTooSmall,
  OriginAfterData,
  InsufficientData,
  InvalidOverride,
  InvalidScenario,
  InvalidModel,
  NoDefinedTargets,
  EmptyTestSet,
  InvalidArgument,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto an exit status and a `code=... msg=...` diagnostic.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace bpseval
