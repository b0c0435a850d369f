#include "bpseval/error.hpp"

namespace bpseval {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnparsableTimestamp: return "UnparsableTimestamp";
    case Errc::EndBeforeStart: return "EndBeforeStart";
    case Errc::EmptyLog: return "EmptyLog";
    case Errc::DegenerateSplit: return "DegenerateSplit";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NonFinite: return "NonFinite";
    case Errc::TooLarge: return "TooLarge";
    case Errc::HorizonTooSmall: return "HorizonTooSmall";
    case Errc::OriginAfterData: return "OriginAfterData";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::InvalidOverride: return "InvalidOverride";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::NoDefinedTargets: return "NoDefinedTargets";
    case Errc::EmptyTestSet: return "EmptyTestSet";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace bpseval
