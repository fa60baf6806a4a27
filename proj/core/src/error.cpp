#include "florasim/error.hpp"

namespace florasim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::MissingRoot: return "MissingRoot";
    case ErrorCode::BadFilamentCount: return "BadFilamentCount";
    case ErrorCode::CycleWithoutFusionMark: return "CycleWithoutFusionMark";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::MissingLeafScore: return "MissingLeafScore";
    case ErrorCode::InsufficientFilaments: return "InsufficientFilaments";
    case ErrorCode::DanglingSwitch: return "DanglingSwitch";
    case ErrorCode::OpenRing: return "OpenRing";
    case ErrorCode::OverlappingModules: return "OverlappingModules";
    case ErrorCode::UnroutableSplit: return "UnroutableSplit";
    case ErrorCode::ProgramLayoutMismatch: return "ProgramLayoutMismatch";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::NoOptions: return "NoOptions";
    case ErrorCode::NoValidSamples: return "NoValidSamples";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ReferenceError: return "ReferenceError";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::RuntimeFault: return "RuntimeFault";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace florasim
