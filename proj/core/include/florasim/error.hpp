#pragma once

#include <stdexcept>
#include <string>

namespace florasim {

enum class ErrorCode {
  // scaffold validation
  DisconnectedGraph,
  MissingRoot,
  BadFilamentCount,
  CycleWithoutFusionMark,
  EmptyGraph,
  // vmc
  MissingLeafScore,
  InsufficientFilaments,
  // braiding machine
  DanglingSwitch,
  OpenRing,
  OverlappingModules,
  UnroutableSplit,
  ProgramLayoutMismatch,
  InvalidSchedule,
  // plant / robotic node
  NoOptions,
  NoValidSamples,
  // serialization
  SyntaxError,
  SchemaError,
  ReferenceError,
  MalformedLine,
  ConfigError,
  // engine
  RuntimeFault,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace florasim
