#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "florasim/engine.hpp"

namespace florasim {

// JSON Lines run log: a header line carrying the canonical config, its
// digest and the seed, then one record line per tick. Nothing in the log
// depends on wall-clock time, so identical runs serialise byte-identically.
struct RunLog {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  std::string digest;
  std::vector<TickReport> records;
};

std::string log_header(const ScenarioConfig& config, std::uint64_t seed);
std::string log_record(const TickReport& report);

// Parses and validates a full log: version tag, digest of the embedded
// config, per-line JSON. The returned config has the header seed applied.
RunLog read_log(const std::string& text);

}  // namespace florasim
