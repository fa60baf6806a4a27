#pragma once

#include <map>
#include <string>
#include <vector>

#include "florasim/braid_schedule.hpp"

namespace florasim {

// One physical strand crossing. `over` / `under` are carrier ids; `strand` is
// the 1-based index of the lower of the two strand positions at that tick,
// counting live carriers ordered by their slot point (x, then y) at tick
// start. Positive sign means the lower strand passes over.
struct Crossing {
  int tick = 0;
  CarrierId over = 0;
  CarrierId under = 0;
  int strand = 0;
  bool positive = true;
};

struct BraidTrace {
  int ticks = 0;
  std::vector<Crossing> crossings;
  // Rail positions per filament, one entry per tick boundary starting at the
  // load tick (so a filament loaded at tick t has ticks-t+1 entries).
  std::map<FilamentId, std::vector<RailPos>> history;
  std::map<CarrierId, std::pair<FilamentId, RailPos>> final_carriers;
};

// Verifies the schedule (raising InvalidSchedule on any violation), then
// replays it, recording filament paths and strand crossings.
BraidTrace execute_schedule(const CarrierSchedule& schedule, const MachineLayout& layout);

// Artin generator word, e.g. "s1 s2^-1". Empty trace gives "".
std::string trace_to_word(const BraidTrace& trace);

}  // namespace florasim
