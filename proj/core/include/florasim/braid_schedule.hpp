#pragma once

#include <string>
#include <vector>

#include "florasim/braid_layout.hpp"

namespace florasim {

using CarrierId = int;
using FilamentId = int;

enum class SwitchState { pass, transfer };

struct SwitchItem {
  ModuleId sw = 0;
  SwitchState state = SwitchState::pass;
};

struct LoadItem {
  CarrierId carrier = 0;
  FilamentId filament = 0;
  RailPos at;
};

struct MoveItem {
  CarrierId carrier = 0;
  RailPos from;
  RailPos to;
};

// One tick applies, in order: switch-state changes, unloads, loads, then all
// moves simultaneously.
struct TickRecord {
  std::vector<SwitchItem> switches;
  std::vector<CarrierId> unloads;
  std::vector<LoadItem> loads;
  std::vector<MoveItem> moves;
};

struct CarrierSchedule {
  std::vector<TickRecord> ticks;
};

// Canonical line-oriented text form; write/read round-trip bit-exactly.
std::string write_schedule(const CarrierSchedule& schedule);
CarrierSchedule read_schedule(const std::string& text);

enum class ViolationKind { double_occupancy, swap_conflict, teleport_move };

struct Violation {
  int tick = 0;
  ViolationKind kind = ViolationKind::double_occupancy;
  RailPos position;       // double_occupancy
  CarrierId carrier = -1;
  CarrierId other = -1;   // swap_conflict / double_occupancy
  std::string detail;
};

struct VerificationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string to_text() const;
};

// Replays the schedule against the layout rail graph. A schedule is valid iff
// the report lists no violations: no two carriers share a position, no pair
// swaps within one tick, every move follows a rail edge from the carrier's
// actual position.
VerificationReport verify_schedule(const CarrierSchedule& schedule, const MachineLayout& layout);

}  // namespace florasim
