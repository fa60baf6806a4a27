#pragma once

#include <string>
#include <vector>

#include "florasim/braid_schedule.hpp"

namespace florasim {

// Declarative braiding phases. Ring indices refer to the layout's detected
// rings (numbered by lowest driver module id).
struct Phase {
  enum class Op { load, unload, set_switch, tube, split, merge };
  Op op = Op::tube;

  CarrierId carrier = 0;   // load / unload
  FilamentId filament = 0; // load
  RailPos at;              // load

  ModuleId sw = 0;                          // set_switch
  SwitchState state = SwitchState::pass;    // set_switch

  std::vector<int> group;   // tube rings / split source group
  int ticks = 0;            // tube

  std::vector<int> group_a; // split "into" sides / merge operands
  std::vector<int> group_b;
  int filaments_a = 0;      // split carrier counts per side
  int filaments_b = 0;
};

struct BraidProgram {
  std::vector<Phase> phases;
};

BraidProgram parse_program(const std::string& json_text);
std::string write_program(const BraidProgram& program);

// Turns phases into a tick-by-tick carrier schedule by simulating the machine.
// The output always verifies clean; impossible programs raise
// ProgramLayoutMismatch (structural mismatch) or UnroutableSplit (demanded
// carrier movement cannot pass the gates).
CarrierSchedule compile_program(const BraidProgram& program, const MachineLayout& layout);

}  // namespace florasim
