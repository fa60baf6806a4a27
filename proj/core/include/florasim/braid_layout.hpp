#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "florasim/error.hpp"

namespace florasim {

using ModuleId = int;

enum class ModuleKind { driver, transfer_switch, support };

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct ModulePlacement {
  ModuleId id = 0;
  ModuleKind kind = ModuleKind::driver;
  Cell cell;
};

struct LayoutSpec {
  std::vector<ModulePlacement> modules;
};

// A rail position: one of the four carrier slots of a driver module. Slot
// directions: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
struct RailPos {
  ModuleId module = 0;
  int slot = 0;
  auto operator<=>(const RailPos&) const = default;
};

std::string to_string(const RailPos& p);

// A closed ring of drivers. `drivers` is the cycle order starting at the
// lowest module id; `senses` holds each driver's rotation sense (+1
// counter-clockwise, -1 clockwise), alternating around the ring so that
// neighbouring rotors interlock. `track` is the 4*d-position cycle a carrier
// follows during rotation: each driver contributes its four slots in rotation
// order starting at the slot facing the previous driver, and the last slot
// hands the carrier over to the next driver.
struct Ring {
  std::vector<ModuleId> drivers;
  std::vector<int> senses;
  std::vector<RailPos> track;
};

// A switch couples two drivers. When the switch is in transfer state a
// carrier reaching the gate slot of one driver crosses over and lands one
// rotation step past the other driver's gate slot (the slot that swept the
// interface while that rotor turned).
struct Gate {
  ModuleId switch_id = 0;
  ModuleId a = 0;  // lower driver id
  ModuleId b = 0;
  int slot_a = 0;  // a's slot facing the switch
  int slot_b = 0;
  RailPos land_a;  // landing position when crossing b -> a
  RailPos land_b;  // landing position when crossing a -> b
  int ring_a = 0;
  int ring_b = 0;
};

class MachineLayout {
 public:
  // Validates module placement: unique ids and cells (OverlappingModules),
  // every switch adjacent to exactly two drivers (DanglingSwitch), every
  // driver part of a single closed ring (OpenRing).
  static MachineLayout build(const LayoutSpec& spec);

  const LayoutSpec& spec() const { return spec_; }
  const std::vector<Ring>& rings() const { return rings_; }
  const std::map<ModuleId, Gate>& gates() const { return gates_; }

  bool is_driver(ModuleId id) const;
  const ModulePlacement& module(ModuleId id) const;
  int ring_of(ModuleId driver) const;
  int sense_of(ModuleId driver) const;

  bool valid_position(const RailPos& p) const;
  RailPos track_next(const RailPos& p) const;
  bool rail_adjacent(const RailPos& a, const RailPos& b) const;

  // Switch gating this exact slot, if any.
  std::optional<ModuleId> gate_at(const RailPos& p) const;
  const Gate& gate(ModuleId switch_id) const;

  // Transfer edge lookup: returns (switch id, true if the move crosses from
  // gate driver a to b) when from->to is a gate crossing.
  std::optional<std::pair<ModuleId, bool>> transfer_edge(const RailPos& from,
                                                         const RailPos& to) const;

  // Grid-adjacent drivers and the slot of `driver` facing each of them.
  const std::vector<std::pair<ModuleId, int>>& driver_neighbors(ModuleId driver) const;

  // Physical point of a slot, used to order strands left-to-right.
  std::pair<double, double> slot_point(const RailPos& p) const;

  int carriers_capacity() const;  // total rail positions

 private:
  LayoutSpec spec_;
  std::map<ModuleId, ModulePlacement> modules_;
  std::map<Cell, ModuleId> by_cell_;
  std::vector<Ring> rings_;
  std::map<ModuleId, int> ring_index_;
  std::map<ModuleId, int> sense_;
  std::map<ModuleId, Gate> gates_;
  std::map<RailPos, ModuleId> gate_slots_;
  std::map<RailPos, int> track_pos_;  // position -> index within its ring track
  std::map<std::pair<RailPos, RailPos>, std::pair<ModuleId, bool>> transfer_edges_;
  std::map<ModuleId, std::vector<std::pair<ModuleId, int>>> driver_neighbors_;
};

}  // namespace florasim
