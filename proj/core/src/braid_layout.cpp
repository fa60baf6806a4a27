#include "florasim/braid_layout.hpp"

#include <algorithm>

namespace florasim {

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

int direction_slot(const Cell& from, const Cell& to) {
  for (int s = 0; s < 4; ++s)
    if (from.x + kDx[s] == to.x && from.y + kDy[s] == to.y) return s;
  raise(ErrorCode::OpenRing, "cells are not adjacent");
}

int mod4(int v) { return ((v % 4) + 4) % 4; }

}  // namespace

std::string to_string(const RailPos& p) {
  return "(" + std::to_string(p.module) + "," + std::to_string(p.slot) + ")";
}

MachineLayout MachineLayout::build(const LayoutSpec& spec) {
  MachineLayout m;
  m.spec_ = spec;
  for (const auto& mod : spec.modules) {
    if (!m.modules_.emplace(mod.id, mod).second)
      raise(ErrorCode::OverlappingModules, "duplicate module id " + std::to_string(mod.id));
    if (!m.by_cell_.emplace(mod.cell, mod.id).second)
      raise(ErrorCode::OverlappingModules,
            "modules overlap at cell (" + std::to_string(mod.cell.x) + "," +
                std::to_string(mod.cell.y) + ")");
  }

  // Driver adjacency over the grid 4-neighbourhood.
  std::map<ModuleId, std::vector<ModuleId>> adj;
  std::vector<ModuleId> drivers;
  for (const auto& [id, mod] : m.modules_) {
    if (mod.kind != ModuleKind::driver) continue;
    drivers.push_back(id);
    auto& list = adj[id];
    auto& facing = m.driver_neighbors_[id];
    for (int s = 0; s < 4; ++s) {
      Cell c{mod.cell.x + kDx[s], mod.cell.y + kDy[s]};
      auto it = m.by_cell_.find(c);
      if (it != m.by_cell_.end() && m.modules_.at(it->second).kind == ModuleKind::driver) {
        list.push_back(it->second);
        facing.push_back({it->second, s});
      }
    }
    std::sort(list.begin(), list.end());
  }
  if (drivers.empty()) raise(ErrorCode::OpenRing, "layout contains no driver modules");

  // Decompose drivers into rings: isolated drivers are trivial rings; any
  // other component must be a single simple cycle.
  std::set<ModuleId> assigned;
  for (ModuleId start : drivers) {
    if (assigned.count(start)) continue;
    const auto& nb = adj[start];
    Ring ring;
    if (nb.empty()) {
      ring.drivers = {start};
    } else {
      // Walk the cycle starting towards the lower-id neighbour.
      std::vector<ModuleId> order{start};
      ModuleId prev = start;
      ModuleId at = nb.front();
      while (at != start) {
        if (adj[at].size() != 2)
          raise(ErrorCode::OpenRing, "driver " + std::to_string(at) +
                                         " has " + std::to_string(adj[at].size()) +
                                         " driver neighbours; rings must be simple cycles");
        order.push_back(at);
        ModuleId next = adj[at][0] == prev ? adj[at][1] : adj[at][0];
        prev = at;
        at = next;
      }
      if (adj[start].size() != 2)
        raise(ErrorCode::OpenRing, "driver " + std::to_string(start) +
                                       " has " + std::to_string(adj[start].size()) +
                                       " driver neighbours; rings must be simple cycles");
      if (order.size() % 2 != 0)
        raise(ErrorCode::OpenRing, "ring through driver " + std::to_string(start) +
                                       " has odd length; rotors cannot alternate");
      ring.drivers = order;
    }

    const int d = static_cast<int>(ring.drivers.size());
    ring.senses.resize(d);
    for (int i = 0; i < d; ++i) ring.senses[i] = (i % 2 == 0) ? 1 : -1;
    for (int i = 0; i < d; ++i) {
      ModuleId id = ring.drivers[i];
      int entry = 0;
      if (d > 1) {
        ModuleId prev_driver = ring.drivers[(i + d - 1) % d];
        entry = direction_slot(m.modules_.at(id).cell, m.modules_.at(prev_driver).cell);
      }
      for (int k = 0; k < 4; ++k)
        ring.track.push_back({id, mod4(entry + k * ring.senses[i])});
      m.sense_[id] = ring.senses[i];
      assigned.insert(id);
    }
    int index = static_cast<int>(m.rings_.size());
    for (ModuleId id : ring.drivers) m.ring_index_[id] = index;
    for (size_t k = 0; k < ring.track.size(); ++k)
      m.track_pos_[ring.track[k]] = static_cast<int>(k);
    m.rings_.push_back(std::move(ring));
  }

  // Gates: every switch must couple exactly two drivers.
  for (const auto& [id, mod] : m.modules_) {
    if (mod.kind != ModuleKind::transfer_switch) continue;
    std::vector<ModuleId> flank;
    for (int s = 0; s < 4; ++s) {
      Cell c{mod.cell.x + kDx[s], mod.cell.y + kDy[s]};
      auto it = m.by_cell_.find(c);
      if (it != m.by_cell_.end() && m.modules_.at(it->second).kind == ModuleKind::driver)
        flank.push_back(it->second);
    }
    if (flank.size() != 2)
      raise(ErrorCode::DanglingSwitch, "switch " + std::to_string(id) + " is adjacent to " +
                                           std::to_string(flank.size()) +
                                           " drivers, expected exactly 2");
    std::sort(flank.begin(), flank.end());
    Gate g;
    g.switch_id = id;
    g.a = flank[0];
    g.b = flank[1];
    g.slot_a = direction_slot(m.modules_.at(g.a).cell, mod.cell);
    g.slot_b = direction_slot(m.modules_.at(g.b).cell, mod.cell);
    g.land_a = {g.a, mod4(g.slot_a + m.sense_.at(g.a))};
    g.land_b = {g.b, mod4(g.slot_b + m.sense_.at(g.b))};
    g.ring_a = m.ring_index_.at(g.a);
    g.ring_b = m.ring_index_.at(g.b);
    m.gate_slots_[{g.a, g.slot_a}] = id;
    m.gate_slots_[{g.b, g.slot_b}] = id;
    m.transfer_edges_[{{g.a, g.slot_a}, g.land_b}] = {id, true};
    m.transfer_edges_[{{g.b, g.slot_b}, g.land_a}] = {id, false};
    m.gates_.emplace(id, g);
  }
  return m;
}

bool MachineLayout::is_driver(ModuleId id) const {
  auto it = modules_.find(id);
  return it != modules_.end() && it->second.kind == ModuleKind::driver;
}

const ModulePlacement& MachineLayout::module(ModuleId id) const {
  auto it = modules_.find(id);
  if (it == modules_.end())
    raise(ErrorCode::ReferenceError, "unknown module id " + std::to_string(id));
  return it->second;
}

int MachineLayout::ring_of(ModuleId driver) const {
  auto it = ring_index_.find(driver);
  if (it == ring_index_.end())
    raise(ErrorCode::ReferenceError, "module " + std::to_string(driver) + " is not a driver");
  return it->second;
}

int MachineLayout::sense_of(ModuleId driver) const { return sense_.at(driver); }

bool MachineLayout::valid_position(const RailPos& p) const {
  return p.slot >= 0 && p.slot < 4 && is_driver(p.module);
}

RailPos MachineLayout::track_next(const RailPos& p) const {
  const Ring& ring = rings_[ring_of(p.module)];
  int idx = track_pos_.at(p);
  return ring.track[(idx + 1) % ring.track.size()];
}

bool MachineLayout::rail_adjacent(const RailPos& a, const RailPos& b) const {
  if (!valid_position(a) || !valid_position(b)) return false;
  if (a.module == b.module) {
    int diff = mod4(a.slot - b.slot);
    return diff == 1 || diff == 3;
  }
  if (track_next(a) == b || track_next(b) == a) return true;
  if (transfer_edges_.count({a, b}) || transfer_edges_.count({b, a})) return true;
  return false;
}

std::optional<ModuleId> MachineLayout::gate_at(const RailPos& p) const {
  auto it = gate_slots_.find(p);
  if (it == gate_slots_.end()) return std::nullopt;
  return it->second;
}

const Gate& MachineLayout::gate(ModuleId switch_id) const {
  auto it = gates_.find(switch_id);
  if (it == gates_.end())
    raise(ErrorCode::ReferenceError, "unknown switch id " + std::to_string(switch_id));
  return it->second;
}

std::optional<std::pair<ModuleId, bool>> MachineLayout::transfer_edge(const RailPos& from,
                                                                      const RailPos& to) const {
  auto it = transfer_edges_.find({from, to});
  if (it == transfer_edges_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::pair<ModuleId, int>>& MachineLayout::driver_neighbors(
    ModuleId driver) const {
  static const std::vector<std::pair<ModuleId, int>> kNone;
  auto it = driver_neighbors_.find(driver);
  return it == driver_neighbors_.end() ? kNone : it->second;
}

std::pair<double, double> MachineLayout::slot_point(const RailPos& p) const {
  const auto& mod = module(p.module);
  return {mod.cell.x + 0.3 * kDx[p.slot], mod.cell.y + 0.3 * kDy[p.slot]};
}

int MachineLayout::carriers_capacity() const {
  int total = 0;
  for (const auto& r : rings_) total += static_cast<int>(r.track.size());
  return total;
}

}  // namespace florasim
