#include "florasim/braid_program.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "florasim/error.hpp"

namespace florasim {

namespace {

using nlohmann::json;

const char* op_name(Phase::Op op) {
  switch (op) {
    case Phase::Op::load: return "load";
    case Phase::Op::unload: return "unload";
    case Phase::Op::set_switch: return "set-switch";
    case Phase::Op::tube: return "tube";
    case Phase::Op::split: return "split";
    case Phase::Op::merge: return "merge";
  }
  return "?";
}

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) known = true;
    if (!known) raise(ErrorCode::SchemaError, where + ": unknown field '" + it.key() + "'");
  }
  for (const char* k : keys) {
    if (!obj.contains(k)) raise(ErrorCode::SchemaError, where + ": missing field '" + k + "'");
  }
}

int get_int(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    raise(ErrorCode::SchemaError, where + "." + key + ": expected integer");
  return v.get<int>();
}

std::vector<int> get_int_array(const json& v, const std::string& where) {
  if (!v.is_array()) raise(ErrorCode::SchemaError, where + ": expected array of integers");
  std::vector<int> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer())
      raise(ErrorCode::SchemaError, where + "[" + std::to_string(i) + "]: expected integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

}  // namespace

BraidProgram parse_program(const std::string& json_text) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) raise(ErrorCode::SyntaxError, "program: invalid JSON");
  if (!root.is_object()) raise(ErrorCode::SchemaError, "program: expected object");
  require_keys(root, "program", {"phases"});
  if (!root["phases"].is_array()) raise(ErrorCode::SchemaError, "program.phases: expected array");

  BraidProgram prog;
  int idx = 0;
  for (const json& jp : root["phases"]) {
    std::string where = "program.phases[" + std::to_string(idx++) + "]";
    if (!jp.is_object()) raise(ErrorCode::SchemaError, where + ": expected object");
    if (!jp.contains("op") || !jp["op"].is_string())
      raise(ErrorCode::SchemaError, where + ".op: expected string");
    std::string op = jp["op"].get<std::string>();
    Phase ph;
    if (op == "load") {
      ph.op = Phase::Op::load;
      require_keys(jp, where, {"op", "carrier", "filament", "position"});
      ph.carrier = get_int(jp, where, "carrier");
      ph.filament = get_int(jp, where, "filament");
      std::vector<int> pos = get_int_array(jp["position"], where + ".position");
      if (pos.size() != 2)
        raise(ErrorCode::SchemaError, where + ".position: expected [module, slot]");
      ph.at = RailPos{pos[0], pos[1]};
    } else if (op == "unload") {
      ph.op = Phase::Op::unload;
      require_keys(jp, where, {"op", "carrier"});
      ph.carrier = get_int(jp, where, "carrier");
    } else if (op == "set-switch") {
      ph.op = Phase::Op::set_switch;
      require_keys(jp, where, {"op", "switch", "state"});
      ph.sw = get_int(jp, where, "switch");
      std::string st = jp["state"].is_string() ? jp["state"].get<std::string>() : "";
      if (st == "pass")
        ph.state = SwitchState::pass;
      else if (st == "transfer")
        ph.state = SwitchState::transfer;
      else
        raise(ErrorCode::SchemaError, where + ".state: expected 'pass' or 'transfer'");
    } else if (op == "tube") {
      ph.op = Phase::Op::tube;
      require_keys(jp, where, {"op", "rings", "ticks"});
      ph.group = get_int_array(jp["rings"], where + ".rings");
      ph.ticks = get_int(jp, where, "ticks");
      if (ph.ticks < 0) raise(ErrorCode::SchemaError, where + ".ticks: expected >= 0");
    } else if (op == "split") {
      ph.op = Phase::Op::split;
      require_keys(jp, where, {"op", "rings", "into", "filaments"});
      ph.group = get_int_array(jp["rings"], where + ".rings");
      const json& into = jp["into"];
      if (!into.is_array() || into.size() != 2)
        raise(ErrorCode::SchemaError, where + ".into: expected two ring groups");
      ph.group_a = get_int_array(into[0], where + ".into[0]");
      ph.group_b = get_int_array(into[1], where + ".into[1]");
      std::vector<int> fils = get_int_array(jp["filaments"], where + ".filaments");
      if (fils.size() != 2)
        raise(ErrorCode::SchemaError, where + ".filaments: expected two counts");
      ph.filaments_a = fils[0];
      ph.filaments_b = fils[1];
      if (ph.filaments_a < 0 || ph.filaments_b < 0)
        raise(ErrorCode::SchemaError, where + ".filaments: expected >= 0");
    } else if (op == "merge") {
      ph.op = Phase::Op::merge;
      require_keys(jp, where, {"op", "groups"});
      const json& groups = jp["groups"];
      if (!groups.is_array() || groups.size() != 2)
        raise(ErrorCode::SchemaError, where + ".groups: expected two ring groups");
      ph.group_a = get_int_array(groups[0], where + ".groups[0]");
      ph.group_b = get_int_array(groups[1], where + ".groups[1]");
    } else {
      raise(ErrorCode::SchemaError, where + ".op: unknown op '" + op + "'");
    }
    prog.phases.push_back(std::move(ph));
  }
  return prog;
}

std::string write_program(const BraidProgram& program) {
  json phases = json::array();
  for (const Phase& ph : program.phases) {
    json jp;
    jp["op"] = op_name(ph.op);
    switch (ph.op) {
      case Phase::Op::load:
        jp["carrier"] = ph.carrier;
        jp["filament"] = ph.filament;
        jp["position"] = {ph.at.module, ph.at.slot};
        break;
      case Phase::Op::unload:
        jp["carrier"] = ph.carrier;
        break;
      case Phase::Op::set_switch:
        jp["switch"] = ph.sw;
        jp["state"] = ph.state == SwitchState::pass ? "pass" : "transfer";
        break;
      case Phase::Op::tube:
        jp["rings"] = ph.group;
        jp["ticks"] = ph.ticks;
        break;
      case Phase::Op::split:
        jp["rings"] = ph.group;
        jp["into"] = {ph.group_a, ph.group_b};
        jp["filaments"] = {ph.filaments_a, ph.filaments_b};
        break;
      case Phase::Op::merge:
        jp["groups"] = {ph.group_a, ph.group_b};
        break;
    }
    phases.push_back(std::move(jp));
  }
  json root;
  root["phases"] = std::move(phases);
  return root.dump(2) + "\n";
}

namespace {

// Simulated machine state carried across phases while compiling.
struct CompileState {
  const MachineLayout& layout;
  std::map<RailPos, CarrierId> occ;
  std::map<CarrierId, std::pair<FilamentId, RailPos>> carriers;
  std::map<ModuleId, SwitchState> switches;
  // Items that take effect at the start of the next emitted tick.
  std::vector<SwitchItem> pending_switches;
  std::vector<CarrierId> pending_unloads;
  std::vector<LoadItem> pending_loads;
  CarrierSchedule out;

  explicit CompileState(const MachineLayout& l) : layout(l) {
    for (const auto& [sw_id, g] : l.gates()) switches[sw_id] = SwitchState::pass;
  }

  void emit_tick(std::vector<MoveItem> moves) {
    TickRecord rec;
    rec.switches = std::move(pending_switches);
    rec.unloads = std::move(pending_unloads);
    rec.loads = std::move(pending_loads);
    rec.moves = std::move(moves);
    pending_switches.clear();
    pending_unloads.clear();
    pending_loads.clear();
    out.ticks.push_back(std::move(rec));
  }

  bool has_pending() const {
    return !pending_switches.empty() || !pending_unloads.empty() || !pending_loads.empty();
  }

  // Advance every carrier on the given rings one quarter step; transfer
  // switches redirect the carrier sitting on their gate slot. Returns the
  // moves and applies them. `transferred` (optional) collects carriers that
  // crossed a gate this tick.
  std::vector<MoveItem> rotate(const std::set<int>& rings, const std::string& where,
                               std::vector<CarrierId>* transferred = nullptr) {
    std::vector<MoveItem> moves;
    for (const auto& [cid, info] : carriers) {
      const RailPos from = info.second;
      if (!rings.count(layout.ring_of(from.module))) continue;
      RailPos to;
      std::optional<ModuleId> gid = layout.gate_at(from);
      if (gid && switches.at(*gid) == SwitchState::transfer) {
        const Gate& g = layout.gate(*gid);
        const bool from_a = (from.module == g.a && from.slot == g.slot_a);
        to = from_a ? g.land_b : g.land_a;
        if (transferred) transferred->push_back(cid);
      } else {
        to = layout.track_next(from);
      }
      moves.push_back(MoveItem{cid, from, to});
    }
    // Simultaneous application; a destination clash means the phase drove
    // carriers into each other (e.g. transfer into a stationary ring).
    std::map<RailPos, CarrierId> next = occ;
    for (const MoveItem& mv : moves) next.erase(mv.from);
    for (const MoveItem& mv : moves) {
      auto [it, fresh] = next.emplace(mv.to, mv.carrier);
      if (!fresh)
        raise(ErrorCode::ProgramLayoutMismatch,
              where + ": carriers " + std::to_string(it->second) + " and " +
                  std::to_string(mv.carrier) + " collide at " + to_string(mv.to));
      carriers[mv.carrier].second = mv.to;
    }
    occ = std::move(next);
    return moves;
  }

  std::set<int> checked_group(const std::vector<int>& rings, const std::string& where) const {
    if (rings.empty()) raise(ErrorCode::ProgramLayoutMismatch, where + ": empty ring group");
    std::set<int> out;
    for (int r : rings) {
      if (r < 0 || r >= static_cast<int>(layout.rings().size()))
        raise(ErrorCode::ProgramLayoutMismatch,
              where + ": no ring " + std::to_string(r) + " in layout");
      if (!out.insert(r).second)
        raise(ErrorCode::ProgramLayoutMismatch,
              where + ": duplicate ring " + std::to_string(r));
    }
    return out;
  }

  int count_on(const std::set<int>& rings) const {
    int n = 0;
    for (const auto& [cid, info] : carriers)
      if (rings.count(layout.ring_of(info.second.module))) ++n;
    return n;
  }
};

void compile_load(CompileState& st, const Phase& ph, const std::string& where) {
  if (!st.layout.valid_position(ph.at))
    raise(ErrorCode::ProgramLayoutMismatch, where + ": " + to_string(ph.at) + " is not a rail position");
  if (st.occ.count(ph.at))
    raise(ErrorCode::ProgramLayoutMismatch, where + ": " + to_string(ph.at) + " already occupied");
  if (st.carriers.count(ph.carrier))
    raise(ErrorCode::ProgramLayoutMismatch,
          where + ": carrier " + std::to_string(ph.carrier) + " already loaded");
  for (const auto& [cid, info] : st.carriers)
    if (info.first == ph.filament)
      raise(ErrorCode::ProgramLayoutMismatch,
            where + ": filament " + std::to_string(ph.filament) + " already on carrier " +
                std::to_string(cid));
  st.occ[ph.at] = ph.carrier;
  st.carriers[ph.carrier] = {ph.filament, ph.at};
  st.pending_loads.push_back(LoadItem{ph.carrier, ph.filament, ph.at});
}

void compile_split(CompileState& st, const Phase& ph, const std::string& where) {
  std::set<int> source = st.checked_group(ph.group, where);
  std::set<int> side_a = st.checked_group(ph.group_a, where);
  std::set<int> side_b = st.checked_group(ph.group_b, where);
  std::set<int> joined;
  joined.insert(side_a.begin(), side_a.end());
  for (int r : side_b)
    if (!joined.insert(r).second)
      raise(ErrorCode::ProgramLayoutMismatch,
            where + ": ring " + std::to_string(r) + " appears on both sides");
  if (joined != source)
    raise(ErrorCode::ProgramLayoutMismatch, where + ": 'into' sides must partition 'rings'");

  const int total = st.count_on(source);
  if (ph.filaments_a + ph.filaments_b != total)
    raise(ErrorCode::ProgramLayoutMismatch,
          where + ": filament counts " + std::to_string(ph.filaments_a) + "+" +
              std::to_string(ph.filaments_b) + " != " + std::to_string(total) + " carriers in group");

  // Locate the gate joining the two sides; transfers are throttled through it.
  const Gate* bridge = nullptr;
  bool a_is_side_a = true;
  for (const auto& [sw_id, g] : st.layout.gates()) {
    if (side_a.count(g.ring_a) && side_b.count(g.ring_b)) {
      bridge = &g;
      a_is_side_a = true;
      break;
    }
    if (side_b.count(g.ring_a) && side_a.count(g.ring_b)) {
      bridge = &g;
      a_is_side_a = false;
      break;
    }
  }
  if (bridge == nullptr)
    raise(ErrorCode::ProgramLayoutMismatch, where + ": no switch joins the two sides");

  int on_a = 0;
  for (const auto& [cid, info] : st.carriers)
    if (side_a.count(st.layout.ring_of(info.second.module))) ++on_a;
  int deficit = ph.filaments_a - on_a;  // carriers that must cross into side A
  int need = std::abs(deficit);

  // Gate slot carriers leave from / land past, oriented by flow direction.
  const bool flow_into_a = deficit >= 0;
  const bool source_is_gate_a = (flow_into_a != a_is_side_a);
  const RailPos gate_src{source_is_gate_a ? bridge->a : bridge->b,
                         source_is_gate_a ? bridge->slot_a : bridge->slot_b};
  const RailPos landing = source_is_gate_a ? bridge->land_b : bridge->land_a;

  const int capacity = st.layout.carriers_capacity();
  const int bound = 4 * capacity * (need + 1) + 16;

  // The crossing carrier lands one step past the far gate slot; whoever would
  // rotate into that landing this tick must not exist or the two collide.
  const int target_ring = st.layout.ring_of(landing.module);
  const std::vector<RailPos>& track = st.layout.rings()[target_ring].track;
  RailPos before_landing = landing;
  for (size_t i = 0; i < track.size(); ++i)
    if (track[i] == landing) before_landing = track[(i + track.size() - 1) % track.size()];
  const RailPos opposite{source_is_gate_a ? bridge->b : bridge->a,
                         source_is_gate_a ? bridge->slot_b : bridge->slot_a};

  int moved = 0;
  for (int tick = 0;
       tick < bound &&
       (moved < need || st.switches.at(bridge->switch_id) == SwitchState::transfer);
       ++tick) {
    bool want_transfer = false;
    if (moved < need) {
      bool src_ready = st.occ.count(gate_src) != 0;
      bool landing_clear = !st.occ.count(opposite) && !st.occ.count(before_landing);
      want_transfer = src_ready && landing_clear;
    }
    SwitchState desired = want_transfer ? SwitchState::transfer : SwitchState::pass;
    if (st.switches.at(bridge->switch_id) != desired) {
      st.switches[bridge->switch_id] = desired;
      st.pending_switches.push_back(SwitchItem{bridge->switch_id, desired});
    }
    if (!want_transfer && moved >= need) {
      // Only needed the tick to restore the switch; no rotation required.
      break;
    }
    std::vector<CarrierId> crossed;
    std::vector<MoveItem> moves = st.rotate(source, where, &crossed);
    st.emit_tick(std::move(moves));
    moved += static_cast<int>(crossed.size());
  }
  if (moved < need)
    raise(ErrorCode::UnroutableSplit,
          where + ": only " + std::to_string(moved) + " of " + std::to_string(need) +
              " carriers crossed within " + std::to_string(bound) + " ticks");
}

}  // namespace

CarrierSchedule compile_program(const BraidProgram& program, const MachineLayout& layout) {
  CompileState st(layout);
  int idx = 0;
  for (const Phase& ph : program.phases) {
    std::string where = "phase " + std::to_string(idx++) + " (" + op_name(ph.op) + ")";
    switch (ph.op) {
      case Phase::Op::load:
        compile_load(st, ph, where);
        break;
      case Phase::Op::unload: {
        auto it = st.carriers.find(ph.carrier);
        if (it == st.carriers.end())
          raise(ErrorCode::ProgramLayoutMismatch,
                where + ": carrier " + std::to_string(ph.carrier) + " not on the machine");
        // Unloads run before loads within a tick, so a load of this same
        // carrier still pending must land in an earlier tick.
        for (const LoadItem& l : st.pending_loads)
          if (l.carrier == ph.carrier) {
            st.emit_tick({});
            break;
          }
        st.occ.erase(it->second.second);
        st.carriers.erase(it);
        st.pending_unloads.push_back(ph.carrier);
        break;
      }
      case Phase::Op::set_switch: {
        if (!layout.gates().count(ph.sw))
          raise(ErrorCode::ProgramLayoutMismatch,
                where + ": no switch module " + std::to_string(ph.sw));
        if (st.switches.at(ph.sw) != ph.state) {
          st.switches[ph.sw] = ph.state;
          st.pending_switches.push_back(SwitchItem{ph.sw, ph.state});
        }
        break;
      }
      case Phase::Op::tube: {
        std::set<int> rings = st.checked_group(ph.group, where);
        for (int t = 0; t < ph.ticks; ++t) st.emit_tick(st.rotate(rings, where));
        break;
      }
      case Phase::Op::split:
        compile_split(st, ph, where);
        break;
      case Phase::Op::merge: {
        std::set<int> a = st.checked_group(ph.group_a, where);
        std::set<int> b = st.checked_group(ph.group_b, where);
        for (int r : b)
          if (a.count(r))
            raise(ErrorCode::ProgramLayoutMismatch,
                  where + ": ring " + std::to_string(r) + " appears on both sides");
        // Pure bookkeeping: the joined group is addressed by its ring ids.
        break;
      }
    }
  }
  if (st.has_pending()) st.emit_tick({});
  return st.out;
}

}  // namespace florasim
