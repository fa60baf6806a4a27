#include "florasim/braid_trace.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <tuple>

#include "florasim/error.hpp"

namespace florasim {

namespace {

// Carrier leaving an interface-facing slot this tick: the strand sweeps
// through the shared arc between the two drivers.
struct Sweep {
  CarrierId carrier = 0;
  int from_slot = 0;
  int sense = 0;
};

Crossing make_crossing(int tick, CarrierId c1, int slot1, CarrierId c2, int slot2,
                       const std::map<CarrierId, int>& rank) {
  // Even take-off slot passes over; equal parity falls back to carrier id.
  CarrierId over, under;
  if (slot1 % 2 != slot2 % 2) {
    over = (slot1 % 2 == 0) ? c1 : c2;
  } else {
    over = std::min(c1, c2);
  }
  under = (over == c1) ? c2 : c1;
  Crossing cr;
  cr.tick = tick;
  cr.over = over;
  cr.under = under;
  cr.strand = std::min(rank.at(c1), rank.at(c2));
  cr.positive = rank.at(over) == cr.strand;
  return cr;
}

}  // namespace

BraidTrace execute_schedule(const CarrierSchedule& schedule, const MachineLayout& layout) {
  VerificationReport report = verify_schedule(schedule, layout);
  if (!report.valid())
    raise(ErrorCode::InvalidSchedule, "cannot execute: " + report.to_text());

  BraidTrace trace;
  trace.ticks = static_cast<int>(schedule.ticks.size());

  std::map<RailPos, CarrierId> occ;
  std::map<CarrierId, std::pair<FilamentId, RailPos>> carriers;

  for (int t = 0; t < trace.ticks; ++t) {
    const TickRecord& rec = schedule.ticks[static_cast<size_t>(t)];
    for (CarrierId cid : rec.unloads) {
      occ.erase(carriers.at(cid).second);
      carriers.erase(cid);
    }
    for (const LoadItem& ld : rec.loads) {
      occ[ld.at] = ld.carrier;
      carriers[ld.carrier] = {ld.filament, ld.at};
      trace.history[ld.filament].push_back(ld.at);
    }

    // Strand order at tick start: live carriers ranked by slot point.
    std::vector<std::pair<std::pair<double, double>, CarrierId>> order;
    for (const auto& [cid, info] : carriers)
      order.emplace_back(layout.slot_point(info.second), cid);
    std::sort(order.begin(), order.end());
    std::map<CarrierId, int> rank;
    for (size_t i = 0; i < order.size(); ++i) rank[order[i].second] = static_cast<int>(i) + 1;

    // Gate passages keyed by switch; interface sweeps keyed by driver pair.
    std::map<ModuleId, std::vector<std::pair<bool, std::pair<CarrierId, int>>>> gate_hits;
    std::map<std::pair<ModuleId, ModuleId>, std::pair<std::optional<Sweep>, std::optional<Sweep>>>
        interface_hits;

    for (const MoveItem& mv : rec.moves) {
      if (auto tr = layout.transfer_edge(mv.from, mv.to)) {
        gate_hits[tr->first].push_back({tr->second, {mv.carrier, mv.from.slot}});
        continue;
      }
      if (mv.from.module != mv.to.module) continue;  // handover, no shared arc
      int sense = ((mv.to.slot - mv.from.slot + 4) % 4 == 1) ? 1 : -1;
      for (const auto& [nbr, facing] : layout.driver_neighbors(mv.from.module)) {
        if (mv.from.slot != facing) continue;
        bool first = mv.from.module < nbr;
        auto key = std::make_pair(std::min(mv.from.module, nbr), std::max(mv.from.module, nbr));
        Sweep sw{mv.carrier, mv.from.slot, sense};
        if (first)
          interface_hits[key].first = sw;
        else
          interface_hits[key].second = sw;
      }
    }

    for (const auto& [sw_id, hits] : gate_hits) {
      if (hits.size() != 2 || hits[0].first == hits[1].first) continue;
      trace.crossings.push_back(make_crossing(t, hits[0].second.first, hits[0].second.second,
                                              hits[1].second.first, hits[1].second.second, rank));
    }
    for (const auto& [key, pairhit] : interface_hits) {
      if (!pairhit.first || !pairhit.second) continue;
      // Equal rotation senses move the facing arcs in opposite directions.
      if (pairhit.first->sense != pairhit.second->sense) continue;
      trace.crossings.push_back(make_crossing(t, pairhit.first->carrier, pairhit.first->from_slot,
                                              pairhit.second->carrier, pairhit.second->from_slot,
                                              rank));
    }

    std::map<RailPos, CarrierId> next = occ;
    for (const MoveItem& mv : rec.moves) next.erase(mv.from);
    for (const MoveItem& mv : rec.moves) {
      next[mv.to] = mv.carrier;
      carriers[mv.carrier].second = mv.to;
    }
    occ = std::move(next);

    for (const auto& [cid, info] : carriers) trace.history[info.first].push_back(info.second);
  }

  trace.final_carriers = std::move(carriers);
  return trace;
}

std::string trace_to_word(const BraidTrace& trace) {
  std::ostringstream out;
  bool first = true;
  for (const Crossing& cr : trace.crossings) {
    if (!first) out << ' ';
    first = false;
    out << 's' << cr.strand;
    if (!cr.positive) out << "^-1";
  }
  return out.str();
}

}  // namespace florasim
