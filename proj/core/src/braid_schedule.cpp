#include "florasim/braid_schedule.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace florasim {

namespace {

constexpr const char* kHeader = "florasim-schedule v1";

void write_pos(std::ostringstream& out, const RailPos& p) {
  out << "(" << p.module << "," << p.slot << ")";
}

struct LineParser {
  const std::string& line;
  size_t at = 0;
  int number;  // 1-based line number for messages

  LineParser(const std::string& l, int n) : line(l), number(n) {}

  [[noreturn]] void fail(const std::string& what) {
    raise(ErrorCode::MalformedLine, "line " + std::to_string(number) + ": " + what);
  }
  bool done() const { return at >= line.size(); }
  char peek() const { return at < line.size() ? line[at] : '\0'; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++at;
  }
  void expect_str(const std::string& s) {
    if (line.compare(at, s.size(), s) != 0) fail("expected '" + s + "'");
    at += s.size();
  }
  int integer() {
    size_t start = at;
    if (peek() == '-') ++at;
    while (at < line.size() && std::isdigit(static_cast<unsigned char>(line[at]))) ++at;
    if (at == start) fail("expected integer");
    return std::stoi(line.substr(start, at - start));
  }
  std::string word() {
    size_t start = at;
    while (at < line.size() && std::isalpha(static_cast<unsigned char>(line[at]))) ++at;
    if (at == start) fail("expected word");
    return line.substr(start, at - start);
  }
  RailPos pos() {
    expect('(');
    RailPos p;
    p.module = integer();
    expect(',');
    p.slot = integer();
    expect(')');
    return p;
  }
};

}  // namespace

std::string write_schedule(const CarrierSchedule& schedule) {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "ticks " << schedule.ticks.size() << "\n";
  for (size_t t = 0; t < schedule.ticks.size(); ++t) {
    const TickRecord& rec = schedule.ticks[t];
    out << "tick " << t << ":";
    bool first = true;
    auto sep = [&] {
      out << (first ? " " : "; ");
      first = false;
    };
    for (const auto& s : rec.switches) {
      sep();
      out << "switch " << s.sw << " " << (s.state == SwitchState::transfer ? "transfer" : "pass");
    }
    for (CarrierId c : rec.unloads) {
      sep();
      out << "unload " << c;
    }
    for (const auto& l : rec.loads) {
      sep();
      out << "load " << l.carrier << " " << l.filament << " ";
      write_pos(out, l.at);
    }
    for (const auto& mv : rec.moves) {
      sep();
      out << "move " << mv.carrier << " ";
      write_pos(out, mv.from);
      out << " ";
      write_pos(out, mv.to);
    }
    out << "\n";
  }
  return out.str();
}

CarrierSchedule read_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };
  if (!next_line() || line != kHeader)
    raise(ErrorCode::MalformedLine, "line 1: missing header '" + std::string(kHeader) + "'");
  if (!next_line() || line.rfind("ticks ", 0) != 0)
    raise(ErrorCode::MalformedLine, "line 2: expected 'ticks <n>'");
  int tick_count = 0;
  try {
    tick_count = std::stoi(line.substr(6));
  } catch (const std::exception&) {
    raise(ErrorCode::MalformedLine, "line 2: expected 'ticks <n>'");
  }
  if (tick_count < 0) raise(ErrorCode::MalformedLine, "line 2: negative tick count");

  CarrierSchedule schedule;
  schedule.ticks.resize(tick_count);
  for (int t = 0; t < tick_count; ++t) {
    if (!next_line())
      raise(ErrorCode::MalformedLine,
            "line " + std::to_string(line_no + 1) + ": missing tick " + std::to_string(t));
    LineParser p(line, line_no);
    p.expect_str("tick ");
    int tick = p.integer();
    if (tick != t) p.fail("expected tick " + std::to_string(t));
    p.expect(':');
    TickRecord& rec = schedule.ticks[t];
    while (!p.done()) {
      p.expect(' ');
      std::string op = p.word();
      p.expect(' ');
      if (op == "switch") {
        SwitchItem s;
        s.sw = p.integer();
        p.expect(' ');
        std::string state = p.word();
        if (state == "transfer")
          s.state = SwitchState::transfer;
        else if (state == "pass")
          s.state = SwitchState::pass;
        else
          p.fail("unknown switch state '" + state + "'");
        rec.switches.push_back(s);
      } else if (op == "unload") {
        rec.unloads.push_back(p.integer());
      } else if (op == "load") {
        LoadItem l;
        l.carrier = p.integer();
        p.expect(' ');
        l.filament = p.integer();
        p.expect(' ');
        l.at = p.pos();
        rec.loads.push_back(l);
      } else if (op == "move") {
        MoveItem mv;
        mv.carrier = p.integer();
        p.expect(' ');
        mv.from = p.pos();
        p.expect(' ');
        mv.to = p.pos();
        rec.moves.push_back(mv);
      } else {
        p.fail("unknown item '" + op + "'");
      }
      if (!p.done()) p.expect(';');
    }
  }
  if (next_line() && !line.empty())
    raise(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": trailing content");
  return schedule;
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  out << "violations " << violations.size() << "\n";
  for (const auto& v : violations) {
    out << "tick " << v.tick << ": ";
    switch (v.kind) {
      case ViolationKind::double_occupancy:
        out << "double-occupancy at " << to_string(v.position) << " carriers " << v.carrier
            << " and " << v.other;
        break;
      case ViolationKind::swap_conflict:
        out << "swap-conflict carriers " << v.carrier << " and " << v.other;
        break;
      case ViolationKind::teleport_move:
        out << "teleport-move carrier " << v.carrier;
        break;
    }
    if (!v.detail.empty()) out << " (" << v.detail << ")";
    out << "\n";
  }
  return out.str();
}

VerificationReport verify_schedule(const CarrierSchedule& schedule, const MachineLayout& layout) {
  VerificationReport report;
  std::map<RailPos, CarrierId> occupant;
  std::map<CarrierId, RailPos> where;

  for (size_t t = 0; t < schedule.ticks.size(); ++t) {
    const int tick = static_cast<int>(t);
    const TickRecord& rec = schedule.ticks[t];

    for (CarrierId c : rec.unloads) {
      auto it = where.find(c);
      if (it == where.end()) {
        report.violations.push_back(
            {tick, ViolationKind::teleport_move, {}, c, -1, "unload of absent carrier"});
        continue;
      }
      occupant.erase(it->second);
      where.erase(it);
    }

    for (const auto& l : rec.loads) {
      if (where.count(l.carrier)) {
        report.violations.push_back({tick, ViolationKind::teleport_move, l.at, l.carrier, -1,
                                     "carrier already loaded"});
        continue;
      }
      if (!layout.valid_position(l.at)) {
        report.violations.push_back({tick, ViolationKind::teleport_move, l.at, l.carrier, -1,
                                     "load at invalid position " + to_string(l.at)});
        continue;
      }
      auto occ = occupant.find(l.at);
      if (occ != occupant.end()) {
        report.violations.push_back(
            {tick, ViolationKind::double_occupancy, l.at, occ->second, l.carrier, "load onto occupied slot"});
        continue;
      }
      occupant[l.at] = l.carrier;
      where[l.carrier] = l.at;
    }

    // Moves apply simultaneously.
    std::map<CarrierId, const MoveItem*> moving;
    for (const auto& mv : rec.moves) {
      auto it = where.find(mv.carrier);
      if (it == where.end()) {
        report.violations.push_back(
            {tick, ViolationKind::teleport_move, mv.from, mv.carrier, -1, "move of absent carrier"});
        continue;
      }
      if (moving.count(mv.carrier)) {
        report.violations.push_back({tick, ViolationKind::teleport_move, mv.from, mv.carrier, -1,
                                     "carrier moved twice in one tick"});
        continue;
      }
      if (it->second != mv.from) {
        report.violations.push_back({tick, ViolationKind::teleport_move, mv.from, mv.carrier, -1,
                                     "carrier is at " + to_string(it->second) + ", not " +
                                         to_string(mv.from)});
        continue;
      }
      if (!layout.valid_position(mv.to) || !layout.rail_adjacent(mv.from, mv.to)) {
        report.violations.push_back({tick, ViolationKind::teleport_move, mv.from, mv.carrier, -1,
                                     to_string(mv.from) + " -> " + to_string(mv.to) +
                                         " is not a rail edge"});
        continue;
      }
      moving[mv.carrier] = &mv;
    }

    // Swap detection.
    for (const auto& [c, mv] : moving) {
      for (const auto& [c2, mv2] : moving) {
        if (c2 <= c) continue;
        if (mv->from == mv2->to && mv->to == mv2->from)
          report.violations.push_back({tick, ViolationKind::swap_conflict, mv->from, c, c2, ""});
      }
    }

    // Destination occupancy after all movers vacate.
    std::map<RailPos, CarrierId> next = occupant;
    for (const auto& [c, mv] : moving) next.erase(mv->from);
    for (const auto& [c, mv] : moving) {
      auto occ = next.find(mv->to);
      if (occ != next.end()) {
        report.violations.push_back(
            {tick, ViolationKind::double_occupancy, mv->to, occ->second, c, ""});
        continue;  // keep the earlier occupant; this carrier stays put if possible
      }
      next[mv->to] = c;
      where[c] = mv->to;
    }
    // Carriers whose move was dropped stay at their source when it is free.
    for (const auto& [c, mv] : moving) {
      if (where[c] == mv->to) continue;
      if (!next.count(mv->from)) {
        next[mv->from] = c;
        where[c] = mv->from;
      }
    }
    occupant = std::move(next);
  }
  return report;
}

}  // namespace florasim
