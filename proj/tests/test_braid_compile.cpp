#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <florasim/braid_program.hpp>
#include <florasim/braid_trace.hpp>

using namespace florasim;

namespace {

LayoutSpec figure_eight() {
  LayoutSpec spec;
  spec.modules = {{0, ModuleKind::driver, {0, 0}},
                  {1, ModuleKind::driver, {2, 0}},
                  {2, ModuleKind::transfer_switch, {1, 0}}};
  return spec;
}

Phase load(CarrierId c, FilamentId f, RailPos at) {
  Phase ph;
  ph.op = Phase::Op::load;
  ph.carrier = c;
  ph.filament = f;
  ph.at = at;
  return ph;
}

Phase tube(std::vector<int> rings, int ticks) {
  Phase ph;
  ph.op = Phase::Op::tube;
  ph.group = std::move(rings);
  ph.ticks = ticks;
  return ph;
}

Phase split(std::vector<int> rings, std::vector<int> a, std::vector<int> b, int fa, int fb) {
  Phase ph;
  ph.op = Phase::Op::split;
  ph.group = std::move(rings);
  ph.group_a = std::move(a);
  ph.group_b = std::move(b);
  ph.filaments_a = fa;
  ph.filaments_b = fb;
  return ph;
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::RuntimeFault;
}

}  // namespace

TEST_CASE("programs parse from JSON and write back stably") {
  const char* text = R"({"phases": [
    {"op": "load", "carrier": 0, "filament": 10, "position": [0, 0]},
    {"op": "set-switch", "switch": 2, "state": "transfer"},
    {"op": "tube", "rings": [0], "ticks": 4},
    {"op": "split", "rings": [0, 1], "into": [[0], [1]], "filaments": [1, 0]},
    {"op": "merge", "groups": [[0], [1]]},
    {"op": "unload", "carrier": 0}
  ]})";
  BraidProgram prog = parse_program(text);
  REQUIRE(prog.phases.size() == 6);
  CHECK(prog.phases[0].op == Phase::Op::load);
  CHECK(prog.phases[0].at == RailPos{0, 0});
  CHECK(prog.phases[1].state == SwitchState::transfer);
  CHECK(prog.phases[2].ticks == 4);
  CHECK(prog.phases[3].group_b == std::vector<int>{1});
  CHECK(prog.phases[3].filaments_a == 1);

  std::string out = write_program(prog);
  CHECK(write_program(parse_program(out)) == out);
}

TEST_CASE("program schema errors name their field") {
  auto err_text = [](const std::string& text) {
    try {
      parse_program(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(err_text("{") == "program: invalid JSON");
  CHECK(err_text(R"({"phases": [{"op": "hover"}]})") ==
        "program.phases[0].op: unknown op 'hover'");
  CHECK(err_text(R"({"phases": [{"op": "tube", "rings": [0]}]})") ==
        "program.phases[0]: missing field 'ticks'");
  CHECK(err_text(R"({"phases": [{"op": "tube", "rings": [0], "ticks": 1, "x": 2}]})") ==
        "program.phases[0]: unknown field 'x'");
  CHECK(err_text(R"({"phases": [{"op": "tube", "rings": [0], "ticks": -1}]})") ==
        "program.phases[0].ticks: expected >= 0");
  CHECK(err_text(R"({"phases": [{"op": "set-switch", "switch": 2, "state": "open"}]})") ==
        "program.phases[0].state: expected 'pass' or 'transfer'");
  CHECK(err_text(R"({"phases": [{"op": "split", "rings": [0], "into": [[0]], "filaments": [1, 1]}]})") ==
        "program.phases[0].into: expected two ring groups");
}

TEST_CASE("a lone carrier tours its ring and returns") {
  MachineLayout m = MachineLayout::build(figure_eight());
  BraidProgram prog;
  prog.phases = {load(0, 10, {0, 0}), tube({0}, 4)};
  CarrierSchedule s = compile_program(prog, m);

  REQUIRE(s.ticks.size() == 4);
  // The pending load lands on the first rotation tick; loads precede moves.
  REQUIRE(s.ticks[0].loads.size() == 1);
  CHECK(s.ticks[0].loads[0].at == RailPos{0, 0});
  CHECK(s.ticks[0].moves.size() == 1);
  CHECK(s.ticks[0].moves[0].from == RailPos{0, 0});
  CHECK(s.ticks[0].moves[0].to == RailPos{0, 1});

  CHECK(verify_schedule(s, m).valid());
  BraidTrace trace = execute_schedule(s, m);
  CHECK(trace.final_carriers.at(0).second == RailPos{0, 0});
  CHECK(trace.crossings.empty());
}

TEST_CASE("trailing items flush into a zero-move tick") {
  MachineLayout m = MachineLayout::build(figure_eight());
  BraidProgram prog;
  prog.phases = {load(0, 10, {0, 0})};
  CarrierSchedule s = compile_program(prog, m);
  REQUIRE(s.ticks.size() == 1);
  CHECK(s.ticks[0].loads.size() == 1);
  CHECK(s.ticks[0].moves.empty());
  CHECK(verify_schedule(s, m).valid());

  // An unload directly after its own load must not share the load's tick.
  Phase un;
  un.op = Phase::Op::unload;
  un.carrier = 0;
  prog.phases.push_back(un);
  s = compile_program(prog, m);
  REQUIRE(s.ticks.size() == 2);
  CHECK(s.ticks[0].loads.size() == 1);
  CHECK(s.ticks[1].unloads.size() == 1);
  CHECK(verify_schedule(s, m).valid());
}

TEST_CASE("split routes carriers through the gate and restores the switch") {
  MachineLayout m = MachineLayout::build(figure_eight());
  BraidProgram prog;
  prog.phases = {load(0, 10, {0, 0}), load(1, 11, {0, 2}),
                 split({0, 1}, {0}, {1}, 1, 1), tube({0, 1}, 4)};
  CarrierSchedule s = compile_program(prog, m);
  CHECK(verify_schedule(s, m).valid());

  BraidTrace trace = execute_schedule(s, m);
  int ring0 = m.ring_of(trace.final_carriers.at(0).second.module);
  int ring1 = m.ring_of(trace.final_carriers.at(1).second.module);
  CHECK(ring0 != ring1);

  // Whatever toggled must be back to pass by the end.
  int transfers = 0;
  int passes = 0;
  for (const TickRecord& rec : s.ticks)
    for (const SwitchItem& sw : rec.switches) {
      if (sw.state == SwitchState::transfer) ++transfers;
      if (sw.state == SwitchState::pass) ++passes;
    }
  CHECK(transfers == passes);
  CHECK(transfers >= 1);
}

TEST_CASE("split refuses impossible or ill-typed partitions") {
  MachineLayout m = MachineLayout::build(figure_eight());

  BraidProgram prog;
  prog.phases = {load(0, 10, {0, 0}), split({0, 1}, {0}, {1}, 2, 0)};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  prog.phases = {load(0, 10, {0, 0}), split({0}, {0}, {1}, 1, 0)};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  prog.phases = {load(0, 10, {0, 0}), split({0, 1}, {0}, {0}, 1, 0)};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  prog.phases = {load(0, 10, {0, 0}), split({0, 1}, {0}, {9}, 1, 0)};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  // Two rotors with no switch between them cannot exchange carriers.
  LayoutSpec apart;
  apart.modules = {{0, ModuleKind::driver, {0, 0}}, {1, ModuleKind::driver, {3, 0}}};
  MachineLayout m2 = MachineLayout::build(apart);
  prog.phases = {load(0, 10, {0, 0}), split({0, 1}, {0}, {1}, 0, 1)};
  CHECK(code_of([&] { compile_program(prog, m2); }) == ErrorCode::ProgramLayoutMismatch);
}

TEST_CASE("a split into a packed ring never routes") {
  MachineLayout m = MachineLayout::build(figure_eight());
  BraidProgram prog;
  prog.phases = {load(0, 10, {0, 0}), load(1, 11, {1, 0}), load(2, 12, {1, 1}),
                 load(3, 13, {1, 2}), load(4, 14, {1, 3}),
                 split({0, 1}, {0}, {1}, 0, 5)};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::UnroutableSplit);
}

TEST_CASE("load and switch validation") {
  MachineLayout m = MachineLayout::build(figure_eight());
  BraidProgram prog;

  prog.phases = {load(0, 10, {0, 7})};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  prog.phases = {load(0, 10, {0, 0}), load(1, 11, {0, 0})};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  prog.phases = {load(0, 10, {0, 0}), load(0, 11, {0, 1})};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  prog.phases = {load(0, 10, {0, 0}), load(1, 10, {0, 1})};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  Phase sw;
  sw.op = Phase::Op::set_switch;
  sw.sw = 9;
  sw.state = SwitchState::transfer;
  prog.phases = {sw};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  Phase un;
  un.op = Phase::Op::unload;
  un.carrier = 5;
  prog.phases = {un};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);
}

TEST_CASE("a transfer into a stationary occupied ring is a compile error") {
  MachineLayout m = MachineLayout::build(figure_eight());
  Phase sw;
  sw.op = Phase::Op::set_switch;
  sw.sw = 2;
  sw.state = SwitchState::transfer;
  // Carrier 1 parks on the landing slot of ring 1 and never rotates.
  BraidProgram prog;
  prog.phases = {load(0, 10, {0, 0}), load(1, 11, {1, 3}), sw, tube({0}, 1)};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);
}

TEST_CASE("merge validates ring groups, then is pure bookkeeping") {
  MachineLayout m = MachineLayout::build(figure_eight());
  Phase mg;
  mg.op = Phase::Op::merge;
  mg.group_a = {0};
  mg.group_b = {0};
  BraidProgram prog;
  prog.phases = {mg};
  CHECK(code_of([&] { compile_program(prog, m); }) == ErrorCode::ProgramLayoutMismatch);

  mg.group_b = {1};
  prog.phases = {load(0, 10, {0, 0}), mg, tube({0, 1}, 4)};
  CarrierSchedule s = compile_program(prog, m);
  CHECK(s.ticks.size() == 4);
  CHECK(verify_schedule(s, m).valid());
}

TEST_CASE("every compiled schedule survives its own verifier") {
  MachineLayout m = MachineLayout::build(figure_eight());
  BraidProgram prog;
  Phase un;
  un.op = Phase::Op::unload;
  un.carrier = 1;
  prog.phases = {load(0, 10, {0, 0}), load(1, 11, {0, 2}), tube({0}, 7),
                 split({0, 1}, {0}, {1}, 1, 1), tube({0, 1}, 9),
                 split({0, 1}, {0}, {1}, 2, 0), un, tube({0}, 3)};
  CarrierSchedule s = compile_program(prog, m);
  VerificationReport rep = verify_schedule(s, m);
  CHECK(rep.to_text() == "violations 0\n");
  // And the round-tripped text form executes to the same trace.
  CarrierSchedule back = read_schedule(write_schedule(s));
  CHECK(trace_to_word(execute_schedule(back, m)) == trace_to_word(execute_schedule(s, m)));
}
