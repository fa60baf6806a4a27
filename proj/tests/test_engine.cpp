#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "florasim/engine.hpp"
#include "florasim/error.hpp"

using namespace florasim;

namespace {

ScaffoldSpec line_spec(double len = 100.0, int filaments = 2) {
  ScaffoldSpec spec;
  spec.nodes = {{0, {0, 0, 0}}, {1, {0, len, 0}}};
  spec.segments = {{1, 0, 1, filaments, false}};
  spec.root = 0;
  return spec;
}

ScenarioConfig line_scenario(int ticks) {
  ScenarioConfig cfg;
  cfg.scaffold = line_spec();
  cfg.tips = {{0, 1, 0.0}};
  cfg.plant.base_rate = 2.0;
  cfg.engine.ticks = ticks;
  cfg.engine.vmc_interval = 100000;  // keep structure control out of the way
  cfg.vmc.theta_branch = 2.0;
  return cfg;
}

int count_events(const Engine& eng, const std::string& needle) {
  int n = 0;
  for (const TickReport& rep : eng.history())
    for (const std::string& ev : rep.events)
      if (ev == needle) ++n;
  return n;
}

template <typename Fn>
std::optional<ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("run is deterministic per seed and varies across seeds") {
  auto scenario = [](std::uint64_t seed) {
    ScenarioConfig cfg = line_scenario(40);
    cfg.plant.deterministic = false;
    cfg.nodes = {{0, {5, 30, 0}, NodeRole::repeller}};
    cfg.engine.seed = seed;
    return cfg;
  };

  Engine a(scenario(7)), b(scenario(7)), c(scenario(8));
  a.run();
  b.run();
  c.run();

  REQUIRE(a.history().size() == 40);
  REQUIRE(b.history().size() == 40);
  bool differs_from_c = false;
  for (size_t t = 0; t < a.history().size(); ++t) {
    const TickReport &ra = a.history()[t], &rb = b.history()[t];
    CHECK(ra.covered_length == rb.covered_length);
    REQUIRE(ra.nodes.size() == 1);
    CHECK(ra.nodes[0].filtered == rb.nodes[0].filtered);
    differs_from_c = differs_from_c || ra.nodes[0].filtered != c.history()[t].nodes[0].filtered;
  }
  CHECK(differs_from_c);
}

TEST_CASE("run continues from the current tick and stops at the budget") {
  Engine eng(line_scenario(10));
  eng.step();
  eng.step();
  eng.step();
  CHECK(eng.history().size() == 3);
  eng.run();
  CHECK(eng.history().size() == 10);
  CHECK(eng.world().tick == 10);
  eng.run();  // budget already spent
  CHECK(eng.history().size() == 10);
}

TEST_CASE("a hot leaf branches with split filaments and fresh ids") {
  ScenarioConfig cfg;
  cfg.scaffold = line_spec(10.0, 4);
  cfg.tips = {{0, 1, 0.0}};
  cfg.engine.ticks = 1;
  cfg.engine.vmc_interval = 1;
  Engine eng(cfg);
  TickReport rep = eng.step();

  // The lone leaf holds the whole resource, well over the branch threshold.
  REQUIRE(rep.events.size() == 1);
  CHECK(rep.events[0] == "branch node 1");
  CHECK(rep.segments == 3);

  const ScaffoldGraph& g = eng.world().graph;
  REQUIRE(g.has_node(2));
  REQUIRE(g.has_node(3));
  // Children fan out at +-30 degrees from the trunk direction, 50 mm long.
  CHECK(g.node(2).pos.x == doctest::Approx(-25.0));
  CHECK(g.node(2).pos.y == doctest::Approx(10.0 + 50.0 * std::sqrt(3.0) / 2.0));
  CHECK(g.node(3).pos.x == doctest::Approx(25.0));
  CHECK(g.node(3).pos.y == doctest::Approx(10.0 + 50.0 * std::sqrt(3.0) / 2.0));
  CHECK(g.segment(2).from == 1);
  CHECK(g.segment(2).to == 2);
  CHECK(g.segment(2).filaments == 2);
  CHECK(g.segment(3).filaments == 2);
  CHECK(eng.world().vmc.at(2).vessel == 1.0);
  CHECK(eng.world().vmc.at(3).vessel == 1.0);
}

TEST_CASE("branching is skipped silently when the parent is too thin") {
  ScenarioConfig cfg;
  cfg.scaffold = line_spec(10.0, 1);
  cfg.tips = {{0, 1, 0.0}};
  cfg.engine.ticks = 1;
  cfg.engine.vmc_interval = 1;
  Engine eng(cfg);
  TickReport rep = eng.step();
  CHECK(rep.events.empty());
  CHECK(rep.segments == 1);
}

TEST_CASE("starved limbs are pruned on paper only") {
  ScenarioConfig cfg;
  ScaffoldSpec spec;
  spec.nodes = {{0, {0, 0, 0}}, {1, {0, 16, 0}}, {2, {-8, 22, 0}}, {3, {8, 22, 0}}};
  spec.segments = {{1, 0, 1, 4, false}, {2, 1, 2, 2, false}, {3, 1, 3, 1, false}};
  spec.root = 0;
  cfg.scaffold = spec;
  cfg.tips = {{0, 1, 0.0}};
  cfg.plant.base_rate = 0.0;
  cfg.engine.ticks = 100;
  cfg.engine.vmc_interval = 1;
  cfg.vmc.theta_branch = 0.6;
  Region blocked;
  blocked.id = "attic";
  blocked.label = RegionLabel::occupied_space;
  blocked.box = {{4, 18, -1}, {12, 26, 1}};  // node 3 only
  blocked.occupancy = 1.0;
  cfg.regions = {blocked};
  Engine eng(cfg);
  eng.run();

  // The favoured leaf eventually hoards enough resource to branch once; the
  // starved one decays below the prune threshold but its braid stays put.
  CHECK(count_events(eng, "branch node 2") == 1);
  CHECK(count_events(eng, "prune node 3") >= 1);
  const ScaffoldGraph& g = eng.world().graph;
  CHECK(g.has_segment(3));
  REQUIRE(g.children(2).size() == 2);
  int branch_events = 0;
  for (const TickReport& rep : eng.history())
    for (const std::string& ev : rep.events)
      if (ev.rfind("branch", 0) == 0) ++branch_events;
  CHECK(branch_events == 1);

  // Filament re-apportioning conserves each node's budget.
  CHECK(g.segment(2).filaments + g.segment(3).filaments == 4);
  int grandkids = 0;
  for (SegmentId s : g.children(2)) grandkids += g.segment(s).filaments;
  CHECK(grandkids == g.segment(2).filaments);
  CHECK(g.segment(3).filaments >= 1);
}

TEST_CASE("damage clears the box and takes walkers inside it") {
  ScenarioConfig cfg = line_scenario(40);
  Region dmg;
  dmg.id = "hole";
  dmg.label = RegionLabel::damage;
  dmg.box = {{-5, 40, -5}, {5, 60, 5}};
  cfg.regions = {dmg};

  SUBCASE("a walker past the box survives") {
    cfg.damage = {{30, "hole"}};
    Engine eng(cfg);
    eng.run();
    const TickReport& hit = eng.history()[30];
    REQUIRE(hit.events.size() == 1);
    CHECK(hit.events[0] == "damage hole");
    CHECK(hit.coverage.at("hole") == 0.0);
    CHECK(hit.covered_length == doctest::Approx(42.0));
    CHECK(hit.tips.size() == 1);
    // Growth goes on ahead of the gap.
    CHECK(eng.history()[39].covered_length > hit.covered_length);
  }

  SUBCASE("a walker standing in the box is destroyed") {
    cfg.damage = {{25, "hole"}};
    Engine eng(cfg);
    eng.run();
    const TickReport& hit = eng.history()[25];
    CHECK(hit.tips.empty());
    CHECK(hit.coverage.at("hole") == 0.0);
    CHECK(eng.history()[39].covered_length == hit.covered_length);
  }
}

TEST_CASE("evaluate judges windows and recovery") {
  ScenarioConfig cfg = line_scenario(60);
  cfg.tips = {{0, 1, 0.0}, {1, 1, 0.3}};
  Region dmg;
  dmg.id = "gap";
  dmg.label = RegionLabel::damage;
  dmg.box = {{-5, 40, -5}, {5, 60, 5}};
  Region win;
  win.id = "porthole";
  win.label = RegionLabel::window;
  win.box = {{50, 0, -5}, {60, 10, 5}};  // off the scaffold entirely
  cfg.regions = {dmg, win};

  SUBCASE("the trailing walker re-covers the gap") {
    cfg.damage = {{10, "gap"}};
    Engine eng(cfg);
    eng.run();
    BenchmarkResult res = eng.evaluate();
    CHECK(res.windows_clear);
    REQUIRE(res.repairs.size() == 1);
    const RegionRepair& rr = res.repairs[0];
    CHECK(rr.region == "gap");
    CHECK(rr.damage_tick == 10);
    CHECK(rr.baseline == doctest::Approx(0.5));
    CHECK(rr.repaired);
    CHECK(rr.repaired_tick == 24);
    CHECK(rr.final_coverage == doctest::Approx(1.0));
    CHECK(res.passed);
  }

  SUBCASE("only the last hit counts, and an unhealed one fails the run") {
    cfg.damage = {{10, "gap"}, {58, "gap"}};
    Engine eng(cfg);
    eng.run();
    BenchmarkResult res = eng.evaluate();
    CHECK(res.windows_clear);
    REQUIRE(res.repairs.size() == 1);
    CHECK(res.repairs[0].damage_tick == 58);
    CHECK(res.repairs[0].baseline == doctest::Approx(1.0));
    CHECK_FALSE(res.repairs[0].repaired);
    CHECK(res.repairs[0].repaired_tick == -1);
    CHECK(res.repairs[0].final_coverage == 0.0);
    CHECK_FALSE(res.passed);
  }

  SUBCASE("growth through a window fails the run") {
    Region bad;
    bad.id = "bad_window";
    bad.label = RegionLabel::window;
    bad.box = {{-5, 0, -5}, {5, 10, 5}};  // the trunk grows right through
    cfg.regions = {dmg, win, bad};
    cfg.damage = {{10, "gap"}};
    Engine eng(cfg);
    eng.run();
    BenchmarkResult res = eng.evaluate();
    CHECK_FALSE(res.windows_clear);
    CHECK_FALSE(res.passed);
  }
}

TEST_CASE("led commits are atomic and relays run a tick behind") {
  ScenarioConfig cfg = line_scenario(4);
  cfg.plant.base_rate = 0.0;  // hold the tip still at the origin
  cfg.node.noise_sigma = 0.0;
  cfg.nodes = {{0, {0, 10, 0}, NodeRole::attractor}, {1, {0, 60, 0}, NodeRole::attractor}};
  Engine eng(cfg);
  eng.run();

  const TickReport& t0 = eng.history()[0];
  REQUIRE(t0.nodes.size() == 2);
  // Node 0 stands 1 cm from the tip and fires immediately; node 1 reads only
  // the previous (dark) tick of its neighbour.
  CHECK(t0.nodes[0].detected);
  CHECK(t0.nodes[0].led_blue == 1.0);
  CHECK_FALSE(t0.nodes[1].detected);
  CHECK(t0.nodes[1].led_blue == 0.0);

  // 5 cm away the relayed reading is 1/25 = 0.04: beacon tier only.
  const TickReport& t1 = eng.history()[1];
  CHECK(t1.nodes[1].led_blue == 0.2);
  CHECK(eng.history()[2].nodes[1].led_blue == 0.2);
}

TEST_CASE("a flooded sensor holds the last good estimate") {
  ScenarioConfig cfg = line_scenario(12);
  cfg.plant.base_rate = 0.0;
  cfg.node.noise_sigma = 0.0;
  cfg.nodes = {{0, {0, 2, 0}, NodeRole::repeller}};  // point blank
  Engine eng(cfg);
  eng.run();

  // First tick: no far-red yet, sample valid, raw 4/0.04 clamps to 100.
  CHECK(eng.history()[0].nodes[0].detected);
  CHECK(eng.history()[0].nodes[0].led_far_red == 1.0);
  // Its own far-red then floods every later sample, but the buffered one
  // keeps the filter alive until it ages out, after which the value holds.
  for (int t = 1; t < 12; ++t) {
    CHECK(eng.history()[t].nodes[0].led_far_red == 1.0);
    CHECK(eng.history()[t].nodes[0].filtered == doctest::Approx(100.0));
  }
}

TEST_CASE("scaffold geometry can come from a braiding program") {
  BraidSource src;
  src.layout.modules = {{0, ModuleKind::driver, {0, 0}},
                        {2, ModuleKind::transfer_switch, {1, 0}},
                        {1, ModuleKind::driver, {2, 0}}};
  Phase load0;
  load0.op = Phase::Op::load;
  load0.carrier = 0;
  load0.filament = 1;
  load0.at = {0, 0};
  Phase load1;
  load1.op = Phase::Op::load;
  load1.carrier = 1;
  load1.filament = 2;
  load1.at = {1, 2};
  Phase trunk;
  trunk.op = Phase::Op::tube;
  trunk.group = {0, 1};
  trunk.ticks = 5;
  Phase split;
  split.op = Phase::Op::split;
  split.group = {0, 1};
  split.group_a = {0};
  split.group_b = {1};
  split.filaments_a = 1;
  split.filaments_b = 1;
  Phase arm_a;
  arm_a.op = Phase::Op::tube;
  arm_a.group = {0};
  arm_a.ticks = 4;
  Phase arm_b;
  arm_b.op = Phase::Op::tube;
  arm_b.group = {1};
  arm_b.ticks = 4;
  Phase merge;
  merge.op = Phase::Op::merge;
  merge.group_a = {0};
  merge.group_b = {1};
  Phase crown;
  crown.op = Phase::Op::tube;
  crown.group = {0, 1};
  crown.ticks = 3;
  src.program.phases = {load0, load1, trunk, split, arm_a, arm_b, merge, crown};

  ScaffoldSpec spec = scaffold_from_braid(src);
  ScaffoldGraph g = ScaffoldGraph::build(spec);  // validates shape

  REQUIRE(spec.nodes.size() == 6);
  REQUIRE(spec.segments.size() == 6);
  CHECK(g.node(1).pos == Vec3{0, 5, 0});
  const double rise = 4.0 * std::sqrt(3.0) / 2.0;
  CHECK(g.node(2).pos.x == doctest::Approx(-2.0));
  CHECK(g.node(2).pos.y == doctest::Approx(5.0 + rise));
  CHECK(g.node(3).pos.x == doctest::Approx(2.0));
  CHECK(g.node(4).pos.x == doctest::Approx(0.0));
  CHECK(g.node(5).pos.y == doctest::Approx(5.0 + rise + 3.0));

  CHECK(g.segment(0).filaments == 2);
  CHECK_FALSE(g.segment(0).fusion);
  CHECK(g.segment(1).filaments == 1);
  CHECK(g.segment(2).filaments == 1);
  CHECK_FALSE(g.segment(3).fusion);
  CHECK(g.segment(4).fusion);  // the re-joining arm fuses in
  CHECK(g.segment(5).filaments == 2);

  // The same source drives an engine end to end.
  ScenarioConfig cfg;
  cfg.braid = src;
  cfg.tips = {{0, 0, 0.0}};
  cfg.engine.ticks = 3;
  cfg.engine.vmc_interval = 100000;
  cfg.vmc.theta_branch = 2.0;
  Engine eng(cfg);
  eng.run();
  CHECK(eng.history().size() == 3);
  CHECK(eng.history()[2].covered_length > 0.0);
}

TEST_CASE("braid-derived scaffolds reject nonsense programs") {
  BraidSource src;
  src.layout.modules = {{0, ModuleKind::driver, {0, 0}},
                        {2, ModuleKind::transfer_switch, {1, 0}},
                        {1, ModuleKind::driver, {2, 0}}};
  Phase load0;
  load0.op = Phase::Op::load;
  load0.carrier = 0;
  load0.filament = 1;
  load0.at = {0, 0};
  Phase tube;
  tube.op = Phase::Op::tube;
  tube.group = {0};
  tube.ticks = 4;

  auto derive = [&](std::vector<Phase> phases, double rate = 1.0) {
    BraidSource s = src;
    s.program.phases = std::move(phases);
    s.extrusion_rate = rate;
    return code_of([&] { scaffold_from_braid(s); });
  };

  CHECK(derive({load0, tube}) == std::nullopt);
  CHECK(derive({load0, tube}, 0.0) == ErrorCode::ConfigError);
  CHECK(derive({tube}) == ErrorCode::ConfigError);   // nothing loaded
  CHECK(derive({load0}) == ErrorCode::ConfigError);  // no geometry at all

  Phase late_load = load0;
  late_load.carrier = 1;
  late_load.filament = 2;
  late_load.at = {0, 2};
  CHECK(derive({load0, tube, late_load}) == ErrorCode::ConfigError);

  Phase wrong_rings = tube;
  wrong_rings.group = {1};
  CHECK(derive({load0, wrong_rings}) == ErrorCode::ConfigError);

  Phase zero_tube = tube;
  zero_tube.ticks = 0;
  CHECK(derive({load0, zero_tube}) == ErrorCode::ConfigError);
}

TEST_CASE("scenario validation catches broken wiring") {
  CHECK(code_of([] {
    ScenarioConfig cfg;  // neither scaffold nor braid
    Engine eng(cfg);
  }) == ErrorCode::ConfigError);

  CHECK(code_of([] {
    ScenarioConfig cfg = line_scenario(10);
    cfg.braid = BraidSource{};  // both given
    Engine eng(cfg);
  }) == ErrorCode::ConfigError);

  auto broken = [](auto mutate, ErrorCode want) {
    ScenarioConfig cfg = line_scenario(10);
    Region r;
    r.id = "zone";
    r.label = RegionLabel::damage;
    r.box = {{-1, -1, -1}, {1, 1, 1}};
    cfg.regions = {r};
    mutate(cfg);
    CHECK(code_of([&] { Engine eng(cfg); }) == want);
  };

  broken([](ScenarioConfig& c) { c.regions.push_back(c.regions[0]); }, ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.damage = {{5, "elsewhere"}}; }, ErrorCode::ReferenceError);
  broken([](ScenarioConfig& c) { c.damage = {{10, "zone"}}; }, ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.damage = {{-1, "zone"}}; }, ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.tips.push_back({0, 1, 0.5}); }, ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.tips = {{0, 9, 0.0}}; }, ErrorCode::ReferenceError);
  broken([](ScenarioConfig& c) { c.tips = {{0, 1, 1.5}}; }, ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.nodes = {{4, {0, 0, 0}, NodeRole::idle},
                                            {4, {1, 0, 0}, NodeRole::idle}}; },
         ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.engine.vmc_interval = 0; }, ErrorCode::ConfigError);
  broken([](ScenarioConfig& c) { c.engine.ticks = -1; }, ErrorCode::ConfigError);
}
