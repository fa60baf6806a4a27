#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "florasim/braid_program.hpp"
#include "florasim/braid_trace.hpp"
#include "florasim/config.hpp"
#include "florasim/engine.hpp"
#include "florasim/vmc.hpp"

using namespace florasim;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string scenario(const std::string& name) {
  return std::string(FLORASIM_SCENARIOS) + "/" + name;
}

ScaffoldGraph balanced_tree(int depth) {
  ScaffoldSpec spec;
  int next = 0;
  spec.nodes.push_back({next++, {0, 0, 0}});
  std::vector<int> frontier = {0};
  for (int level = 0; level < depth; ++level) {
    std::vector<int> grown;
    for (int parent : frontier) {
      for (int k = 0; k < 2; ++k) {
        const int id = next++;
        spec.nodes.push_back({id, {static_cast<double>(id), static_cast<double>(level), 0}});
        spec.segments.push_back({id, parent, id, 1, false});
        grown.push_back(id);
      }
    }
    frontier = grown;
  }
  spec.root = 0;
  return ScaffoldGraph::build(spec);
}

void BM_VmcStep(benchmark::State& state) {
  const ScaffoldGraph graph = balanced_tree(5);
  const VmcParams params;
  LeafScores scores;
  for (NodeId leaf : graph.leaves()) scores[leaf] = 1.0;
  VmcState vmc = init_state(graph, params);
  for (auto _ : state) {
    VmcStepResult r = vmc_step(graph, vmc, scores, params);
    vmc = std::move(r.state);
    benchmark::DoNotOptimize(vmc);
  }
}
BENCHMARK(BM_VmcStep);

void BM_CompileTubeSplit(benchmark::State& state) {
  const MachineLayout layout =
      MachineLayout::build(parse_layout_spec(read_file(scenario("two_rings_layout.json"))));
  const BraidProgram program = parse_program(read_file(scenario("tube_split_program.json")));
  for (auto _ : state) {
    CarrierSchedule schedule = compile_program(program, layout);
    benchmark::DoNotOptimize(schedule);
  }
}
BENCHMARK(BM_CompileTubeSplit);

void BM_VerifySchedule(benchmark::State& state) {
  const MachineLayout layout =
      MachineLayout::build(parse_layout_spec(read_file(scenario("two_rings_layout.json"))));
  const BraidProgram program = parse_program(read_file(scenario("tube_split_program.json")));
  const CarrierSchedule schedule = compile_program(program, layout);
  for (auto _ : state) {
    VerificationReport report = verify_schedule(schedule, layout);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_VerifySchedule);

void BM_ExecuteSchedule(benchmark::State& state) {
  const MachineLayout layout =
      MachineLayout::build(parse_layout_spec(read_file(scenario("two_rings_layout.json"))));
  const BraidProgram program = parse_program(read_file(scenario("tube_split_program.json")));
  const CarrierSchedule schedule = compile_program(program, layout);
  for (auto _ : state) {
    BraidTrace trace = execute_schedule(schedule, layout);
    benchmark::DoNotOptimize(trace);
  }
}
BENCHMARK(BM_ExecuteSchedule);

void BM_RegionCoverage(benchmark::State& state) {
  const ScenarioConfig cfg = parse_config(read_file(scenario("benchmark_wall.json")));
  const ScaffoldGraph graph = ScaffoldGraph::build(*cfg.scaffold);
  Coverage cover;
  for (const auto& [id, seg] : graph.segments()) cover.add(id, 0.0, 1.0);
  const Box& box = cfg.regions[1].box;
  for (auto _ : state) {
    double covered = region_coverage(graph, cover, box);
    benchmark::DoNotOptimize(covered);
  }
}
BENCHMARK(BM_RegionCoverage);

void BM_EngineTick(benchmark::State& state) {
  const ScenarioConfig cfg = parse_config(read_file(scenario("benchmark_wall.json")));
  Engine engine(cfg);
  for (auto _ : state) {
    TickReport report = engine.step();
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_EngineTick);

}  // namespace

BENCHMARK_MAIN();
