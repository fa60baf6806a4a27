#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "florasim/braid_program.hpp"
#include "florasim/node.hpp"
#include "florasim/plant.hpp"
#include "florasim/scaffold.hpp"
#include "florasim/stimulus.hpp"
#include "florasim/vmc.hpp"

namespace florasim {

struct NodeSpec {
  int id = 0;
  Vec3 pos;
  NodeRole role = NodeRole::idle;
};

struct TipSpec {
  int id = 0;
  SegmentId segment = 0;
  double frac = 0.0;
};

struct DamageEvent {
  int tick = 0;
  std::string region;
};

// Alternative scaffold origin: compile and execute a braiding program, then
// read the produced tube topology back as scaffold geometry.
struct BraidSource {
  LayoutSpec layout;
  BraidProgram program;
  double extrusion_rate = 1.0;  // mm of tube per machine tick
};

struct EngineParams {
  int ticks = 100;
  std::uint64_t seed = 1;
  int vmc_interval = 10;        // structure control runs on ticks = 0 mod this
  double led_power = 4.0;       // stimulus intensity of a full-duty LED
  double branch_length = 50.0;  // mm, new child segments
  double branch_angle_deg = 30.0;
  double repair_threshold = 0.95;
};

struct ScenarioConfig {
  std::optional<ScaffoldSpec> scaffold;
  std::optional<BraidSource> braid;
  std::vector<Region> regions;
  std::vector<NodeSpec> nodes;
  std::vector<StimulusSource> sources;  // static emitters
  std::array<double, kStimulusKinds> ambient{0.0, 0.0, 0.0};
  std::vector<TipSpec> tips;
  std::vector<DamageEvent> damage;
  PlantParams plant;
  NodeParams node;
  VmcParams vmc;
  EngineParams engine;
};

ScaffoldSpec scaffold_from_braid(const BraidSource& source);

struct WorldState {
  ScaffoldGraph graph;
  VmcState vmc;
  PlantState plant;
  std::vector<RoboticNode> nodes;  // ascending id
  StimulusField field;
  int tick = 0;
};

struct TipReport {
  int id = 0;
  SegmentId segment = 0;
  double frac = 0.0;
  Vec3 pos;
  bool stopped = false;
};

struct NodeReport {
  int id = 0;
  double filtered = 0.0;
  bool detected = false;
  double led_blue = 0.0;
  double led_far_red = 0.0;
};

struct TickReport {
  int tick = 0;
  std::map<std::string, double> coverage;  // per region id
  double covered_length = 0.0;
  int segments = 0;
  std::vector<TipReport> tips;
  std::vector<NodeReport> nodes;
  std::vector<std::string> events;  // branch/prune/damage notes
};

struct RegionRepair {
  std::string region;
  int damage_tick = 0;
  double baseline = 0.0;       // coverage just before the hit
  double final_coverage = 0.0;
  int repaired_tick = -1;      // first tick back above threshold, -1 if never
  bool repaired = false;
};

struct BenchmarkResult {
  bool passed = false;
  bool windows_clear = false;
  std::vector<RegionRepair> repairs;
};

class Engine {
 public:
  explicit Engine(const ScenarioConfig& config);

  const ScenarioConfig& config() const { return cfg_; }
  const WorldState& world() const { return world_; }
  const std::vector<TickReport>& history() const { return history_; }

  // One tick: sense, actuate, refresh stimuli, periodic structure control,
  // growth, scheduled damage, metrics.
  TickReport step();

  // Runs the configured tick count (continuing from the current tick).
  void run();

  // Judges the self-repair run recorded so far: window regions must stay
  // empty and every damaged region must recover to threshold * baseline.
  BenchmarkResult evaluate() const;

 private:
  void apply_structure_control(TickReport& report);
  void rebuild_field();

  ScenarioConfig cfg_;
  WorldState world_;
  Rng rng_;
  std::vector<TickReport> history_;
  std::map<std::string, const Region*> regions_;
};

}  // namespace florasim
