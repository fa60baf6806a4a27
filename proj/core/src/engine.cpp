#include "florasim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "florasim/braid_trace.hpp"
#include "florasim/error.hpp"

namespace florasim {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 rotate_xy(const Vec3& v, double degrees) {
  double rad = degrees * kPi / 180.0;
  double c = std::cos(rad);
  double s = std::sin(rad);
  return {v.x * c - v.y * s, v.x * s + v.y * c, v.z};
}

// Open tube end while deriving scaffold geometry from a braiding program.
struct GroupHead {
  std::set<int> rings;
  NodeId node = 0;
  Vec3 pos;
  Vec3 heading{0.0, 1.0, 0.0};
  int filaments = 0;
};

constexpr double kSplitAngleDeg = 30.0;

}  // namespace

ScaffoldSpec scaffold_from_braid(const BraidSource& source) {
  MachineLayout layout = MachineLayout::build(source.layout);
  compile_program(source.program, layout);  // feasibility gate

  if (source.extrusion_rate <= 0.0)
    raise(ErrorCode::ConfigError, "braid.extrusion_rate must be positive");

  ScaffoldSpec spec;
  spec.root = 0;
  spec.nodes.push_back({0, Vec3{0.0, 0.0, 0.0}});
  NodeId next_node = 1;
  SegmentId next_seg = 0;

  std::vector<GroupHead> groups;
  auto find_group = [&](const std::vector<int>& rings, const std::string& where) {
    std::set<int> want(rings.begin(), rings.end());
    for (size_t i = 0; i < groups.size(); ++i)
      if (groups[i].rings == want) return i;
    raise(ErrorCode::ConfigError, where + ": rings do not name a current tube group");
  };

  bool growth_started = false;
  int loaded = 0;
  std::set<int> loaded_rings;
  int idx = 0;
  for (const Phase& ph : source.program.phases) {
    std::string where = "braid.program phase " + std::to_string(idx++);
    switch (ph.op) {
      case Phase::Op::load:
        if (growth_started)
          raise(ErrorCode::ConfigError, where + ": loads must precede tube growth");
        ++loaded;
        loaded_rings.insert(layout.ring_of(ph.at.module));
        break;
      case Phase::Op::unload:
      case Phase::Op::set_switch:
        break;
      case Phase::Op::tube: {
        if (!growth_started) {
          if (loaded == 0)
            raise(ErrorCode::ConfigError, "braid.program: no filaments loaded before growth");
          groups.push_back(GroupHead{loaded_rings, 0, Vec3{0.0, 0.0, 0.0},
                                     Vec3{0.0, 1.0, 0.0}, loaded});
          growth_started = true;
        }
        size_t g = find_group(ph.group, where);
        double len = ph.ticks * source.extrusion_rate;
        if (len <= 0.0) raise(ErrorCode::ConfigError, where + ": tube adds no length");
        GroupHead& head = groups[g];
        Vec3 tip = head.pos + head.heading * len;
        spec.nodes.push_back({next_node, tip});
        spec.segments.push_back({next_seg, head.node, next_node, head.filaments, false});
        head.node = next_node;
        head.pos = tip;
        ++next_node;
        ++next_seg;
        break;
      }
      case Phase::Op::split: {
        if (!growth_started)
          raise(ErrorCode::ConfigError, where + ": split before any tube growth");
        size_t g = find_group(ph.group, where);
        GroupHead head = groups[g];
        if (ph.filaments_a + ph.filaments_b != head.filaments)
          raise(ErrorCode::ConfigError, where + ": split counts do not sum to the group's filaments");
        groups.erase(groups.begin() + static_cast<long>(g));
        GroupHead a{std::set<int>(ph.group_a.begin(), ph.group_a.end()), head.node, head.pos,
                    normalized(rotate_xy(head.heading, kSplitAngleDeg)), ph.filaments_a};
        GroupHead b{std::set<int>(ph.group_b.begin(), ph.group_b.end()), head.node, head.pos,
                    normalized(rotate_xy(head.heading, -kSplitAngleDeg)), ph.filaments_b};
        groups.push_back(a);
        groups.push_back(b);
        break;
      }
      case Phase::Op::merge: {
        if (!growth_started)
          raise(ErrorCode::ConfigError, where + ": merge before any tube growth");
        size_t ga = find_group(ph.group_a, where);
        size_t gb = find_group(ph.group_b, where);
        GroupHead a = groups[ga];
        GroupHead b = groups[gb];
        if (a.node == b.node)
          raise(ErrorCode::ConfigError, where + ": merging groups that never grew apart");
        // The side holding the lowest ring id stays the trunk; the other tube
        // end fuses back in without becoming a tree edge.
        if (*b.rings.begin() < *a.rings.begin()) std::swap(a, b);
        Vec3 mid = lerp(a.pos, b.pos, 0.5);
        spec.nodes.push_back({next_node, mid});
        spec.segments.push_back({next_seg++, a.node, next_node, a.filaments, false});
        spec.segments.push_back({next_seg++, b.node, next_node, b.filaments, true});
        GroupHead joined;
        joined.rings = a.rings;
        joined.rings.insert(b.rings.begin(), b.rings.end());
        joined.node = next_node;
        joined.pos = mid;
        joined.heading = normalized(a.heading + b.heading);
        if (norm(joined.heading) == 0.0) joined.heading = a.heading;
        joined.filaments = a.filaments + b.filaments;
        ++next_node;
        auto lo = std::min(ga, gb);
        auto hi = std::max(ga, gb);
        groups.erase(groups.begin() + static_cast<long>(hi));
        groups.erase(groups.begin() + static_cast<long>(lo));
        groups.push_back(joined);
        break;
      }
    }
  }
  if (!growth_started)
    raise(ErrorCode::ConfigError, "braid.program produced no scaffold geometry");
  return spec;
}

Engine::Engine(const ScenarioConfig& config)
    : cfg_(config), world_{}, rng_(config.engine.seed) {
  if (cfg_.scaffold.has_value() == cfg_.braid.has_value())
    raise(ErrorCode::ConfigError, "exactly one of scaffold and braid must be given");
  ScaffoldSpec spec = cfg_.scaffold ? *cfg_.scaffold : scaffold_from_braid(*cfg_.braid);
  world_.graph = ScaffoldGraph::build(spec);
  world_.vmc = init_state(world_.graph, cfg_.vmc);

  for (const Region& r : cfg_.regions) {
    if (!regions_.emplace(r.id, &r).second)
      raise(ErrorCode::ConfigError, "duplicate region id '" + r.id + "'");
  }
  for (const DamageEvent& ev : cfg_.damage) {
    if (!regions_.count(ev.region))
      raise(ErrorCode::ReferenceError, "damage event names unknown region '" + ev.region + "'");
    if (ev.tick < 0 || ev.tick >= cfg_.engine.ticks)
      raise(ErrorCode::ConfigError, "damage tick " + std::to_string(ev.tick) + " outside the run");
  }

  std::set<int> tip_ids;
  for (const TipSpec& t : cfg_.tips) {
    if (!tip_ids.insert(t.id).second)
      raise(ErrorCode::ConfigError, "duplicate tip id " + std::to_string(t.id));
    if (!world_.graph.has_segment(t.segment))
      raise(ErrorCode::ReferenceError,
            "tip " + std::to_string(t.id) + " names unknown segment " + std::to_string(t.segment));
    if (t.frac < 0.0 || t.frac > 1.0)
      raise(ErrorCode::ConfigError, "tip " + std::to_string(t.id) + " fraction outside 0..1");
    world_.plant.tips.push_back(GrowthTip{t.id, t.segment, t.frac, false});
  }
  std::sort(world_.plant.tips.begin(), world_.plant.tips.end(),
            [](const GrowthTip& l, const GrowthTip& r) { return l.id < r.id; });

  std::set<int> node_ids;
  for (const NodeSpec& n : cfg_.nodes) {
    if (!node_ids.insert(n.id).second)
      raise(ErrorCode::ConfigError, "duplicate node id " + std::to_string(n.id));
    RoboticNode rn;
    rn.id = n.id;
    rn.pos = n.pos;
    rn.role = n.role;
    world_.nodes.push_back(rn);
  }
  std::sort(world_.nodes.begin(), world_.nodes.end(),
            [](const RoboticNode& l, const RoboticNode& r) { return l.id < r.id; });

  if (cfg_.engine.vmc_interval <= 0)
    raise(ErrorCode::ConfigError, "engine.vmc_interval must be positive");
  if (cfg_.engine.ticks < 0) raise(ErrorCode::ConfigError, "engine.ticks must be >= 0");

  rebuild_field();
}

void Engine::rebuild_field() {
  world_.field.sources = cfg_.sources;
  for (int k = 0; k < kStimulusKinds; ++k) world_.field.ambient[k] = cfg_.ambient[k];
  for (const RoboticNode& n : world_.nodes) {
    if (n.led.blue > 0.0)
      world_.field.sources.push_back(
          {n.pos, StimulusKind::blue, n.led.blue * cfg_.engine.led_power});
    if (n.led.far_red > 0.0)
      world_.field.sources.push_back(
          {n.pos, StimulusKind::far_red, n.led.far_red * cfg_.engine.led_power});
  }
}

void Engine::apply_structure_control(TickReport& report) {
  LeafScores scores;
  for (NodeId leaf : world_.graph.leaves()) {
    double s = 1.0;
    const Vec3& p = world_.graph.node(leaf).pos;
    for (const Region& r : cfg_.regions)
      if (r.label == RegionLabel::occupied_space && r.box.contains(p))
        s = std::min(s, 1.0 - r.occupancy);
    scores[leaf] = s;
  }
  VmcStepResult result = vmc_step(world_.graph, world_.vmc, scores, cfg_.vmc);
  world_.vmc = std::move(result.state);

  for (const StructureProposal& p : result.proposals) {
    if (p.kind == ProposalKind::branch_at) {
      auto pseg = world_.graph.parent_segment(p.node);
      if (!pseg) continue;
      const ScaffoldSegment& parent = world_.graph.segment(*pseg);
      if (parent.filaments < 2 * cfg_.vmc.f_min) continue;
      Vec3 dir = normalized(world_.graph.node(p.node).pos - world_.graph.node(parent.from).pos);
      std::vector<int> fils = allocate_filaments(
          parent.filaments, {cfg_.vmc.v_init, cfg_.vmc.v_init}, cfg_.vmc);
      for (int k = 0; k < 2; ++k) {
        NodeId nn = world_.graph.max_node_id() + 1;
        SegmentId ns = world_.graph.max_segment_id() + 1;
        double ang = (k == 0 ? 1.0 : -1.0) * cfg_.engine.branch_angle_deg;
        Vec3 child = world_.graph.node(p.node).pos + rotate_xy(dir, ang) * cfg_.engine.branch_length;
        world_.graph.add_node({nn, child});
        world_.graph.add_segment(ns, p.node, nn, fils[static_cast<size_t>(k)]);
        world_.vmc[nn] = VmcRecord{cfg_.vmc.v_init, 0.0, 0.0};
      }
      report.events.push_back("branch node " + std::to_string(p.node));
    } else if (p.kind == ProposalKind::prune) {
      // The physical braid stays in place; the proposal is only reported.
      report.events.push_back("prune node " + std::to_string(p.node));
    }
  }

  // Re-apportion filaments down the tree to follow the updated vessels.
  std::deque<NodeId> queue{world_.graph.root()};
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    const std::vector<SegmentId>& children = world_.graph.children(n);
    if (children.empty()) continue;
    int budget = 0;
    if (n == world_.graph.root()) {
      for (SegmentId c : children) budget += world_.graph.segment(c).filaments;
    } else {
      budget = world_.graph.segment(*world_.graph.parent_segment(n)).filaments;
    }
    if (budget >= cfg_.vmc.f_min * static_cast<int>(children.size())) {
      std::vector<double> vessels;
      for (SegmentId c : children) vessels.push_back(world_.vmc[world_.graph.segment(c).to].vessel);
      std::vector<int> fils = allocate_filaments(budget, vessels, cfg_.vmc);
      for (size_t i = 0; i < children.size(); ++i)
        world_.graph.set_filaments(children[i], fils[i]);
    }
    for (SegmentId c : children) queue.push_back(world_.graph.segment(c).to);
  }
}

TickReport Engine::step() {
  TickReport report;
  report.tick = world_.tick;

  // Sense against the closest growing tip; validity and neighbour readings
  // both look at the LEDs still lit from the previous tick.
  for (RoboticNode& node : world_.nodes) {
    double dist = std::numeric_limits<double>::infinity();
    for (const GrowthTip& tip : world_.plant.tips) {
      if (tip.stopped) continue;
      dist = std::min(dist, distance(node.pos, world_.graph.point_on(tip.segment, tip.frac)));
    }
    IrSample s = sense_ir(cfg_.node, dist, node.led.far_red, rng_);
    push_sample(node, s, cfg_.node);
    if (has_valid_sample(node)) node.filtered = filtered_value(node, cfg_.node);
    node.detected = detect(node.filtered, cfg_.node);
  }

  std::vector<LedState> next_leds(world_.nodes.size());
  for (size_t i = 0; i < world_.nodes.size(); ++i) {
    double best_blue = 0.0;
    for (size_t j = 0; j < world_.nodes.size(); ++j) {
      if (i == j) continue;
      best_blue = std::max(best_blue,
                           neighbor_reading(world_.nodes[j].led.blue,
                                            distance(world_.nodes[i].pos, world_.nodes[j].pos)));
    }
    next_leds[i] = policy_step(world_.nodes[i].role, world_.nodes[i].detected, best_blue, cfg_.node);
  }
  for (size_t i = 0; i < world_.nodes.size(); ++i) world_.nodes[i].led = next_leds[i];

  rebuild_field();

  if (world_.tick % cfg_.engine.vmc_interval == 0) apply_structure_control(report);

  grow_step(world_.plant, world_.graph, world_.field, cfg_.plant, 1.0, &rng_);

  for (const DamageEvent& ev : cfg_.damage) {
    if (ev.tick != world_.tick) continue;
    const Region& region = *regions_.at(ev.region);
    world_.plant.coverage.clear_box(world_.graph, region.box);
    auto& tips = world_.plant.tips;
    tips.erase(std::remove_if(tips.begin(), tips.end(),
                              [&](const GrowthTip& tip) {
                                return region.box.contains(
                                    world_.graph.point_on(tip.segment, tip.frac));
                              }),
               tips.end());
    report.events.push_back("damage " + ev.region);
  }

  for (const Region& r : cfg_.regions)
    report.coverage[r.id] = region_coverage(world_.graph, world_.plant.coverage, r.box);
  report.covered_length = world_.plant.coverage.covered_length(world_.graph);
  report.segments = static_cast<int>(world_.graph.segments().size());
  for (const GrowthTip& tip : world_.plant.tips)
    report.tips.push_back(TipReport{tip.id, tip.segment, tip.frac,
                                    world_.graph.point_on(tip.segment, tip.frac), tip.stopped});
  for (const RoboticNode& n : world_.nodes)
    report.nodes.push_back(NodeReport{n.id, n.filtered, n.detected, n.led.blue, n.led.far_red});

  ++world_.tick;
  history_.push_back(report);
  return report;
}

void Engine::run() {
  while (world_.tick < cfg_.engine.ticks) step();
}

BenchmarkResult Engine::evaluate() const {
  BenchmarkResult result;
  result.windows_clear = true;
  for (const TickReport& rep : history_) {
    for (const Region& r : cfg_.regions) {
      if (r.label != RegionLabel::window) continue;
      auto it = rep.coverage.find(r.id);
      if (it != rep.coverage.end() && it->second > 0.0) result.windows_clear = false;
    }
  }

  // Only the last hit on each region sets the repair goal.
  std::map<std::string, int> last_hit;
  for (const DamageEvent& ev : cfg_.damage) {
    auto it = last_hit.find(ev.region);
    if (it == last_hit.end() || ev.tick > it->second) last_hit[ev.region] = ev.tick;
  }

  bool all_repaired = true;
  for (const auto& [region, tick] : last_hit) {
    RegionRepair rr;
    rr.region = region;
    rr.damage_tick = tick;
    if (tick >= 1 && tick - 1 < static_cast<int>(history_.size()))
      rr.baseline = history_[static_cast<size_t>(tick - 1)].coverage.at(region);
    double goal = cfg_.engine.repair_threshold * rr.baseline;
    for (size_t t = static_cast<size_t>(tick); t < history_.size(); ++t) {
      if (history_[t].coverage.at(region) >= goal) {
        rr.repaired_tick = static_cast<int>(t);
        rr.repaired = true;
        break;
      }
    }
    if (!history_.empty()) rr.final_coverage = history_.back().coverage.at(region);
    if (!rr.repaired) all_repaired = false;
    result.repairs.push_back(std::move(rr));
  }

  result.passed = result.windows_clear && all_repaired;
  return result;
}

}  // namespace florasim
