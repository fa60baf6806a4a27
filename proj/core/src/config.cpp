#include "florasim/config.hpp"

#include <initializer_list>

#include <json.hpp>

#include "florasim/error.hpp"

namespace florasim {

namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) raise(ErrorCode::SchemaError, path + ": expected object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) raise(ErrorCode::SchemaError, path + "." + it.key() + ": unknown field");
  }
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) raise(ErrorCode::SchemaError, path + "." + key + ": missing field");
  return obj.at(key);
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) raise(ErrorCode::SchemaError, path + ": expected number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) raise(ErrorCode::SchemaError, path + ": expected integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) raise(ErrorCode::SchemaError, path + ": expected boolean");
  return j.get<bool>();
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) raise(ErrorCode::SchemaError, path + ": expected string");
  return j.get<std::string>();
}

const json& array_of(const json& j, const std::string& path, size_t size = 0) {
  if (!j.is_array()) raise(ErrorCode::SchemaError, path + ": expected array");
  if (size > 0 && j.size() != size)
    raise(ErrorCode::SchemaError, path + ": expected " + std::to_string(size) + " entries");
  return j;
}

Vec3 vec3(const json& j, const std::string& path) {
  array_of(j, path, 3);
  return {num(j[0], path + "[0]"), num(j[1], path + "[1]"), num(j[2], path + "[2]")};
}

Box box3(const json& j, const std::string& path) {
  array_of(j, path, 2);
  Box b{vec3(j[0], path + "[0]"), vec3(j[1], path + "[1]")};
  if (b.min.x > b.max.x || b.min.y > b.max.y || b.min.z > b.max.z)
    raise(ErrorCode::SchemaError, path + ": box min exceeds max");
  return b;
}

StimulusKind kind_of(const json& j, const std::string& path) {
  std::string s = str(j, path);
  if (s == "blue") return StimulusKind::blue;
  if (s == "far_red") return StimulusKind::far_red;
  if (s == "ambient_red") return StimulusKind::ambient_red;
  raise(ErrorCode::SchemaError, path + ": unknown stimulus kind '" + s + "'");
}

RegionLabel label_of(const json& j, const std::string& path) {
  std::string s = str(j, path);
  if (s == "window") return RegionLabel::window;
  if (s == "target") return RegionLabel::target;
  if (s == "damage") return RegionLabel::damage;
  if (s == "occupied_space") return RegionLabel::occupied_space;
  raise(ErrorCode::SchemaError, path + ": unknown region label '" + s + "'");
}

NodeRole role_of(const json& j, const std::string& path) {
  std::string s = str(j, path);
  if (s == "idle") return NodeRole::idle;
  if (s == "attractor") return NodeRole::attractor;
  if (s == "repeller") return NodeRole::repeller;
  raise(ErrorCode::SchemaError, path + ": unknown node role '" + s + "'");
}

ScaffoldSpec parse_scaffold(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"root", "nodes", "segments"});
  ScaffoldSpec spec;
  spec.root = integer(field(j, path, "root"), path + ".root");
  const json& nodes = array_of(field(j, path, "nodes"), path + ".nodes");
  for (size_t i = 0; i < nodes.size(); ++i) {
    std::string p = path + ".nodes[" + std::to_string(i) + "]";
    expect_object(nodes[i], p);
    check_keys(nodes[i], p, {"id", "pos"});
    spec.nodes.push_back({integer(field(nodes[i], p, "id"), p + ".id"),
                          vec3(field(nodes[i], p, "pos"), p + ".pos")});
  }
  const json& segs = array_of(field(j, path, "segments"), path + ".segments");
  for (size_t i = 0; i < segs.size(); ++i) {
    std::string p = path + ".segments[" + std::to_string(i) + "]";
    expect_object(segs[i], p);
    check_keys(segs[i], p, {"id", "from", "to", "filaments", "fusion"});
    ScaffoldSpec::Segment s;
    s.id = integer(field(segs[i], p, "id"), p + ".id");
    s.from = integer(field(segs[i], p, "from"), p + ".from");
    s.to = integer(field(segs[i], p, "to"), p + ".to");
    if (segs[i].contains("filaments")) s.filaments = integer(segs[i]["filaments"], p + ".filaments");
    if (segs[i].contains("fusion")) s.fusion = boolean(segs[i]["fusion"], p + ".fusion");
    spec.segments.push_back(s);
  }
  return spec;
}

LayoutSpec parse_layout(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"modules"});
  LayoutSpec spec;
  const json& mods = array_of(field(j, path, "modules"), path + ".modules");
  for (size_t i = 0; i < mods.size(); ++i) {
    std::string p = path + ".modules[" + std::to_string(i) + "]";
    expect_object(mods[i], p);
    check_keys(mods[i], p, {"id", "kind", "cell"});
    ModulePlacement m;
    m.id = integer(field(mods[i], p, "id"), p + ".id");
    std::string kind = str(field(mods[i], p, "kind"), p + ".kind");
    if (kind == "driver")
      m.kind = ModuleKind::driver;
    else if (kind == "switch")
      m.kind = ModuleKind::transfer_switch;
    else if (kind == "support")
      m.kind = ModuleKind::support;
    else
      raise(ErrorCode::SchemaError, p + ".kind: unknown module kind '" + kind + "'");
    const json& cell = array_of(field(mods[i], p, "cell"), p + ".cell", 2);
    m.cell = {integer(cell[0], p + ".cell[0]"), integer(cell[1], p + ".cell[1]")};
    spec.modules.push_back(m);
  }
  return spec;
}

BraidSource parse_braid(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"layout", "program", "extrusion_rate"});
  BraidSource src;
  src.layout = parse_layout(field(j, path, "layout"), path + ".layout");
  src.program = parse_program(field(j, path, "program").dump());
  if (j.contains("extrusion_rate"))
    src.extrusion_rate = num(j["extrusion_rate"], path + ".extrusion_rate");
  return src;
}

void parse_plant(const json& j, const std::string& path, PlantParams& p) {
  expect_object(j, path);
  check_keys(j, path,
             {"base_rate", "g_far_red", "far_red_norm", "k_blue", "k_far_red", "deterministic"});
  if (j.contains("base_rate")) p.base_rate = num(j["base_rate"], path + ".base_rate");
  if (j.contains("g_far_red")) p.g_far_red = num(j["g_far_red"], path + ".g_far_red");
  if (j.contains("far_red_norm")) p.far_red_norm = num(j["far_red_norm"], path + ".far_red_norm");
  if (j.contains("k_blue")) p.k_blue = num(j["k_blue"], path + ".k_blue");
  if (j.contains("k_far_red")) p.k_far_red = num(j["k_far_red"], path + ".k_far_red");
  if (j.contains("deterministic"))
    p.deterministic = boolean(j["deterministic"], path + ".deterministic");
}

void parse_node_params(const json& j, const std::string& path, NodeParams& p) {
  expect_object(j, path);
  check_keys(j, path, {"ir_gain", "noise_sigma", "buffer_size", "filter_weights",
                       "detect_distance_cm", "relay_threshold"});
  if (j.contains("ir_gain")) p.ir_gain = num(j["ir_gain"], path + ".ir_gain");
  if (j.contains("noise_sigma")) p.noise_sigma = num(j["noise_sigma"], path + ".noise_sigma");
  if (j.contains("buffer_size")) {
    p.buffer_size = integer(j["buffer_size"], path + ".buffer_size");
    if (p.buffer_size < 1) raise(ErrorCode::SchemaError, path + ".buffer_size: expected >= 1");
  }
  if (j.contains("filter_weights")) {
    const json& w = array_of(j["filter_weights"], path + ".filter_weights");
    p.filter_weights.clear();
    for (size_t i = 0; i < w.size(); ++i)
      p.filter_weights.push_back(num(w[i], path + ".filter_weights[" + std::to_string(i) + "]"));
  }
  if (j.contains("detect_distance_cm"))
    p.detect_distance_cm = num(j["detect_distance_cm"], path + ".detect_distance_cm");
  if (j.contains("relay_threshold"))
    p.relay_threshold = num(j["relay_threshold"], path + ".relay_threshold");
}

void parse_vmc(const json& j, const std::string& path, VmcParams& p) {
  expect_object(j, path);
  check_keys(j, path,
             {"r_total", "alpha", "beta", "theta_branch", "theta_prune", "v_init", "f_min"});
  if (j.contains("r_total")) p.r_total = num(j["r_total"], path + ".r_total");
  if (j.contains("alpha")) p.alpha = num(j["alpha"], path + ".alpha");
  if (j.contains("beta")) p.beta = num(j["beta"], path + ".beta");
  if (j.contains("theta_branch")) p.theta_branch = num(j["theta_branch"], path + ".theta_branch");
  if (j.contains("theta_prune")) p.theta_prune = num(j["theta_prune"], path + ".theta_prune");
  if (j.contains("v_init")) p.v_init = num(j["v_init"], path + ".v_init");
  if (j.contains("f_min")) {
    p.f_min = integer(j["f_min"], path + ".f_min");
    if (p.f_min < 1) raise(ErrorCode::SchemaError, path + ".f_min: expected >= 1");
  }
}

void parse_engine(const json& j, const std::string& path, EngineParams& p, bool* seed_given) {
  expect_object(j, path);
  check_keys(j, path, {"ticks", "seed", "vmc_interval", "led_power", "branch_length",
                       "branch_angle_deg", "repair_threshold"});
  if (j.contains("ticks")) p.ticks = integer(j["ticks"], path + ".ticks");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      raise(ErrorCode::SchemaError, path + ".seed: expected integer");
    long long v = j["seed"].get<long long>();
    if (v < 0) raise(ErrorCode::SchemaError, path + ".seed: expected >= 0");
    p.seed = static_cast<std::uint64_t>(v);
    if (seed_given) *seed_given = true;
  }
  if (j.contains("vmc_interval")) p.vmc_interval = integer(j["vmc_interval"], path + ".vmc_interval");
  if (j.contains("led_power")) p.led_power = num(j["led_power"], path + ".led_power");
  if (j.contains("branch_length"))
    p.branch_length = num(j["branch_length"], path + ".branch_length");
  if (j.contains("branch_angle_deg"))
    p.branch_angle_deg = num(j["branch_angle_deg"], path + ".branch_angle_deg");
  if (j.contains("repair_threshold"))
    p.repair_threshold = num(j["repair_threshold"], path + ".repair_threshold");
}

}  // namespace

LayoutSpec parse_layout_spec(const std::string& json_text) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) raise(ErrorCode::SyntaxError, "layout: invalid JSON");
  return parse_layout(root, "layout");
}

ScenarioConfig parse_config(const std::string& json_text, bool* seed_given) {
  if (seed_given) *seed_given = false;
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) raise(ErrorCode::SyntaxError, "config: invalid JSON");
  expect_object(root, "config");
  check_keys(root, "config",
             {"scaffold", "braid", "regions", "nodes", "sources", "ambient", "tips", "damage",
              "plant", "node_params", "vmc", "engine"});

  ScenarioConfig cfg;
  if (root.contains("scaffold")) cfg.scaffold = parse_scaffold(root["scaffold"], "config.scaffold");
  if (root.contains("braid")) cfg.braid = parse_braid(root["braid"], "config.braid");
  if (cfg.scaffold.has_value() == cfg.braid.has_value())
    raise(ErrorCode::SchemaError, "config: exactly one of scaffold and braid is required");

  if (root.contains("regions")) {
    const json& regions = array_of(root["regions"], "config.regions");
    for (size_t i = 0; i < regions.size(); ++i) {
      std::string p = "config.regions[" + std::to_string(i) + "]";
      expect_object(regions[i], p);
      check_keys(regions[i], p, {"id", "label", "box", "occupancy"});
      Region r;
      r.id = str(field(regions[i], p, "id"), p + ".id");
      r.label = label_of(field(regions[i], p, "label"), p + ".label");
      r.box = box3(field(regions[i], p, "box"), p + ".box");
      if (regions[i].contains("occupancy"))
        r.occupancy = num(regions[i]["occupancy"], p + ".occupancy");
      cfg.regions.push_back(std::move(r));
    }
  }

  if (root.contains("nodes")) {
    const json& nodes = array_of(root["nodes"], "config.nodes");
    for (size_t i = 0; i < nodes.size(); ++i) {
      std::string p = "config.nodes[" + std::to_string(i) + "]";
      expect_object(nodes[i], p);
      check_keys(nodes[i], p, {"id", "pos", "role"});
      cfg.nodes.push_back({integer(field(nodes[i], p, "id"), p + ".id"),
                           vec3(field(nodes[i], p, "pos"), p + ".pos"),
                           role_of(field(nodes[i], p, "role"), p + ".role")});
    }
  }

  if (root.contains("sources")) {
    const json& sources = array_of(root["sources"], "config.sources");
    for (size_t i = 0; i < sources.size(); ++i) {
      std::string p = "config.sources[" + std::to_string(i) + "]";
      expect_object(sources[i], p);
      check_keys(sources[i], p, {"pos", "kind", "intensity"});
      cfg.sources.push_back({vec3(field(sources[i], p, "pos"), p + ".pos"),
                             kind_of(field(sources[i], p, "kind"), p + ".kind"),
                             num(field(sources[i], p, "intensity"), p + ".intensity")});
    }
  }

  if (root.contains("ambient")) {
    const json& amb = root["ambient"];
    expect_object(amb, "config.ambient");
    check_keys(amb, "config.ambient", {"blue", "far_red", "ambient_red"});
    if (amb.contains("blue")) cfg.ambient[0] = num(amb["blue"], "config.ambient.blue");
    if (amb.contains("far_red")) cfg.ambient[1] = num(amb["far_red"], "config.ambient.far_red");
    if (amb.contains("ambient_red"))
      cfg.ambient[2] = num(amb["ambient_red"], "config.ambient.ambient_red");
  }

  if (root.contains("tips")) {
    const json& tips = array_of(root["tips"], "config.tips");
    for (size_t i = 0; i < tips.size(); ++i) {
      std::string p = "config.tips[" + std::to_string(i) + "]";
      expect_object(tips[i], p);
      check_keys(tips[i], p, {"id", "segment", "frac"});
      TipSpec t;
      t.id = integer(field(tips[i], p, "id"), p + ".id");
      t.segment = integer(field(tips[i], p, "segment"), p + ".segment");
      if (tips[i].contains("frac")) t.frac = num(tips[i]["frac"], p + ".frac");
      cfg.tips.push_back(t);
    }
  }

  if (root.contains("damage")) {
    const json& dmg = array_of(root["damage"], "config.damage");
    for (size_t i = 0; i < dmg.size(); ++i) {
      std::string p = "config.damage[" + std::to_string(i) + "]";
      expect_object(dmg[i], p);
      check_keys(dmg[i], p, {"tick", "region"});
      cfg.damage.push_back({integer(field(dmg[i], p, "tick"), p + ".tick"),
                            str(field(dmg[i], p, "region"), p + ".region")});
    }
  }

  if (root.contains("plant")) parse_plant(root["plant"], "config.plant", cfg.plant);
  if (root.contains("node_params"))
    parse_node_params(root["node_params"], "config.node_params", cfg.node);
  if (root.contains("vmc")) parse_vmc(root["vmc"], "config.vmc", cfg.vmc);
  if (root.contains("engine")) parse_engine(root["engine"], "config.engine", cfg.engine, seed_given);
  return cfg;
}

namespace {

json dump_vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json dump_scaffold(const ScaffoldSpec& spec) {
  json nodes = json::array();
  for (const ScaffoldNode& n : spec.nodes)
    nodes.push_back({{"id", n.id}, {"pos", dump_vec3(n.pos)}});
  json segments = json::array();
  for (const ScaffoldSpec::Segment& s : spec.segments)
    segments.push_back({{"id", s.id},
                        {"from", s.from},
                        {"to", s.to},
                        {"filaments", s.filaments},
                        {"fusion", s.fusion}});
  return {{"root", spec.root}, {"nodes", nodes}, {"segments", segments}};
}

json dump_layout(const LayoutSpec& spec) {
  json mods = json::array();
  for (const ModulePlacement& m : spec.modules) {
    const char* kind = m.kind == ModuleKind::driver
                           ? "driver"
                           : m.kind == ModuleKind::transfer_switch ? "switch" : "support";
    mods.push_back({{"id", m.id}, {"kind", kind}, {"cell", json::array({m.cell.x, m.cell.y})}});
  }
  return {{"modules", mods}};
}

}  // namespace

std::string write_layout_spec(const LayoutSpec& spec) { return dump_layout(spec).dump(2) + "\n"; }

std::string write_config(const ScenarioConfig& config) {
  json root;
  if (config.scaffold) root["scaffold"] = dump_scaffold(*config.scaffold);
  if (config.braid) {
    root["braid"] = {{"layout", dump_layout(config.braid->layout)},
                     {"program", json::parse(write_program(config.braid->program))},
                     {"extrusion_rate", config.braid->extrusion_rate}};
  }
  json regions = json::array();
  for (const Region& r : config.regions)
    regions.push_back({{"id", r.id},
                       {"label", region_label_name(r.label)},
                       {"box", json::array({dump_vec3(r.box.min), dump_vec3(r.box.max)})},
                       {"occupancy", r.occupancy}});
  root["regions"] = regions;
  json nodes = json::array();
  for (const NodeSpec& n : config.nodes)
    nodes.push_back({{"id", n.id}, {"pos", dump_vec3(n.pos)}, {"role", node_role_name(n.role)}});
  root["nodes"] = nodes;
  json sources = json::array();
  for (const StimulusSource& s : config.sources)
    sources.push_back({{"pos", dump_vec3(s.pos)},
                       {"kind", stimulus_kind_name(s.kind)},
                       {"intensity", s.intensity}});
  root["sources"] = sources;
  root["ambient"] = {{"blue", config.ambient[0]},
                     {"far_red", config.ambient[1]},
                     {"ambient_red", config.ambient[2]}};
  json tips = json::array();
  for (const TipSpec& t : config.tips)
    tips.push_back({{"id", t.id}, {"segment", t.segment}, {"frac", t.frac}});
  root["tips"] = tips;
  json damage = json::array();
  for (const DamageEvent& d : config.damage)
    damage.push_back({{"tick", d.tick}, {"region", d.region}});
  root["damage"] = damage;
  root["plant"] = {{"base_rate", config.plant.base_rate},
                   {"g_far_red", config.plant.g_far_red},
                   {"far_red_norm", config.plant.far_red_norm},
                   {"k_blue", config.plant.k_blue},
                   {"k_far_red", config.plant.k_far_red},
                   {"deterministic", config.plant.deterministic}};
  json weights = json::array();
  for (double w : config.node.filter_weights) weights.push_back(w);
  root["node_params"] = {{"ir_gain", config.node.ir_gain},
                         {"noise_sigma", config.node.noise_sigma},
                         {"buffer_size", config.node.buffer_size},
                         {"filter_weights", weights},
                         {"detect_distance_cm", config.node.detect_distance_cm},
                         {"relay_threshold", config.node.relay_threshold}};
  root["vmc"] = {{"r_total", config.vmc.r_total},
                 {"alpha", config.vmc.alpha},
                 {"beta", config.vmc.beta},
                 {"theta_branch", config.vmc.theta_branch},
                 {"theta_prune", config.vmc.theta_prune},
                 {"v_init", config.vmc.v_init},
                 {"f_min", config.vmc.f_min}};
  root["engine"] = {{"ticks", config.engine.ticks},
                    {"vmc_interval", config.engine.vmc_interval},
                    {"led_power", config.engine.led_power},
                    {"branch_length", config.engine.branch_length},
                    {"branch_angle_deg", config.engine.branch_angle_deg},
                    {"repair_threshold", config.engine.repair_threshold}};
  return root.dump();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_digest(const ScenarioConfig& config) {
  std::uint64_t h = fnv1a64(write_config(config));
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace florasim
