#include "florasim/runlog.hpp"

#include <sstream>

#include <json.hpp>

#include "florasim/config.hpp"
#include "florasim/error.hpp"

namespace florasim {

namespace {

using nlohmann::json;

json dump_vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

std::string log_header(const ScenarioConfig& config, std::uint64_t seed) {
  json h;
  h["florasim_log"] = 1;
  h["config_digest"] = config_digest(config);
  h["seed"] = seed;
  h["config"] = json::parse(write_config(config));
  return h.dump();
}

std::string log_record(const TickReport& report) {
  json r;
  r["tick"] = report.tick;
  json cov;
  for (const auto& [region, value] : report.coverage) cov[region] = value;
  r["coverage"] = std::move(cov);
  r["covered_length"] = report.covered_length;
  r["segments"] = report.segments;
  json tips = json::array();
  for (const TipReport& t : report.tips)
    tips.push_back({{"id", t.id},
                    {"segment", t.segment},
                    {"frac", t.frac},
                    {"pos", dump_vec3(t.pos)},
                    {"stopped", t.stopped}});
  r["tips"] = std::move(tips);
  json nodes = json::array();
  for (const NodeReport& n : report.nodes)
    nodes.push_back({{"id", n.id},
                     {"filtered", n.filtered},
                     {"detected", n.detected},
                     {"blue", n.led_blue},
                     {"far_red", n.led_far_red}});
  r["nodes"] = std::move(nodes);
  json events = json::array();
  for (const std::string& e : report.events) events.push_back(e);
  r["events"] = std::move(events);
  return r.dump();
}

namespace {

json parse_line(const std::string& line, int number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded())
    raise(ErrorCode::MalformedLine, "log line " + std::to_string(number) + ": invalid JSON");
  return j;
}

double num_at(const json& j, const char* key, int line) {
  if (!j.contains(key) || !j[key].is_number())
    raise(ErrorCode::MalformedLine,
          "log line " + std::to_string(line) + ": missing number '" + std::string(key) + "'");
  return j[key].get<double>();
}

}  // namespace

RunLog read_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  RunLog log;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    json j = parse_line(line, number);
    if (!have_header) {
      if (!j.is_object() || j.value("florasim_log", 0) != 1)
        raise(ErrorCode::MalformedLine, "log line 1: not a florasim log header");
      if (!j.contains("config") || !j.contains("config_digest") || !j.contains("seed"))
        raise(ErrorCode::MalformedLine, "log line 1: header is missing fields");
      log.config = parse_config(j["config"].dump());
      log.digest = j["config_digest"].get<std::string>();
      if (config_digest(log.config) != log.digest)
        raise(ErrorCode::MalformedLine, "log line 1: config digest mismatch");
      log.seed = j["seed"].get<std::uint64_t>();
      log.config.engine.seed = log.seed;
      have_header = true;
      continue;
    }
    TickReport rep;
    rep.tick = static_cast<int>(num_at(j, "tick", number));
    if (j.contains("coverage") && j["coverage"].is_object())
      for (auto it = j["coverage"].begin(); it != j["coverage"].end(); ++it)
        rep.coverage[it.key()] = it.value().get<double>();
    rep.covered_length = num_at(j, "covered_length", number);
    rep.segments = static_cast<int>(num_at(j, "segments", number));
    if (j.contains("tips"))
      for (const json& t : j["tips"]) {
        TipReport tr;
        tr.id = t.value("id", 0);
        tr.segment = t.value("segment", 0);
        tr.frac = t.value("frac", 0.0);
        if (t.contains("pos") && t["pos"].is_array() && t["pos"].size() == 3)
          tr.pos = {t["pos"][0].get<double>(), t["pos"][1].get<double>(),
                    t["pos"][2].get<double>()};
        tr.stopped = t.value("stopped", false);
        rep.tips.push_back(tr);
      }
    if (j.contains("nodes"))
      for (const json& n : j["nodes"]) {
        NodeReport nr;
        nr.id = n.value("id", 0);
        nr.filtered = n.value("filtered", 0.0);
        nr.detected = n.value("detected", false);
        nr.led_blue = n.value("blue", 0.0);
        nr.led_far_red = n.value("far_red", 0.0);
        rep.nodes.push_back(nr);
      }
    if (j.contains("events"))
      for (const json& e : j["events"]) rep.events.push_back(e.get<std::string>());
    log.records.push_back(std::move(rep));
  }
  if (!have_header) raise(ErrorCode::MalformedLine, "log line 1: empty log");
  return log;
}

}  // namespace florasim
