#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "florasim/braid_program.hpp"
#include "florasim/braid_trace.hpp"
#include "florasim/config.hpp"
#include "florasim/engine.hpp"
#include "florasim/error.hpp"
#include "florasim/runlog.hpp"
#include "florasim/svg.hpp"

namespace fs = std::filesystem;
using florasim::Error;
using florasim::ErrorCode;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) florasim::raise(ErrorCode::RuntimeFault, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) florasim::raise(ErrorCode::RuntimeFault, "cannot write " + path);
  out << content;
  if (!out) florasim::raise(ErrorCode::RuntimeFault, "short write to " + path);
}

// Precedence: --seed flag, then config, then FLORASIM_SEED, then 1.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, bool config_has,
                           std::uint64_t config_seed) {
  if (flag) return *flag;
  if (config_has) return config_seed;
  if (const char* env = std::getenv("FLORASIM_SEED")) {
    std::string s(env);
    try {
      size_t used = 0;
      unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      florasim::raise(ErrorCode::ConfigError, "FLORASIM_SEED is not a number: '" + s + "'");
    }
  }
  return 1;
}

florasim::Engine make_engine(const std::string& config_path,
                             const std::optional<std::uint64_t>& seed_flag,
                             std::uint64_t* seed_out) {
  bool seed_given = false;
  florasim::ScenarioConfig cfg = florasim::parse_config(read_file(config_path), &seed_given);
  cfg.engine.seed = resolve_seed(seed_flag, seed_given, cfg.engine.seed);
  if (seed_out) *seed_out = cfg.engine.seed;
  return florasim::Engine(cfg);
}

std::string snapshot_name(int tick) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snapshot_%06d.svg", tick);
  return buf;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag,
                 const std::string& out_dir) {
  std::uint64_t seed = 0;
  florasim::Engine engine = make_engine(config_path, seed_flag, &seed);

  std::ostringstream log;
  log << florasim::log_header(engine.config(), seed) << '\n';
  while (engine.world().tick < engine.config().engine.ticks)
    log << florasim::log_record(engine.step()) << '\n';
  write_file((fs::path(out_dir) / "run.jsonl").string(), log.str());

  nlohmann::json summary;
  summary["ticks"] = engine.world().tick;
  summary["seed"] = seed;
  summary["config_digest"] = florasim::config_digest(engine.config());
  summary["segments"] = static_cast<int>(engine.world().graph.segments().size());
  summary["tips"] = static_cast<int>(engine.world().plant.tips.size());
  summary["covered_length"] =
      engine.world().plant.coverage.covered_length(engine.world().graph);
  nlohmann::json cov;
  int events = 0;
  for (const florasim::TickReport& rep : engine.history())
    events += static_cast<int>(rep.events.size());
  if (!engine.history().empty())
    for (const auto& [region, value] : engine.history().back().coverage) cov[region] = value;
  summary["coverage"] = cov;
  summary["events"] = events;
  write_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");

  std::cout << "simulated " << engine.world().tick << " ticks (seed " << seed << "), log in "
            << (fs::path(out_dir) / "run.jsonl").string() << "\n";
  return 0;
}

int cmd_compile_braid(const std::string& layout_path, const std::string& program_path,
                      const std::string& out_path, bool print_word) {
  florasim::MachineLayout layout =
      florasim::MachineLayout::build(florasim::parse_layout_spec(read_file(layout_path)));
  florasim::BraidProgram program = florasim::parse_program(read_file(program_path));
  florasim::CarrierSchedule schedule = florasim::compile_program(program, layout);
  std::string text = florasim::write_schedule(schedule);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  if (print_word) {
    florasim::BraidTrace trace = florasim::execute_schedule(schedule, layout);
    std::cout << "word: " << florasim::trace_to_word(trace) << "\n";
    std::cout << "crossings: " << trace.crossings.size() << "\n";
  }
  return 0;
}

int cmd_verify_schedule(const std::string& layout_path, const std::string& schedule_path) {
  florasim::MachineLayout layout =
      florasim::MachineLayout::build(florasim::parse_layout_spec(read_file(layout_path)));
  florasim::CarrierSchedule schedule = florasim::read_schedule(read_file(schedule_path));
  florasim::VerificationReport report = florasim::verify_schedule(schedule, layout);
  std::cout << report.to_text();
  return report.valid() ? 0 : 1;
}

int cmd_benchmark(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag,
                  const std::string& out_dir) {
  std::uint64_t seed = 0;
  florasim::Engine engine = make_engine(config_path, seed_flag, &seed);
  engine.run();
  florasim::BenchmarkResult result = engine.evaluate();

  nlohmann::json doc;
  doc["passed"] = result.passed;
  doc["windows_clear"] = result.windows_clear;
  doc["seed"] = seed;
  doc["ticks"] = engine.world().tick;
  nlohmann::json repairs = nlohmann::json::array();
  for (const florasim::RegionRepair& rr : result.repairs)
    repairs.push_back({{"region", rr.region},
                       {"damage_tick", rr.damage_tick},
                       {"baseline", rr.baseline},
                       {"final_coverage", rr.final_coverage},
                       {"repaired", rr.repaired},
                       {"repaired_tick", rr.repaired_tick}});
  doc["repairs"] = repairs;
  write_file((fs::path(out_dir) / "benchmark.json").string(), doc.dump(2) + "\n");

  std::cout << (result.passed ? "PASS" : "FAIL") << ": windows "
            << (result.windows_clear ? "clear" : "blocked") << ", " << result.repairs.size()
            << " repair goal(s)\n";
  for (const florasim::RegionRepair& rr : result.repairs) {
    std::cout << "  " << rr.region << ": baseline " << rr.baseline << ", final "
              << rr.final_coverage;
    if (rr.repaired)
      std::cout << ", repaired at tick " << rr.repaired_tick << "\n";
    else
      std::cout << ", not repaired\n";
  }
  return result.passed ? 0 : 1;
}

int cmd_render(const std::string& log_path, std::optional<int> tick, const std::string& out_dir) {
  florasim::RunLog log = florasim::read_log(read_file(log_path));
  if (log.records.empty()) florasim::raise(ErrorCode::ConfigError, "log has no tick records");
  int target = tick ? *tick : log.records.back().tick;
  if (target < 0 || target > log.records.back().tick)
    florasim::raise(ErrorCode::ConfigError,
                    "tick " + std::to_string(target) + " is outside the logged run");
  florasim::Engine engine{log.config};
  while (engine.world().tick <= target) engine.step();
  std::string svg = florasim::render_svg(engine.world(), engine.config());
  std::string path = (fs::path(out_dir) / snapshot_name(target)).string();
  write_file(path, svg);
  std::cout << "rendered tick " << target << " to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growth-steered braided scaffold simulator"};
  app.require_subcommand(1);

  std::string config_path, layout_path, program_path, schedule_path, log_path;
  std::string out_dir = ".";
  std::string out_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> tick_flag;
  bool print_word = false;

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write the JSONL log");
  simulate->add_option("--config", config_path, "scenario config (JSON)")->required();
  simulate->add_option("--seed", seed_flag, "override the RNG seed");
  simulate->add_option("--out", out_dir, "output directory");

  CLI::App* compile = app.add_subcommand("compile-braid", "compile a braiding program");
  compile->add_option("--layout", layout_path, "machine layout (JSON)")->required();
  compile->add_option("--program", program_path, "braiding program (JSON)")->required();
  compile->add_option("--out", out_path, "schedule output file (default stdout)");
  compile->add_flag("--word", print_word, "also print the braid word of the schedule");

  CLI::App* verify = app.add_subcommand("verify-schedule", "check a carrier schedule");
  verify->add_option("--layout", layout_path, "machine layout (JSON)")->required();
  verify->add_option("--schedule", schedule_path, "schedule file")->required();

  CLI::App* benchmark = app.add_subcommand("benchmark", "run the self-repair benchmark");
  benchmark->add_option("--config", config_path, "scenario config (JSON)")->required();
  benchmark->add_option("--seed", seed_flag, "override the RNG seed");
  benchmark->add_option("--out", out_dir, "output directory");

  CLI::App* render = app.add_subcommand("render", "replay a log and draw one tick as SVG");
  render->add_option("--log", log_path, "run log (JSONL)")->required();
  render->add_option("--tick", tick_flag, "tick to draw (default: last)");
  render->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, seed_flag, out_dir);
    if (*compile) return cmd_compile_braid(layout_path, program_path, out_path, print_word);
    if (*verify) return cmd_verify_schedule(layout_path, schedule_path);
    if (*benchmark) return cmd_benchmark(config_path, seed_flag, out_dir);
    if (*render) return cmd_render(log_path, tick_flag, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::RuntimeFault ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
