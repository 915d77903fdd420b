// Command-line front end: allocate, simulate, montecarlo, oracle.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stmta/stmta.hpp"

namespace {

struct CommonOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& default_format) {
  cmd->add_option("--scenario", opts.scenario, "Scenario config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "RNG seed (defaults to the scenario's rng_seed)");
  cmd->add_option("--out", opts.out, "Write output here instead of stdout");
  opts.format = default_format;
  cmd->add_option("--format", opts.format, "Output format: csv | report | events")->capture_default_str();
}

void write_output(const CommonOptions& opts, const std::string& text) {
  if (opts.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opts.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + opts.out + "'");
  f << text;
}

template <typename T>
std::vector<T> parse_grid(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    std::istringstream in(item);
    T value{};
    if (!(in >> value)) throw std::invalid_argument("bad grid value '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

// The opening scene an episode with this config and seed would start from.
stmta::WorldState opening_scene(const stmta::ScenarioConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return stmta::initial_world(cfg, rng);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal multi-task allocation for airspace defense"};
  app.require_subcommand(1);

  CommonOptions allocate_opts, simulate_opts, mc_opts, oracle_opts;
  auto* allocate = app.add_subcommand("allocate", "One-shot allocation of the opening scene");
  add_common(allocate, allocate_opts, "report");
  auto* simulate = app.add_subcommand("simulate", "Run one episode and emit its event stream");
  add_common(simulate, simulate_opts, "events");
  auto* mc = app.add_subcommand("montecarlo", "Success-rate sweep over separation and evader count");
  add_common(mc, mc_opts, "csv");
  int epochs = 200;
  std::string sep_grid = "0,10,20,40,60,80";
  std::string evaders_grid;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  mc->add_option("--epochs", epochs, "Episodes per cell")->capture_default_str();
  mc->add_option("--sep-grid", sep_grid, "Comma-separated radial separations (m)")->capture_default_str();
  mc->add_option("--evaders-grid", evaders_grid, "Comma-separated evader counts (default: scenario's)");
  mc->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimal allocation of the opening scene");
  add_common(oracle, oracle_opts, "report");
  std::size_t max_tasks = 8;
  oracle->add_option("--max-tasks", max_tasks, "Refuse larger instances")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (allocate->parsed()) {
      const auto cfg = stmta::load_scenario_file(allocate_opts.scenario);
      const auto format = stmta::parse_format(allocate_opts.format);
      const auto world = opening_scene(cfg, allocate_opts.seed.value_or(cfg.rng_seed));
      const auto tasks = stmta::tasks_from_intruders(world.intruders, cfg);
      write_output(allocate_opts, stmta::emit_report(stmta::resolve(world.evaders, tasks, cfg), format));
    } else if (simulate->parsed()) {
      const auto cfg = stmta::load_scenario_file(simulate_opts.scenario);
      const auto format = stmta::parse_format(simulate_opts.format);
      std::vector<stmta::SimEvent> events;
      const auto metrics = stmta::run_episode(cfg, simulate_opts.seed.value_or(cfg.rng_seed), &events);
      write_output(simulate_opts, stmta::emit_report(metrics, events, format));
    } else if (mc->parsed()) {
      const auto cfg = stmta::load_scenario_file(mc_opts.scenario);
      const auto format = stmta::parse_format(mc_opts.format);
      stmta::SweepConfig sweep;
      sweep.base = cfg;
      sweep.epochs = epochs;
      sweep.separations = parse_grid<double>(sep_grid);
      sweep.evader_counts = evaders_grid.empty() ? std::vector<int>{cfg.num_evaders} : parse_grid<int>(evaders_grid);
      sweep.base_seed = mc_opts.seed.value_or(cfg.rng_seed);
      write_output(mc_opts, stmta::emit_report(stmta::run_montecarlo(sweep, jobs), format));
    } else if (oracle->parsed()) {
      const auto cfg = stmta::load_scenario_file(oracle_opts.scenario);
      const auto format = stmta::parse_format(oracle_opts.format);
      const auto world = opening_scene(cfg, oracle_opts.seed.value_or(cfg.rng_seed));
      const auto tasks = stmta::tasks_from_intruders(world.intruders, cfg);
      write_output(oracle_opts,
                   stmta::emit_report(stmta::brute_force_oracle(world.evaders, tasks, cfg, max_tasks), format));
    }
  } catch (const stmta::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
