#pragma once

// Flat `key = value` scenario files. One key per line, `#` starts a comment,
// vectors are written `x, y`, and `initial_intruders` takes `x, y; x, y; ...`.
// Missing keys keep the ScenarioConfig defaults; unknown keys are rejected.

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "stmta/scenario.hpp"

namespace stmta {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view field, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(field), "expected a number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw ConfigError(std::string(field), "must be finite");
  return value;
}

template <typename Int>
Int parse_integer(std::string_view field, std::string_view text) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(field), "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

inline Vec2 parse_vec2(std::string_view field, std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw ConfigError(std::string(field), "expected 'x, y', got '" + std::string(trim(text)) + "'");
  }
  return {parse_double(field, text.substr(0, comma)), parse_double(field, text.substr(comma + 1))};
}

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline ScenarioConfig load_scenario(std::string_view text) {
  using namespace detail;
  ScenarioConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");

    if (key == "airspace_center") cfg.airspace_center = parse_vec2(key, value);
    else if (key == "airspace_radius") cfg.airspace_radius = parse_double(key, value);
    else if (key == "neutralize_radius") cfg.neutralize_radius = parse_double(key, value);
    else if (key == "intruder_speed") cfg.intruder_speed = parse_double(key, value);
    else if (key == "evader_max_speed") cfg.evader_max_speed = parse_double(key, value);
    else if (key == "eta") cfg.eta = parse_double(key, value);
    else if (key == "num_evaders") cfg.num_evaders = parse_integer<int>(key, value);
    else if (key == "max_concurrent_intruders") cfg.max_concurrent_intruders = parse_integer<int>(key, value);
    else if (key == "spawn_radius_min") cfg.spawn_radius_min = parse_double(key, value);
    else if (key == "spawn_radius_max") cfg.spawn_radius_max = parse_double(key, value);
    else if (key == "min_radial_separation") cfg.min_radial_separation = parse_double(key, value);
    else if (key == "sim_dt") cfg.sim_dt = parse_double(key, value);
    else if (key == "replan_interval") cfg.replan_interval = parse_double(key, value);
    else if (key == "max_intruders_per_epoch") cfg.max_intruders_per_epoch = parse_integer<int>(key, value);
    else if (key == "horizon") cfg.horizon = parse_double(key, value);
    else if (key == "rng_seed") cfg.rng_seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "consensus_max_rounds") cfg.consensus_max_rounds = parse_integer<int>(key, value);
    else if (key == "initial_intruders") {
      cfg.initial_intruders.clear();
      std::size_t pos = 0;
      while (pos <= value.size()) {
        auto semi = value.find(';', pos);
        if (semi == std::string_view::npos) semi = value.size();
        const auto item = trim(value.substr(pos, semi - pos));
        if (!item.empty()) cfg.initial_intruders.push_back(parse_vec2(key, item));
        pos = semi + 1;
      }
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

// Inverse of load_scenario; doubles are written in shortest round-trip form.
inline std::string to_text(const ScenarioConfig& cfg) {
  using detail::format_double;
  std::ostringstream out;
  auto vec = [](const Vec2& v) { return format_double(v.x) + ", " + format_double(v.y); };
  out << "airspace_center = " << vec(cfg.airspace_center) << '\n'
      << "airspace_radius = " << format_double(cfg.airspace_radius) << '\n'
      << "neutralize_radius = " << format_double(cfg.neutralize_radius) << '\n'
      << "intruder_speed = " << format_double(cfg.intruder_speed) << '\n'
      << "evader_max_speed = " << format_double(cfg.evader_max_speed) << '\n'
      << "eta = " << format_double(cfg.eta) << '\n'
      << "num_evaders = " << cfg.num_evaders << '\n'
      << "max_concurrent_intruders = " << cfg.max_concurrent_intruders << '\n'
      << "spawn_radius_min = " << format_double(cfg.spawn_radius_min) << '\n'
      << "spawn_radius_max = " << format_double(cfg.spawn_radius_max) << '\n'
      << "min_radial_separation = " << format_double(cfg.min_radial_separation) << '\n'
      << "sim_dt = " << format_double(cfg.sim_dt) << '\n'
      << "replan_interval = " << format_double(cfg.replan_interval) << '\n'
      << "max_intruders_per_epoch = " << cfg.max_intruders_per_epoch << '\n'
      << "horizon = " << format_double(cfg.horizon) << '\n'
      << "rng_seed = " << cfg.rng_seed << '\n'
      << "consensus_max_rounds = " << cfg.consensus_max_rounds << '\n';
  if (!cfg.initial_intruders.empty()) {
    out << "initial_intruders = ";
    for (std::size_t i = 0; i < cfg.initial_intruders.size(); ++i) {
      if (i) out << "; ";
      out << vec(cfg.initial_intruders[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace stmta
