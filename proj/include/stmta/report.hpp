#pragma once

// Text serializations:
//   csv     sweep tables, header `sep_m,evaders,epochs,success_rate,mean_neutralized`
//   report  allocation / oracle reports, one `key values...` record per line
//   events  one JSON object per line per SimEvent, then a final metrics record

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stmta/cbba.hpp"
#include "stmta/montecarlo.hpp"
#include "stmta/oracle.hpp"
#include "stmta/simulator.hpp"

namespace stmta {

enum class ReportFormat { csv, report, events };

inline ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "report") return ReportFormat::report;
  if (name == "events") return ReportFormat::events;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "'");
}

inline constexpr std::string_view kSweepHeader = "sep_m,evaders,epochs,success_rate,mean_neutralized";

namespace detail {

inline std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void unsupported(ReportFormat f, std::string_view what) {
  static constexpr std::string_view names[] = {"csv", "report", "events"};
  throw std::invalid_argument("format '" + std::string(names[static_cast<int>(f)]) +
                              "' does not apply to " + std::string(what));
}

inline std::string agent_name(AgentId id) { return id == kNoAgent ? "none" : std::to_string(id); }

inline nlohmann::ordered_json to_json(const Vec2& v) { return nlohmann::ordered_json::array({v.x, v.y}); }

}  // namespace detail

inline std::string emit_report(const SweepResult& result, ReportFormat format = ReportFormat::csv) {
  if (format != ReportFormat::csv) detail::unsupported(format, "sweep results");
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const auto& c : result.cells) {
    out << detail::num(c.separation) << ',' << c.evaders << ',' << c.epochs << ','
        << detail::num(c.success_rate) << ',' << detail::num(c.mean_neutralized) << '\n';
  }
  return out.str();
}

inline SweepResult parse_sweep_csv(std::string_view text) {
  SweepResult result;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw std::invalid_argument("missing sweep header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    if (fields.size() != 5) throw std::invalid_argument("bad sweep row '" + line + "'");
    SweepCell c;
    c.separation = std::stod(fields[0]);
    c.evaders = std::stoi(fields[1]);
    c.epochs = std::stoi(fields[2]);
    c.success_rate = std::stod(fields[3]);
    c.mean_neutralized = std::stod(fields[4]);
    c.successes = static_cast<int>(std::llround(c.success_rate * c.epochs));
    result.cells.push_back(c);
  }
  return result;
}

inline std::string emit_report(const AllocationResult& result, ReportFormat format = ReportFormat::report) {
  if (format != ReportFormat::report) detail::unsupported(format, "allocations");
  std::ostringstream out;
  out << "converged " << (result.converged ? "true" : "false") << '\n';
  out << "rounds " << result.rounds_used << '\n';
  for (std::size_t n = 0; n < result.agents.size(); ++n) {
    out << "agent " << result.agents[n] << " path";
    for (TaskId id : result.paths[n]) out << ' ' << id;
    out << '\n';
  }
  for (const auto& [task, agent] : result.assignment) {
    out << "task " << task << " winner " << detail::agent_name(agent) << '\n';
  }
  out << "unassigned";
  for (TaskId id : result.unassigned()) out << ' ' << id;
  out << '\n';
  return out.str();
}

inline std::string emit_report(const OracleResult& result, ReportFormat format = ReportFormat::report) {
  if (format != ReportFormat::report) detail::unsupported(format, "oracle results");
  std::ostringstream out;
  out << "assigned " << result.assigned << '\n';
  out << "cost " << detail::num(result.cost) << '\n';
  for (std::size_t n = 0; n < result.agents.size(); ++n) {
    out << "agent " << result.agents[n] << " path";
    for (TaskId id : result.paths[n]) out << ' ' << id;
    out << '\n';
  }
  for (const auto& [task, agent] : result.assignment) {
    out << "task " << task << " winner " << detail::agent_name(agent) << '\n';
  }
  out << "unassigned";
  for (const auto& [task, agent] : result.assignment) {
    if (agent == kNoAgent) out << ' ' << task;
  }
  out << '\n';
  return out.str();
}

inline std::string event_line(const SimEvent& event) {
  nlohmann::ordered_json j;
  j["time"] = event.time;
  j["kind"] = to_string(event.kind);
  j["ids"] = event.ids;
  auto payload = nlohmann::ordered_json::object();
  if (!event.positions.empty()) {
    auto positions = nlohmann::ordered_json::array();
    for (const auto& p : event.positions) positions.push_back(detail::to_json(p));
    payload["positions"] = positions;
  }
  if (event.allocation) {
    const auto& a = *event.allocation;
    payload["converged"] = a.converged;
    payload["rounds"] = a.rounds;
    auto paths = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < a.agents.size(); ++n) {
      paths.push_back(nlohmann::ordered_json{{"agent", a.agents[n]}, {"path", a.paths[n]}});
    }
    payload["paths"] = paths;
    payload["unassigned"] = a.unassigned;
  }
  j["payload"] = payload;
  return j.dump();
}

inline std::string metrics_line(const EpochMetrics& m) {
  nlohmann::ordered_json j;
  j["kind"] = "metrics";
  j["success"] = m.success;
  j["completed"] = m.completed;
  j["neutralizations"] = m.neutralizations;
  j["penetrations"] = m.penetrations;
  j["intruders_spawned"] = m.intruders_spawned;
  j["duration"] = m.duration;
  j["replans"] = m.replans;
  j["nonconverged_replans"] = m.nonconverged_replans;
  j["mean_replan_rounds"] = m.mean_replan_rounds;
  return j.dump();
}

inline std::string emit_report(const EpochMetrics& metrics, const std::vector<SimEvent>& events,
                               ReportFormat format = ReportFormat::events) {
  if (format != ReportFormat::events) detail::unsupported(format, "episodes");
  std::string out;
  for (const auto& e : events) {
    out += event_line(e);
    out += '\n';
  }
  out += metrics_line(metrics);
  out += '\n';
  return out;
}

}  // namespace stmta
