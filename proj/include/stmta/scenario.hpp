#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stmta/geometry.hpp"

namespace stmta {

using TaskId = int;
using AgentId = int;

inline constexpr AgentId kNoAgent = -1;

// Raised when a neutralizing point is requested for an intruder that is not
// strictly outside the restricted airspace.
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// World, kinematic and algorithm parameters. Defaults reproduce the reference
// case study: R = 100 m, r = 20 m, v_I = 3 m/s, v_E = 4.5 m/s, 3 evaders.
struct ScenarioConfig {
  Vec2 airspace_center{0.0, 0.0};
  double airspace_radius{100.0};
  double neutralize_radius{20.0};
  double intruder_speed{3.0};
  double evader_max_speed{4.5};
  double eta{0.5};
  int num_evaders{3};
  int max_concurrent_intruders{6};
  double spawn_radius_min{180.0};
  double spawn_radius_max{250.0};
  double min_radial_separation{40.0};
  double sim_dt{0.1};
  double replan_interval{0.5};
  int max_intruders_per_epoch{30};
  double horizon{200.0};
  std::uint64_t rng_seed{1};
  // 0 selects 4 * agents * tasks at resolve time.
  int consensus_max_rounds{0};
  // Optional scripted opening scene; replaces the random initial spawn.
  std::vector<Vec2> initial_intruders{};

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Parse or validation failure for a scenario config; carries the field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(airspace_center.finite(), "airspace_center", "must be finite");
  require(std::isfinite(airspace_radius) && airspace_radius > 0.0, "airspace_radius", "must be > 0");
  require(std::isfinite(neutralize_radius) && neutralize_radius > 0.0 &&
              neutralize_radius < airspace_radius,
          "neutralize_radius", "must satisfy 0 < r < airspace_radius");
  require(std::isfinite(intruder_speed) && intruder_speed > 0.0, "intruder_speed", "must be > 0");
  require(std::isfinite(evader_max_speed) && evader_max_speed > intruder_speed, "evader_max_speed",
          "must exceed intruder_speed");
  require(eta > 0.0 && eta < 1.0, "eta", "must lie in (0, 1)");
  require(num_evaders >= 1, "num_evaders", "must be >= 1");
  require(max_concurrent_intruders >= 0, "max_concurrent_intruders", "must be >= 0");
  require(std::isfinite(spawn_radius_min) && spawn_radius_min > airspace_radius, "spawn_radius_min",
          "must exceed airspace_radius");
  require(std::isfinite(spawn_radius_max) && spawn_radius_max >= spawn_radius_min,
          "spawn_radius_max", "must be >= spawn_radius_min");
  require(std::isfinite(min_radial_separation) && min_radial_separation >= 0.0,
          "min_radial_separation", "must be >= 0");
  require(std::isfinite(sim_dt) && sim_dt > 0.0, "sim_dt", "must be > 0");
  require(std::isfinite(replan_interval) && replan_interval >= sim_dt, "replan_interval",
          "must be >= sim_dt");
  require(max_intruders_per_epoch >= 0, "max_intruders_per_epoch", "must be >= 0");
  require(std::isfinite(horizon) && horizon > 0.0, "horizon", "must be > 0");
  require(consensus_max_rounds >= 0, "consensus_max_rounds", "must be >= 0");
  for (const auto& p : initial_intruders) {
    require(p.finite() && distance(p, airspace_center) > airspace_radius, "initial_intruders",
            "every position must be finite and outside airspace_radius");
  }
}

enum class IntruderStatus { approaching, neutralized, penetrated };

struct IntruderState {
  int id{0};
  Vec2 position{};
  double speed{0.0};
  IntruderStatus status{IntruderStatus::approaching};
};

struct EvaderState {
  AgentId id{0};
  Vec2 position{};
  double max_speed{0.0};
  std::vector<TaskId> current_path{};
};

// One intruder's capture requirement: be at `neutral_point` no later than
// `intrusion_time` seconds from now.
struct SpatioTemporalTask {
  TaskId task_id{0};
  Vec2 neutral_point{};
  double intrusion_time{0.0};

  friend bool operator==(const SpatioTemporalTask&, const SpatioTemporalTask&) = default;
};

inline Vec2 neutralizing_point(const IntruderState& intruder, const ScenarioConfig& cfg) {
  const Vec2 offset = intruder.position - cfg.airspace_center;
  const double dist = offset.norm();
  if (!(dist > cfg.airspace_radius)) {
    throw GeometryError("intruder " + std::to_string(intruder.id) +
                        " is not outside the restricted airspace");
  }
  return cfg.airspace_center + (cfg.airspace_radius / dist) * offset;
}

inline double time_of_intrusion(const IntruderState& intruder, const Vec2& neutral_point) {
  if (!(intruder.speed > 0.0)) {
    throw std::invalid_argument("intruder " + std::to_string(intruder.id) +
                                " has non-positive speed");
  }
  return distance(intruder.position, neutral_point) / intruder.speed;
}

// Tasks plus the intruder positions they came from, sorted by task id.
class TaskTable {
 public:
  TaskTable() = default;

  void add(const SpatioTemporalTask& task, const Vec2& intruder_position) {
    auto it = std::lower_bound(tasks_.begin(), tasks_.end(), task.task_id,
                               [](const SpatioTemporalTask& t, TaskId id) { return t.task_id < id; });
    if (it != tasks_.end() && it->task_id == task.task_id) {
      throw std::invalid_argument("duplicate task id " + std::to_string(task.task_id));
    }
    const auto pos = static_cast<std::size_t>(it - tasks_.begin());
    tasks_.insert(it, task);
    intruders_.insert(intruders_.begin() + static_cast<std::ptrdiff_t>(pos), intruder_position);
  }

  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }

  std::span<const SpatioTemporalTask> tasks() const { return tasks_; }

  const SpatioTemporalTask& at_index(std::size_t index) const { return tasks_[index]; }
  const Vec2& intruder_at_index(std::size_t index) const { return intruders_[index]; }

  std::optional<std::size_t> index_of(TaskId id) const {
    auto it = std::lower_bound(tasks_.begin(), tasks_.end(), id,
                               [](const SpatioTemporalTask& t, TaskId v) { return t.task_id < v; });
    if (it == tasks_.end() || it->task_id != id) return std::nullopt;
    return static_cast<std::size_t>(it - tasks_.begin());
  }

  std::size_t checked_index(TaskId id) const {
    const auto idx = index_of(id);
    if (!idx) throw std::out_of_range("unknown task id " + std::to_string(id));
    return *idx;
  }

  const SpatioTemporalTask& task(TaskId id) const { return tasks_[checked_index(id)]; }
  const Vec2& intruder_position(TaskId id) const { return intruders_[checked_index(id)]; }

  friend bool operator==(const TaskTable&, const TaskTable&) = default;

 private:
  std::vector<SpatioTemporalTask> tasks_;
  std::vector<Vec2> intruders_;
};

inline TaskTable tasks_from_intruders(std::span<const IntruderState> intruders,
                                      const ScenarioConfig& cfg) {
  TaskTable table;
  for (const auto& intruder : intruders) {
    if (intruder.status != IntruderStatus::approaching) continue;
    const Vec2 point = neutralizing_point(intruder, cfg);
    table.add({intruder.id, point, time_of_intrusion(intruder, point)}, intruder.position);
  }
  return table;
}

// Uniform double in [0, 1) from the top 53 bits; identical across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline constexpr int kSpawnRetryBudget = 64;

// Samples a new intruder in the spawn annulus whose distance to the center
// differs by at least min_radial_separation from every approaching intruder.
// Returns nullopt when the retry budget runs out; the caller tries again later.
inline std::optional<IntruderState> spawn_intruder(std::mt19937_64& rng, const ScenarioConfig& cfg,
                                                   std::span<const IntruderState> existing,
                                                   int fresh_id) {
  for (int attempt = 0; attempt < kSpawnRetryBudget; ++attempt) {
    const double angle = 2.0 * std::numbers::pi * unit_uniform(rng);
    const double radius = cfg.spawn_radius_min +
                          (cfg.spawn_radius_max - cfg.spawn_radius_min) * unit_uniform(rng);
    const bool separated = std::all_of(existing.begin(), existing.end(), [&](const IntruderState& e) {
      if (e.status != IntruderStatus::approaching) return true;
      const double other = distance(e.position, cfg.airspace_center);
      return std::abs(radius - other) >= cfg.min_radial_separation;
    });
    if (!separated) continue;
    IntruderState spawned;
    spawned.id = fresh_id;
    spawned.position = cfg.airspace_center + Vec2{radius * std::cos(angle), radius * std::sin(angle)};
    spawned.speed = cfg.intruder_speed;
    spawned.status = IntruderStatus::approaching;
    return spawned;
  }
  return std::nullopt;
}

}  // namespace stmta
