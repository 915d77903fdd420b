#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "stmta/cbba.hpp"
#include "stmta/scenario.hpp"

namespace stmta {

// Assignment snapshot attached to replan events.
struct ReplanSnapshot {
  std::vector<AgentId> agents;
  std::vector<std::vector<TaskId>> paths;
  std::vector<TaskId> unassigned;
  int rounds{0};
  bool converged{false};

  friend bool operator==(const ReplanSnapshot&, const ReplanSnapshot&) = default;
};

enum class EventKind { spawn, neutralize, penetrate, replan };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::spawn: return "spawn";
    case EventKind::neutralize: return "neutralize";
    case EventKind::penetrate: return "penetrate";
    case EventKind::replan: return "replan";
  }
  return "unknown";
}

// ids: spawn/penetrate {intruder}; neutralize {intruder, evader}; replan {}.
// positions: spawn/penetrate {intruder}; neutralize {intruder, evader}.
struct SimEvent {
  double time{0.0};
  EventKind kind{EventKind::replan};
  std::vector<int> ids{};
  std::vector<Vec2> positions{};
  std::optional<ReplanSnapshot> allocation{};

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct WorldState {
  double clock{0.0};
  std::int64_t tick{0};
  std::vector<EvaderState> evaders{};
  std::vector<IntruderState> intruders{};  // every intruder ever spawned, by id
  AllocationResult allocation{};
  int intruders_spawned{0};
  int penetrations{0};
  int neutralizations{0};
  int next_intruder_id{0};

  int approaching() const {
    return static_cast<int>(std::count_if(intruders.begin(), intruders.end(), [](const IntruderState& i) {
      return i.status == IntruderStatus::approaching;
    }));
  }

  const IntruderState* find_intruder(int id) const {
    auto it = std::lower_bound(intruders.begin(), intruders.end(), id,
                               [](const IntruderState& s, int v) { return s.id < v; });
    return it != intruders.end() && it->id == id ? &*it : nullptr;
  }
};

// Event times are quantized to microseconds so serialized streams stay tidy.
inline double event_time(double clock) { return std::round(clock * 1e6) / 1e6; }

// Evaders evenly spaced on the airspace boundary, starting at angle 0.
inline std::vector<EvaderState> initial_evaders(const ScenarioConfig& cfg) {
  std::vector<EvaderState> out;
  for (int i = 0; i < cfg.num_evaders; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / cfg.num_evaders;
    EvaderState e;
    e.id = i;
    e.position = cfg.airspace_center +
                 Vec2{cfg.airspace_radius * std::cos(angle), cfg.airspace_radius * std::sin(angle)};
    e.max_speed = cfg.evader_max_speed;
    out.push_back(e);
  }
  return out;
}

namespace detail {

inline void drop_task(WorldState& world, TaskId id) {
  for (auto& e : world.evaders) std::erase(e.current_path, id);
  for (auto& p : world.allocation.paths) p.erase(id);
  if (auto it = world.allocation.assignment.find(id); it != world.allocation.assignment.end()) {
    world.allocation.assignment.erase(it);
  }
}

inline void add_intruder(WorldState& world, const IntruderState& intruder, std::vector<SimEvent>* events) {
  world.intruders.push_back(intruder);
  world.next_intruder_id = std::max(world.next_intruder_id, intruder.id + 1);
  ++world.intruders_spawned;
  if (events) {
    events->push_back({event_time(world.clock), EventKind::spawn, {intruder.id}, {intruder.position}, {}});
  }
}

}  // namespace detail

// Fills free intruder slots; a spawn failure defers the remaining slots to a later tick.
inline void fill_intruder_slots(WorldState& world, const ScenarioConfig& cfg, std::mt19937_64& rng,
                                std::vector<SimEvent>* events = nullptr) {
  while (world.approaching() < cfg.max_concurrent_intruders &&
         world.intruders_spawned < cfg.max_intruders_per_epoch) {
    auto spawned = spawn_intruder(rng, cfg, world.intruders, world.next_intruder_id);
    if (!spawned) return;
    detail::add_intruder(world, *spawned, events);
  }
}

// Advances the world by one sim_dt: kinematics, then capture, then penetration.
inline WorldState step(WorldState world, const ScenarioConfig& cfg, std::vector<SimEvent>* events = nullptr) {
  const double dt = cfg.sim_dt;

  for (auto& intruder : world.intruders) {
    if (intruder.status != IntruderStatus::approaching) continue;
    intruder.position = advance_toward(intruder.position, cfg.airspace_center, intruder.speed * dt);
  }

  for (auto& evader : world.evaders) {
    // Skip path entries whose intruder is gone; head for the first live one.
    std::optional<Vec2> target;
    while (!evader.current_path.empty()) {
      const IntruderState* intruder = world.find_intruder(evader.current_path.front());
      if (intruder && intruder->status == IntruderStatus::approaching &&
          distance(intruder->position, cfg.airspace_center) > cfg.airspace_radius) {
        target = neutralizing_point(*intruder, cfg);
        break;
      }
      evader.current_path.erase(evader.current_path.begin());
    }
    if (target) evader.position = advance_toward(evader.position, *target, evader.max_speed * dt);
  }

  ++world.tick;
  world.clock = static_cast<double>(world.tick) * dt;

  std::vector<TaskId> finished;
  for (auto& intruder : world.intruders) {
    if (intruder.status != IntruderStatus::approaching) continue;
    const EvaderState* captor = nullptr;
    for (const auto& evader : world.evaders) {
      if (distance(evader.position, intruder.position) <= cfg.neutralize_radius) {
        captor = &evader;
        break;
      }
    }
    if (!captor) continue;
    intruder.status = IntruderStatus::neutralized;
    ++world.neutralizations;
    finished.push_back(intruder.id);
    if (events) {
      events->push_back({event_time(world.clock), EventKind::neutralize, {intruder.id, captor->id},
                         {intruder.position, captor->position}, {}});
    }
  }

  for (auto& intruder : world.intruders) {
    if (intruder.status != IntruderStatus::approaching) continue;
    if (distance(intruder.position, cfg.airspace_center) > cfg.airspace_radius) continue;
    intruder.status = IntruderStatus::penetrated;
    ++world.penetrations;
    finished.push_back(intruder.id);
    if (events) {
      events->push_back({event_time(world.clock), EventKind::penetrate, {intruder.id}, {intruder.position}, {}});
    }
  }

  for (TaskId id : finished) detail::drop_task(world, id);
  return world;
}

// Re-solves the allocation from scratch over the current intruders.
inline WorldState replan(WorldState world, const ScenarioConfig& cfg, std::vector<SimEvent>* events = nullptr) {
  const TaskTable tasks = tasks_from_intruders(world.intruders, cfg);
  world.allocation = resolve(world.evaders, tasks, cfg);
  for (auto& evader : world.evaders) {
    const Path& path = world.allocation.path_of(evader.id);
    evader.current_path.assign(path.begin(), path.end());
  }
  if (events) {
    ReplanSnapshot snap;
    snap.agents = world.allocation.agents;
    for (const auto& p : world.allocation.paths) snap.paths.emplace_back(p.begin(), p.end());
    snap.unassigned = world.allocation.unassigned();
    snap.rounds = world.allocation.rounds_used;
    snap.converged = world.allocation.converged;
    events->push_back({event_time(world.clock), EventKind::replan, {}, {}, std::move(snap)});
  }
  return world;
}

struct EpochMetrics {
  bool success{false};    // no intruder penetrated before the episode ended
  bool completed{false};  // every permitted intruder was spawned and neutralized
  int neutralizations{0};
  int penetrations{0};
  int intruders_spawned{0};
  double duration{0.0};
  int replans{0};
  int nonconverged_replans{0};
  double mean_replan_rounds{0.0};

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

// Opening scene: evaders on the boundary, then either the scripted intruders or
// a random spawn filling every free slot.
inline WorldState initial_world(const ScenarioConfig& cfg, std::mt19937_64& rng,
                                std::vector<SimEvent>* events = nullptr) {
  WorldState world;
  world.evaders = initial_evaders(cfg);
  if (!cfg.initial_intruders.empty()) {
    for (const Vec2& p : cfg.initial_intruders) {
      detail::add_intruder(world, {world.next_intruder_id, p, cfg.intruder_speed, IntruderStatus::approaching},
                           events);
    }
  } else {
    fill_intruder_slots(world, cfg, rng, events);
  }
  return world;
}

// Runs one closed-loop episode. Ends on the first penetration, once every
// permitted intruder has been spawned and neutralized, or at the horizon.
inline EpochMetrics run_episode(const ScenarioConfig& cfg, std::uint64_t seed,
                                std::vector<SimEvent>* events = nullptr) {
  std::mt19937_64 rng(seed);
  WorldState world = initial_world(cfg, rng, events);
  const auto replan_every = std::max<std::int64_t>(1, std::llround(cfg.replan_interval / cfg.sim_dt));
  const auto max_ticks = static_cast<std::int64_t>(std::ceil(cfg.horizon / cfg.sim_dt - 1e-9));

  EpochMetrics metrics;
  long total_rounds = 0;
  auto do_replan = [&] {
    world = replan(std::move(world), cfg, events);
    ++metrics.replans;
    total_rounds += world.allocation.rounds_used;
    if (!world.allocation.converged) ++metrics.nonconverged_replans;
  };
  auto all_done = [&] {
    return world.intruders_spawned >= cfg.max_intruders_per_epoch && world.approaching() == 0;
  };

  do_replan();
  while (!all_done() && world.tick < max_ticks) {
    world = step(std::move(world), cfg, events);
    if (world.penetrations > 0) break;
    fill_intruder_slots(world, cfg, rng, events);
    if (all_done()) break;
    if (world.tick % replan_every == 0) do_replan();
  }

  metrics.penetrations = world.penetrations;
  metrics.neutralizations = world.neutralizations;
  metrics.intruders_spawned = world.intruders_spawned;
  metrics.success = world.penetrations == 0;
  metrics.completed = metrics.success && all_done();
  metrics.duration = event_time(world.clock);
  metrics.mean_replan_rounds = metrics.replans ? static_cast<double>(total_rounds) / metrics.replans : 0.0;
  return metrics;
}

}  // namespace stmta
