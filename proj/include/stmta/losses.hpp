#pragma once

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stmta/scenario.hpp"

namespace stmta {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Nonnegative loss or INFEASIBLE. INFEASIBLE orders above every finite value
// and absorbs under both + and *.
class Loss {
 public:
  constexpr Loss() = default;

  static Loss of(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::domain_error("loss must be finite and nonnegative");
    }
    return Loss(value);
  }
  static constexpr Loss infeasible() { return Loss(kInfinity); }

  constexpr bool feasible() const { return value_ != kInfinity; }
  // +inf when infeasible.
  constexpr double value() const { return value_; }

  friend constexpr Loss operator+(Loss a, Loss b) {
    if (!a.feasible() || !b.feasible()) return infeasible();
    return Loss(a.value_ + b.value_);
  }
  friend constexpr Loss operator*(Loss a, Loss b) {
    if (!a.feasible() || !b.feasible()) return infeasible();
    return Loss(a.value_ * b.value_);
  }
  constexpr Loss& operator+=(Loss o) { return *this = *this + o; }

  friend constexpr auto operator<=>(const Loss&, const Loss&) = default;

 private:
  constexpr explicit Loss(double v) : value_(v) {}
  double value_{0.0};
};

// Execution order of one evader's tasks.
class Path {
 public:
  Path() = default;
  Path(std::initializer_list<TaskId> ids) {
    for (TaskId id : ids) push_back(id);
  }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  TaskId operator[](std::size_t i) const { return ids_[i]; }
  TaskId front() const { return ids_.front(); }
  std::span<const TaskId> ids() const { return ids_; }

  bool contains(TaskId id) const { return std::find(ids_.begin(), ids_.end(), id) != ids_.end(); }

  // Inserts after the n-th element; n = 0 puts the task at the front.
  void insert(std::size_t n, TaskId id) {
    if (n > ids_.size()) throw std::out_of_range("insertion index past end of path");
    if (contains(id)) throw std::invalid_argument("task " + std::to_string(id) + " already on path");
    ids_.insert(ids_.begin() + static_cast<std::ptrdiff_t>(n), id);
  }
  void push_back(TaskId id) { insert(ids_.size(), id); }
  void erase(TaskId id) { std::erase(ids_, id); }
  void clear() { ids_.clear(); }

  Path inserted(std::size_t n, TaskId id) const {
    Path out = *this;
    out.insert(n, id);
    return out;
  }

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<TaskId> ids_;
};

// Where and when the evader stands before executing a path element.
struct PathContext {
  Vec2 prev_point{};
  double prev_time{0.0};
};

inline double spatial_loss(const SpatioTemporalTask& task, const PathContext& ctx,
                           const Vec2& intruder_position, double eta) {
  return distance(task.neutral_point, ctx.prev_point) +
         eta * distance(task.neutral_point, intruder_position);
}

inline bool temporal_feasible(const SpatioTemporalTask& task, const PathContext& ctx,
                              double evader_max_speed) {
  const double slack = task.intrusion_time - ctx.prev_time;
  return slack > 0.0 && distance(task.neutral_point, ctx.prev_point) / evader_max_speed < slack;
}

inline Loss temporal_loss(const SpatioTemporalTask& task, const PathContext& ctx,
                          double evader_max_speed) {
  if (!temporal_feasible(task, ctx, evader_max_speed)) return Loss::infeasible();
  return Loss::of((1.0 + task.intrusion_time) * (task.intrusion_time - ctx.prev_time));
}

inline Loss composite_loss(const SpatioTemporalTask& task, const PathContext& ctx,
                           const Vec2& intruder_position, const ScenarioConfig& cfg) {
  const Loss temporal = temporal_loss(task, ctx, cfg.evader_max_speed);
  if (!temporal.feasible()) return temporal;
  return Loss::of(spatial_loss(task, ctx, intruder_position, cfg.eta)) * temporal;
}

// Sum of composite losses along `path`, each evaluated against its predecessor
// (the evader itself at time 0 for the first element).
inline Loss path_cost(std::span<const TaskId> path, const Vec2& origin, const TaskTable& tasks,
                      const ScenarioConfig& cfg) {
  Loss total;
  PathContext ctx{origin, 0.0};
  for (TaskId id : path) {
    const std::size_t idx = tasks.checked_index(id);
    const SpatioTemporalTask& task = tasks.at_index(idx);
    total += composite_loss(task, ctx, tasks.intruder_at_index(idx), cfg);
    if (!total.feasible()) return total;
    ctx = {task.neutral_point, task.intrusion_time};
  }
  return total;
}

inline Loss path_cost(const Path& path, const Vec2& origin, const TaskTable& tasks,
                      const ScenarioConfig& cfg) {
  return path_cost(path.ids(), origin, tasks, cfg);
}

// Cheapest insertion of one task into a path. cost is +inf when infeasible,
// and may be negative when the insertion shortens the successor's leg.
struct InsertionBid {
  double cost{kInfinity};
  std::optional<std::size_t> index{};

  bool feasible() const { return index.has_value(); }
};

inline InsertionBid marginal_cost(const Path& path, const Vec2& origin, TaskId candidate,
                                  const TaskTable& tasks, const ScenarioConfig& cfg) {
  if (path.contains(candidate)) return {};
  tasks.checked_index(candidate);
  const Loss base = path_cost(path, origin, tasks, cfg);
  if (!base.feasible()) return {};

  InsertionBid best;
  std::vector<TaskId> trial(path.begin(), path.end());
  trial.insert(trial.begin(), candidate);
  for (std::size_t n = 0; n <= path.size(); ++n) {
    if (n > 0) std::swap(trial[n - 1], trial[n]);
    const Loss extended = path_cost(trial, origin, tasks, cfg);
    if (!extended.feasible()) continue;
    const double delta = extended.value() - base.value();
    if (!best.index || delta < best.cost) best = {delta, n};
  }
  return best;
}

}  // namespace stmta
