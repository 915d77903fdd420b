#pragma once

// Exhaustive solver for the assignment integer program on small instances.
// Every split of tasks among agents (or left unassigned) is scored with the
// best execution order per agent; infeasible paths are discarded. Optimality
// is lexicographic: most tasks assigned first, then least total path cost.

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stmta/losses.hpp"
#include "stmta/scenario.hpp"

namespace stmta {

class OracleSizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct OracleResult {
  std::vector<AgentId> agents{};  // input order
  std::vector<Path> paths{};
  std::map<TaskId, AgentId> assignment{};  // kNoAgent when unassigned
  std::size_t assigned{0};
  double cost{0.0};
  // Minimum total cost over feasible assignments covering exactly k tasks,
  // +inf when no such assignment exists.
  std::vector<double> best_cost_by_count{};
};

inline OracleResult brute_force_oracle(std::span<const EvaderState> evaders, const TaskTable& tasks,
                                       const ScenarioConfig& cfg, std::size_t max_tasks = 8) {
  const std::size_t task_count = tasks.size();
  const std::size_t agent_count = evaders.size();
  if (task_count > max_tasks) {
    throw OracleSizeError("oracle refuses " + std::to_string(task_count) + " tasks (cap " +
                          std::to_string(max_tasks) + ")");
  }
  if (agent_count == 0) throw std::invalid_argument("oracle needs at least one agent");

  // Best order and cost for every (agent, task subset).
  const std::size_t subsets = std::size_t{1} << task_count;
  std::vector<std::vector<double>> best_cost(agent_count, std::vector<double>(subsets, kInfinity));
  std::vector<std::vector<std::vector<TaskId>>> best_order(agent_count,
                                                           std::vector<std::vector<TaskId>>(subsets));
  for (std::size_t a = 0; a < agent_count; ++a) {
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      std::vector<TaskId> order;
      for (std::size_t j = 0; j < task_count; ++j) {
        if (mask & (std::size_t{1} << j)) order.push_back(tasks.at_index(j).task_id);
      }
      do {
        const Loss cost = path_cost(order, evaders[a].position, tasks, cfg);
        if (cost.feasible() && cost.value() < best_cost[a][mask]) {
          best_cost[a][mask] = cost.value();
          best_order[a][mask] = order;
        }
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }

  OracleResult result;
  result.best_cost_by_count.assign(task_count + 1, kInfinity);
  std::vector<std::size_t> owner(task_count, 0);  // agent_count means unassigned
  std::vector<std::size_t> best_owner;
  std::vector<std::size_t> masks(agent_count);
  std::size_t best_assigned = 0;
  double best_total = kInfinity;

  while (true) {
    std::fill(masks.begin(), masks.end(), 0);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < task_count; ++j) {
      if (owner[j] < agent_count) {
        masks[owner[j]] |= std::size_t{1} << j;
        ++assigned;
      }
    }
    double total = 0.0;
    for (std::size_t a = 0; a < agent_count && total != kInfinity; ++a) total += best_cost[a][masks[a]];
    if (total != kInfinity) {
      result.best_cost_by_count[assigned] = std::min(result.best_cost_by_count[assigned], total);
      if (best_owner.empty() || assigned > best_assigned || (assigned == best_assigned && total < best_total)) {
        best_owner = owner;
        best_assigned = assigned;
        best_total = total;
      }
    }
    // Odometer over owner[] in base agent_count + 1.
    std::size_t pos = 0;
    while (pos < task_count && owner[pos] == agent_count) owner[pos++] = 0;
    if (pos == task_count) break;
    ++owner[pos];
  }

  for (const auto& e : evaders) result.agents.push_back(e.id);
  std::fill(masks.begin(), masks.end(), 0);
  for (std::size_t j = 0; j < task_count; ++j) {
    const AgentId who = best_owner[j] < agent_count ? evaders[best_owner[j]].id : kNoAgent;
    result.assignment[tasks.at_index(j).task_id] = who;
    if (best_owner[j] < agent_count) masks[best_owner[j]] |= std::size_t{1} << j;
  }
  for (std::size_t a = 0; a < agent_count; ++a) {
    Path p;
    for (TaskId id : best_order[a][masks[a]]) p.push_back(id);
    result.paths.push_back(std::move(p));
  }
  result.assigned = best_assigned;
  result.cost = best_total;
  return result;
}

}  // namespace stmta
