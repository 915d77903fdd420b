#pragma once

// Modified consensus-based bundle auction. Each agent greedily grows a bundle
// by cheapest-insertion bids, agents exchange winning-cost (y) and winner (z)
// tables over a synchronous all-to-all bus, and an agent that loses any task
// drops its whole bundle and path before bidding again.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stmta/losses.hpp"
#include "stmta/scenario.hpp"

namespace stmta {

// y and z are indexed by position in the TaskTable the belief was built for;
// task_ids records that table's ids in the same order.
struct AgentBelief {
  AgentId agent_id{kNoAgent};
  std::vector<TaskId> bundle{};
  Path path{};
  std::vector<double> winning_cost{};
  std::vector<AgentId> winner{};
  std::vector<TaskId> task_ids{};

  static AgentBelief fresh(AgentId id, const TaskTable& tasks) {
    AgentBelief b;
    b.agent_id = id;
    b.winning_cost.assign(tasks.size(), kInfinity);
    b.winner.assign(tasks.size(), kNoAgent);
    for (const auto& t : tasks.tasks()) b.task_ids.push_back(t.task_id);
    return b;
  }

  std::size_t index_of(TaskId id) const {
    const auto it = std::lower_bound(task_ids.begin(), task_ids.end(), id);
    if (it == task_ids.end() || *it != id) throw std::out_of_range("task not in belief");
    return static_cast<std::size_t>(it - task_ids.begin());
  }

  bool owns(TaskId id) const { return winner[index_of(id)] == agent_id; }

  friend bool operator==(const AgentBelief&, const AgentBelief&) = default;

  // set(bundle) == set(path), owned bundle entries name this agent, y = inf <=> z = none.
  bool consistent(const TaskTable& tasks) const {
    if (winning_cost.size() != tasks.size() || winner.size() != tasks.size() ||
        task_ids.size() != tasks.size()) {
      return false;
    }
    if (bundle.size() != path.size()) return false;
    for (TaskId id : bundle) {
      if (!path.contains(id)) return false;
      const auto idx = tasks.index_of(id);
      if (!idx || winner[*idx] != agent_id) return false;
    }
    for (std::size_t j = 0; j < winner.size(); ++j) {
      if ((winning_cost[j] == kInfinity) != (winner[j] == kNoAgent)) return false;
    }
    return true;
  }
};

struct ConsensusMessage {
  AgentId sender{kNoAgent};
  std::vector<double> winning_cost{};
  std::vector<AgentId> winner{};

  static ConsensusMessage from(const AgentBelief& belief) {
    return {belief.agent_id, belief.winning_cost, belief.winner};
  }
};

struct ConsensusOutcome {
  AgentBelief belief;
  std::vector<TaskId> lost_tasks;
};

struct AllocationResult {
  std::vector<AgentId> agents{};  // ascending
  std::vector<Path> paths{};      // parallel to agents
  std::map<TaskId, AgentId> assignment{};  // kNoAgent when unassigned
  int rounds_used{0};
  bool converged{false};
  std::vector<AgentBelief> beliefs{};

  const Path& path_of(AgentId id) const {
    const auto it = std::lower_bound(agents.begin(), agents.end(), id);
    if (it == agents.end() || *it != id) throw std::out_of_range("unknown agent");
    return paths[static_cast<std::size_t>(it - agents.begin())];
  }

  std::vector<TaskId> unassigned() const {
    std::vector<TaskId> out;
    for (const auto& [task, agent] : assignment) {
      if (agent == kNoAgent) out.push_back(task);
    }
    return out;
  }

  std::size_t assigned_count() const { return assignment.size() - unassigned().size(); }
};

// Greedy bundle construction: keep adding the cheapest task whose insertion
// bid beats the currently known winning cost until no such task remains.
inline AgentBelief build_bundle(AgentBelief belief, const Vec2& origin, const TaskTable& tasks,
                                const ScenarioConfig& cfg) {
  const std::size_t count = tasks.size();
  std::vector<char> in_bundle(count, 0);
  for (TaskId id : belief.bundle) in_bundle[tasks.checked_index(id)] = 1;

  // Published bids never fall below the last bid already in the bundle.
  double floor = -kInfinity;
  if (!belief.bundle.empty()) floor = belief.winning_cost[tasks.checked_index(belief.bundle.back())];

  while (true) {
    std::optional<std::size_t> best_task;
    InsertionBid best_bid;
    for (std::size_t j = 0; j < count; ++j) {
      if (in_bundle[j]) continue;
      const InsertionBid bid = marginal_cost(belief.path, origin, tasks.at_index(j).task_id, tasks, cfg);
      if (!bid.feasible() || !(std::max(bid.cost, floor) < belief.winning_cost[j])) continue;
      if (!best_task || bid.cost < best_bid.cost) {
        best_task = j;
        best_bid = bid;
      }
    }
    if (!best_task) break;

    const TaskId id = tasks.at_index(*best_task).task_id;
    floor = std::max(best_bid.cost, floor);
    belief.path.insert(*best_bid.index, id);
    belief.bundle.push_back(id);
    belief.winning_cost[*best_task] = floor;
    belief.winner[*best_task] = belief.agent_id;
    in_bundle[*best_task] = 1;
  }
  return belief;
}

// One pairwise consensus update against a peer's (y, z).
//   sender claims itself, receiver already credits sender         -> update
//   sender claims itself with a lower bid (ties: lower agent id)  -> update
//   sender credits receiver while receiver credits sender         -> reset
//   sender credits a third agent m, receiver does not, y_m < y_i  -> reset
//   sender reports none while receiver credits sender             -> update
// Any bundled task whose winner moves away from the receiver is reported lost.
inline ConsensusOutcome consensus_step(AgentBelief belief, const ConsensusMessage& msg) {
  if (msg.sender == belief.agent_id) throw std::invalid_argument("consensus with self");
  if (msg.winner.size() != belief.winner.size() || msg.winning_cost.size() != belief.winning_cost.size()) {
    throw std::invalid_argument("consensus message covers a different task set");
  }
  const AgentId self = belief.agent_id;
  const AgentId k = msg.sender;
  for (std::size_t j = 0; j < belief.winner.size(); ++j) {
    const AgentId zk = msg.winner[j];
    const AgentId zi = belief.winner[j];
    const double yk = msg.winning_cost[j];
    const double yi = belief.winning_cost[j];
    enum class Action { keep, update, reset } action = Action::keep;

    if (zk == k) {
      if (zi == k) {
        action = Action::update;
      } else if (yk < yi || (yk == yi && zi != kNoAgent && k < zi)) {
        action = Action::update;
      }
    } else if (zk == self) {
      if (zi == k) action = Action::reset;
    } else if (zk != kNoAgent) {
      if (zi != zk && yk < yi) action = Action::reset;
    } else if (zi == k) {
      action = Action::update;
    }

    if (action == Action::update) {
      belief.winning_cost[j] = yk;
      belief.winner[j] = zk;
    } else if (action == Action::reset) {
      belief.winning_cost[j] = kInfinity;
      belief.winner[j] = kNoAgent;
    }
  }

  std::vector<TaskId> lost;
  for (TaskId id : belief.bundle) {
    if (!belief.owns(id)) lost.push_back(id);
  }
  return {std::move(belief), std::move(lost)};
}

// Losing any task invalidates the whole path. Tasks still credited to this
// agent are reset so they can be re-bid; winners learned from peers are kept.
inline AgentBelief release_on_loss(AgentBelief belief, std::span<const TaskId> lost_tasks) {
  if (lost_tasks.empty()) return belief;
  for (TaskId id : belief.bundle) {
    const std::size_t j = belief.index_of(id);
    if (belief.winner[j] == belief.agent_id) {
      belief.winner[j] = kNoAgent;
      belief.winning_cost[j] = kInfinity;
    }
  }
  belief.bundle.clear();
  belief.path.clear();
  return belief;
}

inline int default_max_rounds(std::size_t agents, std::size_t tasks) {
  return std::max<int>(1, static_cast<int>(4 * agents * tasks));
}

// Runs synchronous rounds (build -> broadcast -> consensus) until every agent
// holds the same winner table, no agent lost a task in the round and no agent
// could grow its bundle further, or the round cap is hit. `initial` warm-starts from existing beliefs; otherwise
// every agent starts fresh.
inline AllocationResult resolve(std::span<const EvaderState> evaders, const TaskTable& tasks,
                                const ScenarioConfig& cfg,
                                std::optional<std::vector<AgentBelief>> initial = std::nullopt) {
  if (evaders.empty()) throw std::invalid_argument("resolve needs at least one agent");

  std::vector<std::size_t> order(evaders.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return evaders[a].id < evaders[b].id; });

  std::vector<AgentBelief> beliefs;
  if (initial) {
    if (initial->size() != evaders.size()) throw std::invalid_argument("one belief per agent required");
    beliefs = std::move(*initial);
    std::sort(beliefs.begin(), beliefs.end(),
              [](const AgentBelief& a, const AgentBelief& b) { return a.agent_id < b.agent_id; });
    for (std::size_t n = 0; n < order.size(); ++n) {
      if (beliefs[n].agent_id != evaders[order[n]].id || !beliefs[n].consistent(tasks)) {
        throw std::invalid_argument("initial belief does not match agents or task table");
      }
    }
  } else {
    for (std::size_t idx : order) beliefs.push_back(AgentBelief::fresh(evaders[idx].id, tasks));
  }

  const int max_rounds = cfg.consensus_max_rounds > 0
                             ? cfg.consensus_max_rounds
                             : default_max_rounds(evaders.size(), tasks.size());
  AllocationResult result;
  std::vector<ConsensusMessage> inbox;
  inbox.reserve(beliefs.size());

  for (int round = 1; round <= max_rounds; ++round) {
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
      beliefs[n] = build_bundle(std::move(beliefs[n]), evaders[order[n]].position, tasks, cfg);
    }
    inbox.clear();
    for (const auto& b : beliefs) inbox.push_back(ConsensusMessage::from(b));

    bool any_lost = false;
    for (auto& belief : beliefs) {
      std::vector<TaskId> lost;
      for (const auto& msg : inbox) {
        if (msg.sender == belief.agent_id) continue;
        auto step = consensus_step(std::move(belief), msg);
        belief = std::move(step.belief);
        for (TaskId id : step.lost_tasks) {
          if (std::find(lost.begin(), lost.end(), id) == lost.end()) lost.push_back(id);
        }
      }
      if (!lost.empty()) any_lost = true;
      belief = release_on_loss(std::move(belief), lost);
    }

    result.rounds_used = round;
    const bool agreed = std::all_of(beliefs.begin(), beliefs.end(), [&](const AgentBelief& b) {
      return b.winner == beliefs.front().winner;
    });
    // Agreement can also be reached on a task everyone just reset to none;
    // only stop once no agent would bid again.
    if (agreed && !any_lost) {
      const bool settled = std::all_of(beliefs.begin(), beliefs.end(), [&](const AgentBelief& b) {
        const auto n = static_cast<std::size_t>(&b - beliefs.data());
        return build_bundle(b, evaders[order[n]].position, tasks, cfg) == b;
      });
      if (settled) {
        result.converged = true;
        break;
      }
    }
  }

  for (const auto& b : beliefs) {
    result.agents.push_back(b.agent_id);
    result.paths.push_back(b.path);
  }
  for (const auto& t : tasks.tasks()) result.assignment[t.task_id] = kNoAgent;

  // A task claimed on several paths (only possible without convergence) stays
  // with the lowest bid; dropping a path element never breaks feasibility of
  // the remaining elements.
  for (const auto& t : tasks.tasks()) {
    const std::size_t j = tasks.checked_index(t.task_id);
    std::optional<std::size_t> holder;
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
      if (!result.paths[n].contains(t.task_id)) continue;
      if (!holder || beliefs[n].winning_cost[j] < beliefs[*holder].winning_cost[j]) holder = n;
    }
    if (!holder) continue;
    result.assignment[t.task_id] = beliefs[*holder].agent_id;
    for (std::size_t n = 0; n < beliefs.size(); ++n) {
      if (n != *holder) result.paths[n].erase(t.task_id);
    }
  }
  result.beliefs = std::move(beliefs);
  return result;
}

}  // namespace stmta
