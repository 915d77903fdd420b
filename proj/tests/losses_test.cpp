#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stmta/losses.hpp"

namespace stmta {
namespace {

// Independent re-derivation of the loss formulas from raw coordinates; shares
// no code with the implementation beyond the data types.
struct Ref {
  static double dist(double ax, double ay, double bx, double by) {
    return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
  }
  // +inf encodes infeasible.
  static double step_loss(const SpatioTemporalTask& t, Vec2 intruder, Vec2 prev, double prev_time, double eta,
                          double vmax) {
    const double leg = dist(t.neutral_point.x, t.neutral_point.y, prev.x, prev.y);
    const double slack = t.intrusion_time - prev_time;
    if (!(slack > 0) || !(leg / vmax < slack)) return INFINITY;
    const double spatial = leg + eta * dist(t.neutral_point.x, t.neutral_point.y, intruder.x, intruder.y);
    return spatial * (1 + t.intrusion_time) * slack;
  }
  static double walk(const std::vector<TaskId>& path, Vec2 origin, const TaskTable& tasks, const ScenarioConfig& cfg) {
    double total = 0;
    Vec2 prev = origin;
    double prev_time = 0;
    for (TaskId id : path) {
      const auto& t = tasks.task(id);
      total += step_loss(t, tasks.intruder_position(id), prev, prev_time, cfg.eta, cfg.evader_max_speed);
      prev = t.neutral_point;
      prev_time = t.intrusion_time;
    }
    return total;
  }
};

const SpatioTemporalTask kTask{1, {100, 0}, 50.0};
const PathContext kFromCorner{{0, 100}, 0.0};
const Vec2 kIntruder{250, 0};

TEST(SpatialLoss, WorkedExample) {
  const double expected = Ref::dist(100, 0, 0, 100) + 0.5 * Ref::dist(100, 0, 250, 0);
  EXPECT_NEAR(expected, 216.421, 1e-3);
  EXPECT_NEAR(spatial_loss(kTask, kFromCorner, kIntruder, 0.5), expected, 1e-12);
}

TEST(SpatialLoss, ZeroWhenEverythingCoincides) {
  EXPECT_EQ(spatial_loss(kTask, {kTask.neutral_point, 0.0}, kTask.neutral_point, 0.5), 0.0);
}

TEST(SpatialLoss, SmallEtaLeavesTravelTerm) {
  EXPECT_NEAR(spatial_loss(kTask, kFromCorner, kIntruder, 1e-6), 141.421, 1e-3);
}

TEST(TemporalFeasible, WorkedExamples) {
  EXPECT_NEAR(Ref::dist(100, 0, 0, 100) / 4.5, 31.43, 1e-2);
  EXPECT_TRUE(temporal_feasible(kTask, kFromCorner, 4.5));
  SpatioTemporalTask soon = kTask;
  soon.intrusion_time = 20.0;
  EXPECT_FALSE(temporal_feasible(soon, kFromCorner, 4.5));
  SpatioTemporalTask earlier = kTask;
  earlier.intrusion_time = 10.0;
  EXPECT_FALSE(temporal_feasible(earlier, {kTask.neutral_point, 20.0}, 4.5));
}

TEST(TemporalFeasible, TravelTimeBoundaryIsStrict) {
  // 45 m at 4.5 m/s takes exactly 10 s.
  const SpatioTemporalTask t{1, {45, 0}, 10.0};
  EXPECT_FALSE(temporal_feasible(t, {{0, 0}, 0.0}, 4.5));
  EXPECT_TRUE(temporal_feasible(t, {{0, 0}, 0.0}, 4.6));
}

TEST(TemporalLoss, WorkedExamples) {
  EXPECT_EQ(temporal_loss(kTask, kFromCorner, 4.5), Loss::of(51.0 * 50.0));
  EXPECT_NEAR(temporal_loss(kTask, kFromCorner, 4.5).value(), 2550.0, 1e-9);
  SpatioTemporalTask soon = kTask;
  soon.intrusion_time = 20.0;
  EXPECT_FALSE(temporal_loss(soon, kFromCorner, 4.5).feasible());
  EXPECT_FALSE(temporal_loss(kTask, {kTask.neutral_point, 50.0}, 4.5).feasible());
}

TEST(CompositeLoss, WorkedExamples) {
  ScenarioConfig cfg;
  const double expected = Ref::step_loss(kTask, kIntruder, kFromCorner.prev_point, 0.0, 0.5, 4.5);
  EXPECT_NEAR(expected, 551873.6, 1.0);
  const Loss got = composite_loss(kTask, kFromCorner, kIntruder, cfg);
  EXPECT_NEAR(got.value(), expected, 1e-9 * expected);

  SpatioTemporalTask soon = kTask;
  soon.intrusion_time = 20.0;
  EXPECT_FALSE(composite_loss(soon, kFromCorner, kIntruder, cfg).feasible());
  EXPECT_EQ(composite_loss(kTask, {kTask.neutral_point, 0.0}, kTask.neutral_point, cfg).value(), 0.0);
}

TEST(Loss, InfeasibleOrdersAboveAndAbsorbs) {
  const Loss inf = Loss::infeasible();
  EXPECT_GT(inf, Loss::of(1e300));
  EXPECT_FALSE((inf + Loss::of(1)).feasible());
  EXPECT_FALSE((Loss::of(0) * inf).feasible());
  EXPECT_EQ(Loss::of(2) * Loss::of(3), Loss::of(6));
  EXPECT_THROW(Loss::of(-1.0), std::domain_error);
  EXPECT_THROW(Loss::of(NAN), std::domain_error);
}

TEST(Path, InsertAfterNth) {
  Path p{4, 5};
  EXPECT_EQ(p.inserted(0, 9), (Path{9, 4, 5}));
  EXPECT_EQ(p.inserted(1, 9), (Path{4, 9, 5}));
  EXPECT_EQ(p.inserted(2, 9), (Path{4, 5, 9}));
  EXPECT_THROW(p.insert(3, 9), std::out_of_range);
  EXPECT_THROW(p.insert(0, 4), std::invalid_argument);
}

class TwoTaskFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    tasks.add({1, {100, 0}, 50.0}, {250, 0});
    tasks.add({2, {0, 100}, 90.0}, {0, 370});
  }
  ScenarioConfig cfg;
  TaskTable tasks;
  Vec2 evader{0, -50};
};

TEST_F(TwoTaskFixture, EmptyPathCostsNothing) {
  EXPECT_EQ(path_cost(Path{}, evader, tasks, cfg), Loss::of(0));
}

TEST_F(TwoTaskFixture, SingleTaskEqualsCompositeFromEvader) {
  EXPECT_EQ(path_cost(Path{1}, evader, tasks, cfg),
            composite_loss(tasks.task(1), {evader, 0.0}, tasks.intruder_position(1), cfg));
}

TEST_F(TwoTaskFixture, TwoTaskPathIsSequential) {
  // Hand evaluation: task 1 from the evader, then task 2 from task 1's point and time.
  const double first = (Ref::dist(100, 0, 0, -50) + 0.5 * 150.0) * 51.0 * 50.0;
  const double second = (Ref::dist(0, 100, 100, 0) + 0.5 * 270.0) * 91.0 * 40.0;
  EXPECT_NEAR(path_cost(Path{1, 2}, evader, tasks, cfg).value(), first + second, 1e-9 * (first + second));
  EXPECT_NEAR(Ref::walk({1, 2}, evader, tasks, cfg), first + second, 1e-6);
  // Reverse order runs backwards in time.
  EXPECT_FALSE(path_cost(Path{2, 1}, evader, tasks, cfg).feasible());
}

TEST_F(TwoTaskFixture, UnknownTaskIdThrows) {
  EXPECT_THROW(path_cost(Path{3}, evader, tasks, cfg), std::out_of_range);
  EXPECT_THROW(marginal_cost(Path{}, evader, 3, tasks, cfg), std::out_of_range);
}

TEST_F(TwoTaskFixture, MarginalOnEmptyPathIsStandaloneLoss) {
  const InsertionBid bid = marginal_cost(Path{}, evader, 1, tasks, cfg);
  ASSERT_TRUE(bid.feasible());
  EXPECT_EQ(*bid.index, 0u);
  EXPECT_EQ(bid.cost, path_cost(Path{1}, evader, tasks, cfg).value());
}

TEST_F(TwoTaskFixture, MarginalOfTaskAlreadyOnPathIsInfeasible) {
  const InsertionBid bid = marginal_cost(Path{1}, evader, 1, tasks, cfg);
  EXPECT_FALSE(bid.feasible());
  EXPECT_EQ(bid.cost, kInfinity);
}

TEST_F(TwoTaskFixture, MarginalPicksCheapestSlot) {
  // Candidate 1 is feasible both before and after task 2 once task 2 is late enough.
  TaskTable wide;
  wide.add({1, {100, 0}, 50.0}, {250, 0});
  wide.add({2, {0, 100}, 120.0}, {0, 460});
  const double before = Ref::walk({1, 2}, evader, wide, cfg) - Ref::walk({2}, evader, wide, cfg);
  const double after = Ref::walk({2, 1}, evader, wide, cfg) - Ref::walk({2}, evader, wide, cfg);
  ASSERT_TRUE(std::isfinite(before));
  EXPECT_FALSE(std::isfinite(after));  // 1 after 2 would be backwards in time
  const InsertionBid bid = marginal_cost(Path{2}, evader, 1, wide, cfg);
  ASSERT_TRUE(bid.feasible());
  EXPECT_EQ(*bid.index, 0u);
  EXPECT_NEAR(bid.cost, before, 1e-9 * std::abs(before));
}

TEST_F(TwoTaskFixture, MarginalBothSlotsFeasible) {
  // Two tasks with equal intrusion time cannot follow each other; use
  // distinct times near each other so both orders are feasible only one way,
  // then a third task far later that fits anywhere after them.
  TaskTable t3;
  t3.add({1, {100, 0}, 40.0}, {220, 0});
  t3.add({2, {0, 100}, 120.0}, {0, 460});
  const double front = Ref::walk({2, 1}, evader, t3, cfg) - Ref::walk({1}, evader, t3, cfg);
  const double back = Ref::walk({1, 2}, evader, t3, cfg) - Ref::walk({1}, evader, t3, cfg);
  ASSERT_FALSE(std::isfinite(front));
  ASSERT_TRUE(std::isfinite(back));
  const InsertionBid bid = marginal_cost(Path{1}, evader, 2, t3, cfg);
  ASSERT_TRUE(bid.feasible());
  EXPECT_EQ(*bid.index, 1u);
  EXPECT_NEAR(bid.cost, back, 1e-9 * back);
}

TEST(MarginalCost, MatchesBruteForceOnRandomPaths) {
  ScenarioConfig cfg;
  std::mt19937_64 rng(99);
  int feasible_checks = 0;
  for (int trial = 0; trial < 400; ++trial) {
    TaskTable tasks;
    const int count = 2 + static_cast<int>(rng() % 5);
    for (int id = 0; id < count; ++id) {
      const double a = 6.283185307179586 * unit_uniform(rng);
      const double r = 110 + 300 * unit_uniform(rng);
      IntruderState in{id, {r * std::cos(a), r * std::sin(a)}, 3.0, IntruderStatus::approaching};
      const Vec2 p = neutralizing_point(in, cfg);
      tasks.add({id, p, time_of_intrusion(in, p)}, in.position);
    }
    // Build a feasible path by sorting a random subset by intrusion time.
    std::vector<TaskId> ids;
    for (int id = 0; id + 1 < count; ++id) {
      if (rng() % 2) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end(),
              [&](TaskId a, TaskId b) { return tasks.task(a).intrusion_time < tasks.task(b).intrusion_time; });
    const Vec2 evader{0, 0};
    if (!std::isfinite(Ref::walk(ids, evader, tasks, cfg))) continue;
    Path path;
    for (TaskId id : ids) path.push_back(id);
    const TaskId candidate = count - 1;

    double best = INFINITY;
    std::optional<std::size_t> best_n;
    const double base = Ref::walk(ids, evader, tasks, cfg);
    for (std::size_t n = 0; n <= ids.size(); ++n) {
      auto trial_ids = ids;
      trial_ids.insert(trial_ids.begin() + static_cast<long>(n), candidate);
      const double c = Ref::walk(trial_ids, evader, tasks, cfg);
      if (std::isfinite(c) && (!best_n || c - base < best)) {
        best = c - base;
        best_n = n;
      }
    }
    const InsertionBid bid = marginal_cost(path, evader, candidate, tasks, cfg);
    ASSERT_EQ(bid.index, best_n);
    if (best_n) {
      ++feasible_checks;
      EXPECT_NEAR(bid.cost, best, 1e-9 * std::max(1.0, std::abs(best)));
    }
    // path_cost agrees with the independent re-walk, finite values nonnegative.
    const Loss pc = path_cost(path, evader, tasks, cfg);
    EXPECT_NEAR(pc.value(), base, 1e-9 * std::max(1.0, base));
    EXPECT_GE(pc.value(), 0.0);
  }
  EXPECT_GT(feasible_checks, 100);
}

TEST(TemporalLoss, InfeasibleExactlyWhenPredicateFails) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const SpatioTemporalTask t{0, {200 * unit_uniform(rng) - 100, 200 * unit_uniform(rng) - 100},
                               100 * unit_uniform(rng)};
    const PathContext ctx{{200 * unit_uniform(rng) - 100, 200 * unit_uniform(rng) - 100}, 60 * unit_uniform(rng)};
    const Loss l = temporal_loss(t, ctx, 4.5);
    if (temporal_feasible(t, ctx, 4.5)) {
      EXPECT_TRUE(l.feasible());
      EXPECT_GT(l.value(), 0.0);
    } else {
      EXPECT_FALSE(l.feasible());
    }
  }
}

TEST(PathCost, InfeasibleStepPoisonsWholePath) {
  ScenarioConfig cfg;
  TaskTable tasks;
  tasks.add({1, {100, 0}, 50.0}, {250, 0});
  tasks.add({2, {-100, 0}, 55.0}, {-265, 0});  // 200 m in 5 s: impossible
  tasks.add({3, {0, 100}, 200.0}, {0, 700});
  EXPECT_TRUE(path_cost(Path{1, 3}, {0, 0}, tasks, cfg).feasible());
  EXPECT_FALSE(path_cost(Path{1, 2, 3}, {0, 0}, tasks, cfg).feasible());
}

}  // namespace
}  // namespace stmta
