#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "stmta/scenario.hpp"
#include "stmta/simulator.hpp"

namespace stmta {

struct SweepConfig {
  ScenarioConfig base{};
  std::vector<double> separations{0.0, 10.0, 20.0, 40.0, 60.0, 80.0};
  std::vector<int> evader_counts{3};
  int epochs{200};
  std::uint64_t base_seed{1};

  void validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (separations.empty() || evader_counts.empty()) throw std::invalid_argument("sweep grids must be nonempty");
    base.validate();
  }
};

struct SweepCell {
  double separation{0.0};
  int evaders{0};
  int epochs{0};
  int successes{0};
  double success_rate{0.0};
  double mean_neutralized{0.0};

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepResult {
  std::vector<SweepCell> cells{};  // separations outer, evader counts inner

  const SweepCell& cell(double separation, int evaders) const {
    for (const auto& c : cells) {
      if (c.separation == separation && c.evaders == evaders) return c;
    }
    throw std::out_of_range("no such sweep cell");
  }

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// SplitMix64 finalizer; decorrelates the per-epoch streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t epoch) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (epoch + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Epoch e of every cell uses derive_seed(base_seed, e), so cells share random
// streams and differ only in their parameters. Results do not depend on `jobs`.
inline SweepResult run_montecarlo(const SweepConfig& sweep, unsigned jobs = 1) {
  sweep.validate();
  struct Cell {
    ScenarioConfig cfg;
    SweepCell out;
  };
  std::vector<Cell> cells;
  for (double sep : sweep.separations) {
    for (int n : sweep.evader_counts) {
      Cell c{sweep.base, {}};
      c.cfg.min_radial_separation = sep;
      c.cfg.num_evaders = n;
      c.cfg.validate();
      c.out.separation = sep;
      c.out.evaders = n;
      c.out.epochs = sweep.epochs;
      cells.push_back(std::move(c));
    }
  }

  const std::size_t epochs = static_cast<std::size_t>(sweep.epochs);
  const std::size_t total = cells.size() * epochs;
  std::vector<EpochMetrics> metrics(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t cell = job / epochs;
      const std::size_t epoch = job % epochs;
      metrics[job] = run_episode(cells[cell].cfg, derive_seed(sweep.base_seed, epoch));
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCell out = cells[c].out;
    long neutralized = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
      const auto& m = metrics[c * epochs + e];
      if (m.success) ++out.successes;
      neutralized += m.neutralizations;
    }
    out.success_rate = static_cast<double>(out.successes) / static_cast<double>(epochs);
    out.mean_neutralized = static_cast<double>(neutralized) / static_cast<double>(epochs);
    result.cells.push_back(out);
  }
  return result;
}

}  // namespace stmta
