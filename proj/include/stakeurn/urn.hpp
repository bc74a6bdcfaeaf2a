#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "schemes.hpp"

namespace stakeurn {

/// Absolute stakes of every node after `step` reward slots.
///
/// The total is never re-summed: it is S(0) + step * K, where K is the budget
/// of the matrix that has been applied so far. This keeps the selection
/// denominator exact over long horizons.
struct UrnState {
  std::vector<double> stakes;
  std::uint64_t step = 0;
  double initial_total = 0.0;
  double budget = 0.0;  // K of the applied matrix; 0 until the first reward

  std::size_t size() const noexcept { return stakes.size(); }
  double total() const noexcept { return initial_total + static_cast<double>(step) * budget; }

  friend bool operator==(const UrnState&, const UrnState&) = default;
};

struct FractionalStakes {
  std::vector<double> fractions;
};

struct Snapshot {
  std::uint64_t step = 0;
  std::vector<double> stakes;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct Trajectory {
  std::vector<std::uint32_t> proposers;
  std::vector<Snapshot> snapshots;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct TrajectoryRun {
  Trajectory trajectory;
  UrnState final_state;
};

inline UrnState new_state(std::vector<double> initial_stakes) {
  const double total = detail::validate_stakes(initial_stakes);
  return UrnState{std::move(initial_stakes), 0, total, 0.0};
}

inline FractionalStakes fractional_stakes(const UrnState& state) {
  const double total = state.total();
  FractionalStakes out;
  out.fractions.reserve(state.size());
  for (double s : state.stakes) out.fractions.push_back(s / total);
  return out;
}

/// Maps a uniform draw in [0,1) to the node whose half-open cumulative
/// fraction interval contains it, scanning nodes in index order.
inline std::size_t select_proposer(const UrnState& state, double uniform_draw) {
  const double target = uniform_draw * state.total();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t g = 0; g < state.stakes.size(); ++g) {
    if (state.stakes[g] <= 0.0) continue;
    cumulative += state.stakes[g];
    if (target < cumulative) return g;
    last_positive = g;
  }
  // Rounding can leave the summed stakes a hair below the analytic total.
  return last_positive;
}

/// Adds row `proposer` of the matrix to every stake in place.
inline void apply_reward_in_place(UrnState& state, std::size_t proposer, const RewardMatrix& matrix) {
  if (matrix.size() != state.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(matrix.size()) +
                                                  " nodes, state has " + std::to_string(state.size()));
  if (proposer >= state.size())
    throw Error(ErrorCode::DimensionMismatch, "proposer " + std::to_string(proposer) + " out of range");
  if (state.step > 0 && state.budget != matrix.row_sum())
    throw Error(ErrorCode::BudgetMismatch, "state was grown with K=" + std::to_string(state.budget) +
                                               ", matrix has K=" + std::to_string(matrix.row_sum()));
  const auto row = matrix.row(proposer);
  for (std::size_t j = 0; j < row.size(); ++j) state.stakes[j] += row[j];
  state.budget = matrix.row_sum();
  ++state.step;
}

inline UrnState apply_reward(UrnState state, std::size_t proposer, const RewardMatrix& matrix) {
  apply_reward_in_place(state, proposer, matrix);
  return state;
}

/// Steps at which a run with `stride` records: every multiple of stride up
/// to n, plus n itself. Stride 0 records only n.
inline std::vector<std::uint64_t> recorded_steps(std::uint64_t n, std::uint64_t stride) {
  std::vector<std::uint64_t> steps;
  if (stride > 0)
    for (std::uint64_t s = 0; s <= n; s += stride) {
      steps.push_back(s);
      if (n - s < stride) break;
    }
  if (steps.empty() || steps.back() != n) steps.push_back(n);
  return steps;
}

/// Runs n select/apply cycles on `state`, calling on_step(state) after each
/// one. Draws come from `rng` one uniform per step.
template <typename Rng, typename OnStep>
void advance(UrnState& state, const RewardMatrix& matrix, std::uint64_t n, Rng& rng, OnStep&& on_step) {
  for (std::uint64_t k = 0; k < n; ++k) {
    const std::size_t g = select_proposer(state, rng.uniform());
    apply_reward_in_place(state, g, matrix);
    on_step(state, g);
  }
}

inline TrajectoryRun simulate_trajectory(const UrnState& initial, const RewardMatrix& matrix, std::uint64_t n,
                                         std::uint64_t seed, std::uint64_t record_stride) {
  if (matrix.size() != initial.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(matrix.size()) +
                                                  " nodes, state has " + std::to_string(initial.size()));
  TrajectoryRun run{{}, initial};
  run.trajectory.proposers.reserve(n);
  const std::uint64_t start = initial.step;
  auto wants = [&](std::uint64_t rel) {
    return rel == n || (record_stride > 0 && rel % record_stride == 0);
  };
  if (wants(0)) run.trajectory.snapshots.push_back({start, initial.stakes});

  SplitMix64 rng(seed);
  advance(run.final_state, matrix, n, rng, [&](const UrnState& s, std::size_t g) {
    run.trajectory.proposers.push_back(static_cast<std::uint32_t>(g));
    if (wants(s.step - start)) run.trajectory.snapshots.push_back({s.step, s.stakes});
  });
  return run;
}

}  // namespace stakeurn
