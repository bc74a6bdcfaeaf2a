#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "analytics.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "schemes.hpp"
#include "urn.hpp"

namespace stakeurn {

enum class SchemeKind { Constant, Frd, Custom };

struct Scheme {
  SchemeKind kind = SchemeKind::Frd;
  std::vector<std::vector<double>> custom;  // rows, only for SchemeKind::Custom

  static Scheme constant() { return {SchemeKind::Constant, {}}; }
  static Scheme frd() { return {SchemeKind::Frd, {}}; }
  static Scheme custom_rows(std::vector<std::vector<double>> rows) { return {SchemeKind::Custom, std::move(rows)}; }

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

struct RecordPolicy {
  std::uint64_t stride = 0;  // 0: final step only
  std::size_t histogram_bins = 100;
  std::optional<std::vector<std::size_t>> track_nodes;  // absent: every node

  friend bool operator==(const RecordPolicy&, const RecordPolicy&) = default;
};

struct ExperimentConfig {
  std::vector<double> initial_stakes;
  Scheme scheme;
  double reward_budget = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t repetitions = 1;
  std::uint64_t base_seed = 0;
  RecordPolicy record;

  double initial_total() const {
    double s = 0.0;
    for (double x : initial_stakes) s += x;
    return s;
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline std::vector<std::size_t> tracked_nodes(const ExperimentConfig& config) {
  if (config.record.track_nodes) return *config.record.track_nodes;
  std::vector<std::size_t> all(config.initial_stakes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

/// Checks the config and builds its reward matrix.
inline RewardMatrix resolve_matrix(const ExperimentConfig& config) {
  detail::validate_stakes(config.initial_stakes);
  detail::require_budget(config.reward_budget);
  if (config.repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be at least 1");
  if (config.record.histogram_bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram_bins must be at least 1");
  for (std::size_t node : tracked_nodes(config))
    if (node >= config.initial_stakes.size())
      throw Error(ErrorCode::InvalidArgument, "tracked node " + std::to_string(node) + " out of range");

  const std::size_t m = config.initial_stakes.size();
  switch (config.scheme.kind) {
    case SchemeKind::Constant: return constant_matrix(m, config.reward_budget);
    case SchemeKind::Frd: return frd_matrix(config.initial_stakes, config.reward_budget);
    case SchemeKind::Custom: {
      RewardMatrix matrix = custom_matrix(config.scheme.custom);
      if (matrix.size() != m)
        throw Error(ErrorCode::DimensionMismatch, "custom matrix is " + std::to_string(matrix.size()) + "x" +
                                                      std::to_string(matrix.size()) + " but there are " +
                                                      std::to_string(m) + " nodes");
      if (std::abs(matrix.row_sum() - config.reward_budget) > kMatrixRelTol * config.reward_budget)
        throw Error(ErrorCode::RowSumMismatch, "custom matrix rows sum to " + std::to_string(matrix.row_sum()) +
                                                   ", reward_budget_K is " + std::to_string(config.reward_budget));
      return matrix;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scheme");
}

// ---------------------------------------------------------------------------
// Cross-repetition moments.
//
// Fractions are accumulated as 48-bit fixed point in 128-bit integers, so
// sums are exact and independent of the order in which repetitions are
// added. That is what makes worker count and merge order invisible in the
// output. Quantization error is below 2e-15 per sample; the squared sums
// stay in range for up to 2^31 samples per step.

__extension__ using wide_int = __int128;

inline constexpr int kFractionBits = 48;

struct MomentSums {
  std::uint64_t count = 0;
  wide_int sum = 0;
  wide_int sum_sq = 0;

  void add(double fraction) {
    const auto q = static_cast<std::int64_t>(std::llround(std::ldexp(fraction, kFractionBits)));
    ++count;
    sum += q;
    sum_sq += static_cast<wide_int>(q) * q;
  }

  MomentSums& operator+=(const MomentSums& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }

  double mean() const {
    if (count == 0) return 0.0;
    return static_cast<double>(std::ldexp(static_cast<long double>(sum) / count, -kFractionBits));
  }

  // Unbiased; 0 for fewer than two samples.
  double variance() const {
    if (count < 2) return 0.0;
    // sum_sq - sum^2/n with sum = q n + r: the integer part is exact and
    // only r^2/n (r < n) is rounded.
    const wide_int n = static_cast<wide_int>(count);
    const wide_int q = sum / n, r = sum % n;
    const wide_int whole = sum_sq - q * q * n - 2 * q * r;
    const long double centered =
        std::max(0.0L, static_cast<long double>(whole) - static_cast<long double>(r * r) / static_cast<long double>(n));
    return static_cast<double>(std::ldexp(centered / static_cast<long double>(count - 1), -2 * kFractionBits));
  }

  friend bool operator==(const MomentSums&, const MomentSums&) = default;
};

struct TimeSeriesPoint {
  std::uint64_t step = 0;
  std::vector<std::size_t> nodes;
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Output of a run over repetitions [rep_begin, rep_end).
struct ExperimentResult {
  ExperimentConfig config;
  std::uint64_t rep_begin = 0;
  std::uint64_t rep_end = 0;
  std::size_t nodes = 0;
  std::vector<double> final_fractions;  // (rep_end - rep_begin) rows of `nodes`, row-major
  std::vector<std::uint64_t> proposer_counts;
  std::vector<std::size_t> tracked;
  std::vector<std::uint64_t> steps;  // recorded steps
  std::vector<MomentSums> moments;   // steps.size() x tracked.size(), row-major

  std::uint64_t repetitions() const noexcept { return rep_end - rep_begin; }

  double final_fraction(std::uint64_t rep, std::size_t node) const {
    return final_fractions[(rep - rep_begin) * nodes + node];
  }

  /// Final fraction of `node` across every repetition, in repetition order.
  std::vector<double> node_samples(std::size_t node) const {
    std::vector<double> out;
    out.reserve(repetitions());
    for (std::uint64_t r = 0; r < repetitions(); ++r) out.push_back(final_fractions[r * nodes + node]);
    return out;
  }

  std::vector<TimeSeriesPoint> time_series() const {
    std::vector<TimeSeriesPoint> series;
    series.reserve(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
      TimeSeriesPoint p{steps[k], tracked, {}, {}};
      for (std::size_t t = 0; t < tracked.size(); ++t) {
        const auto& mom = moments[k * tracked.size() + t];
        p.mean.push_back(mom.mean());
        p.variance.push_back(mom.variance());
      }
      series.push_back(std::move(p));
    }
    return series;
  }

  friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t max_fraction_entries = std::size_t{1} << 27;
  std::uint64_t chunk = 64;
};

namespace detail {

struct WorkerAccumulator {
  std::vector<MomentSums> moments;
  std::vector<std::uint64_t> proposer_counts;
};

inline void run_one_repetition(const ExperimentConfig& config, const RewardMatrix& matrix,
                               const UrnState& initial, std::uint64_t rep, std::span<const std::uint64_t> steps,
                               std::span<const std::size_t> tracked, std::span<double> fractions_out,
                               WorkerAccumulator& acc) {
  UrnState state = initial;
  SplitMix64 rng(repetition_seed(config.base_seed, rep));
  std::size_t next = 0;

  auto record = [&](const UrnState& s) {
    const double total = s.total();
    MomentSums* row = acc.moments.data() + next * tracked.size();
    for (std::size_t t = 0; t < tracked.size(); ++t) row[t].add(s.stakes[tracked[t]] / total);
    ++next;
  };

  if (steps.front() == 0) record(state);
  advance(state, matrix, config.steps, rng, [&](const UrnState& s, std::size_t g) {
    ++acc.proposer_counts[g];
    if (next < steps.size() && s.step == steps[next]) record(s);
  });

  const auto frac = fractional_stakes(state);
  std::copy(frac.fractions.begin(), frac.fractions.end(), fractions_out.begin());
}

}  // namespace detail

/// Runs repetitions [begin, end) of `config`. Repetition r is driven by
/// SplitMix64(base_seed ^ r), so any split of the range, any worker count
/// and any merge order produce the same bytes.
inline ExperimentResult run_repetitions(const ExperimentConfig& config, std::uint64_t begin, std::uint64_t end,
                                        const RunOptions& options = {}) {
  const RewardMatrix matrix = resolve_matrix(config);
  if (begin > end || end > config.repetitions)
    throw Error(ErrorCode::InvalidArgument, "repetition range [" + std::to_string(begin) + "," +
                                                std::to_string(end) + ") outside [0," +
                                                std::to_string(config.repetitions) + ")");
  const std::size_t m = config.initial_stakes.size();
  const std::uint64_t reps = end - begin;
  if (reps > options.max_fraction_entries / m)
    throw Error(ErrorCode::ResourceLimit, std::to_string(reps) + " repetitions x " + std::to_string(m) +
                                              " nodes exceeds the cap of " +
                                              std::to_string(options.max_fraction_entries) + " stored fractions");

  ExperimentResult result;
  result.config = config;
  result.rep_begin = begin;
  result.rep_end = end;
  result.nodes = m;
  result.tracked = tracked_nodes(config);
  result.steps = recorded_steps(config.steps, config.record.stride);
  result.final_fractions.assign(reps * m, 0.0);
  result.proposer_counts.assign(m, 0);
  result.moments.assign(result.steps.size() * result.tracked.size(), MomentSums{});

  const UrnState initial = new_state(config.initial_stakes);
  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk);
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, (reps + chunk - 1) / chunk));
  workers = std::max(workers, 1u);

  std::vector<detail::WorkerAccumulator> accs(workers);
  for (auto& a : accs) {
    a.moments.assign(result.moments.size(), MomentSums{});
    a.proposer_counts.assign(m, 0);
  }

  std::atomic<std::uint64_t> next_chunk{0};
  auto work = [&](detail::WorkerAccumulator& acc) {
    for (;;) {
      const std::uint64_t lo = next_chunk.fetch_add(chunk);
      if (lo >= reps) return;
      const std::uint64_t hi = std::min(reps, lo + chunk);
      for (std::uint64_t r = lo; r < hi; ++r)
        detail::run_one_repetition(config, matrix, initial, begin + r, result.steps, result.tracked,
                                   std::span<double>(result.final_fractions).subspan(r * m, m), acc);
    }
  };

  if (workers == 1) {
    work(accs[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, std::ref(accs[w]));
  }

  for (const auto& a : accs) {
    for (std::size_t k = 0; k < a.moments.size(); ++k) result.moments[k] += a.moments[k];
    for (std::size_t g = 0; g < m; ++g) result.proposer_counts[g] += a.proposer_counts[g];
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {}) {
  return run_repetitions(config, 0, config.repetitions, options);
}

/// Cross-repetition mean and unbiased variance of each tracked node's
/// fractional stake at every recorded step.
inline std::vector<TimeSeriesPoint> time_series_stats(const ExperimentConfig& config, const RunOptions& options = {}) {
  if (config.record.stride < 1) throw Error(ErrorCode::InvalidArgument, "time series needs stride >= 1");
  if (config.repetitions < 2) throw Error(ErrorCode::InsufficientSamples, "time series needs at least 2 repetitions");
  return run_experiment(config, options).time_series();
}

/// Concatenates partial results over disjoint, contiguous repetition ranges.
inline ExperimentResult merge_results(std::vector<ExperimentResult> partials) {
  if (partials.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to merge");
  std::sort(partials.begin(), partials.end(),
            [](const ExperimentResult& a, const ExperimentResult& b) { return a.rep_begin < b.rep_begin; });
  ExperimentResult out = std::move(partials.front());
  for (std::size_t i = 1; i < partials.size(); ++i) {
    const ExperimentResult& p = partials[i];
    if (!(p.config == out.config)) throw Error(ErrorCode::ConfigMismatch, "partial results come from different configs");
    if (p.rep_begin < out.rep_end)
      throw Error(ErrorCode::OverlappingRanges, "repetitions [" + std::to_string(p.rep_begin) + "," +
                                                    std::to_string(p.rep_end) + ") overlap earlier partials");
    if (p.rep_begin > out.rep_end)
      throw Error(ErrorCode::InvalidArgument, "repetitions [" + std::to_string(out.rep_end) + "," +
                                                  std::to_string(p.rep_begin) + ") are missing");
    out.final_fractions.insert(out.final_fractions.end(), p.final_fractions.begin(), p.final_fractions.end());
    for (std::size_t g = 0; g < out.proposer_counts.size(); ++g) out.proposer_counts[g] += p.proposer_counts[g];
    for (std::size_t k = 0; k < out.moments.size(); ++k) out.moments[k] += p.moments[k];
    out.rep_end = p.rep_end;
  }
  return out;
}

}  // namespace stakeurn
