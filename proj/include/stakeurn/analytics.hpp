#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "error.hpp"
#include "schemes.hpp"

namespace stakeurn {

// Closed-form predictors for a balanced column (w, l) of a matrix with row
// sum K. All of them are leading-order: the o(n) and o(n ln n) remainders are
// dropped.

namespace detail {

inline void check_column(double l, double w, double K) {
  if (!(K > 0.0)) throw Error(ErrorCode::NonpositiveBudget, "K must be positive");
  if (!(l >= 0.0 && l <= w && w <= K * (1.0 + kMatrixRelTol)))
    throw Error(ErrorCode::InvalidArgument, "column parameters need 0 <= l <= w <= K (l=" + std::to_string(l) +
                                                ", w=" + std::to_string(w) + ", K=" + std::to_string(K) + ")");
  if (!(K - w + l > kMatrixRelTol * K))
    throw Error(ErrorCode::DegenerateDenominator, "K - w + l vanishes; use the Beta limit for this column");
}

}  // namespace detail

/// l / (K - w + l): the long-run fractional share of the column.
inline double limit_mean_fraction(double l, double w, double K) {
  detail::check_column(l, w, K);
  return l / (K - w + l);
}

/// E[S_i(n)] ~ l / (K - w + l) * K n.
inline double predict_mean_stake(double l, double w, double K, std::uint64_t n) {
  return limit_mean_fraction(l, w, K) * K * static_cast<double>(n);
}

struct VarPrediction {
  double value = 0.0;
  RegimeTag regime = RegimeTag::Subcritical;
};

/// Leading-order Var[S_i(n)].
///   subcritical (w - l < K/2): (K-w) l K (w-l)^2 / ((K-w+l)^2 (K - 2(w-l))) n
///   critical    (w - l = K/2): (K-w) l n ln n
inline VarPrediction predict_var_stake(double l, double w, double K, std::uint64_t n) {
  detail::check_column(l, w, K);
  const RegimeTag regime = classify_regime(w, l, K);
  const double nd = static_cast<double>(n);
  switch (regime) {
    case RegimeTag::Subcritical: {
      const double gap = w - l;
      const double denom = K - w + l;
      return {(K - w) * l * K * gap * gap / (denom * denom * (K - 2.0 * gap)) * nd, regime};
    }
    case RegimeTag::Critical:
      return {n < 2 ? 0.0 : (K - w) * l * nd * std::log(nd), regime};
    case RegimeTag::Supercritical:
      break;
  }
  throw Error(ErrorCode::SupercriticalUnsupported,
              "no closed form for w - l > K/2; use beta_limit_params for the constant scheme");
}

struct FractionPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Stake predictions divided by the total stake S(n) = S(0) + K n.
inline FractionPrediction predict_fraction(double l, double w, double K, std::uint64_t n, double initial_total) {
  const double total = initial_total + K * static_cast<double>(n);
  const double mean = predict_mean_stake(l, w, K, n);
  const double var = predict_var_stake(l, w, K, n).value;
  return {mean / total, var / (total * total)};
}

/// Exact E[S_i(n)] from E[S_i(k+1)] = (1 + (w - l)/S(k)) E[S_i(k)] + l with
/// S(k) = S(0) + k K deterministic.
inline double expected_stake(double l, double w, double K, double initial_stake, double initial_total,
                             std::uint64_t n) {
  double mean = initial_stake;
  double total = initial_total;
  for (std::uint64_t k = 0; k < n; ++k) {
    mean = (1.0 + (w - l) / total) * mean + l;
    total = initial_total + static_cast<double>(k + 1) * K;
  }
  return mean;
}

struct AnalyticPrediction {
  std::size_t node = 0;
  std::uint64_t horizon_n = 0;
  double mean_stake = 0.0;
  double var_stake = 0.0;
  double mean_fraction = 0.0;
  double var_fraction = 0.0;
  double limit_mean_fraction = 0.0;
  RegimeTag regime = RegimeTag::Critical;
  bool leading_order_only = true;
};

inline AnalyticPrediction predict(const RewardMatrix& matrix, std::size_t node, std::uint64_t n,
                                  double initial_total) {
  const RegimeTag regime = classify_regime(matrix, node);
  if (regime == RegimeTag::Supercritical)
    throw Error(ErrorCode::SupercriticalUnsupported, "node " + std::to_string(node) + " is supercritical");
  const auto [w, l] = (*matrix.balanced_params())[node];
  const double K = matrix.row_sum();
  AnalyticPrediction p;
  p.node = node;
  p.horizon_n = n;
  p.mean_stake = predict_mean_stake(l, w, K, n);
  p.var_stake = predict_var_stake(l, w, K, n).value;
  const auto frac = predict_fraction(l, w, K, n, initial_total);
  p.mean_fraction = frac.mean;
  p.var_fraction = frac.variance;
  p.limit_mean_fraction = limit_mean_fraction(l, w, K);
  p.regime = regime;
  return p;
}

// ---------------------------------------------------------------------------
// Beta limit of the constant (Polya) scheme.

struct BetaParams {
  double a = 0.0;
  double b = 0.0;

  double mean() const noexcept { return a / (a + b); }
  double variance() const noexcept {
    const double s = a + b;
    return a * b / (s * s * (s + 1.0));
  }
  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

/// Polya urn with K balls added per draw: node i's share converges to
/// Beta(S_i(0)/K, (S(0) - S_i(0))/K).
inline BetaParams beta_limit_params(std::span<const double> initial_stakes, double K, std::size_t node) {
  const double total = detail::validate_stakes(initial_stakes);
  detail::require_budget(K);
  if (node >= initial_stakes.size())
    throw Error(ErrorCode::InvalidArgument, "node " + std::to_string(node) + " out of range");
  const BetaParams p{initial_stakes[node] / K, (total - initial_stakes[node]) / K};
  if (!(p.a > 0.0) || !(p.b > 0.0))
    throw Error(ErrorCode::DegenerateBeta, "node " + std::to_string(node) + " holds none or all of the stake");
  return p;
}

inline double beta_cdf(const BetaParams& p, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(p.a, p.b, x);
}

inline double beta_pdf(const BetaParams& p, double x) {
  return boost::math::pdf(boost::math::beta_distribution<double>(p.a, p.b), x);
}

// ---------------------------------------------------------------------------
// Empirical statistics.

struct Histogram {
  std::vector<double> edges;  // bins + 1 equal-width edges over [0,1]
  std::vector<std::uint64_t> counts;

  std::size_t bins() const noexcept { return counts.size(); }
  std::uint64_t total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  Histogram histogram;
};

/// Equal-width histogram over [0,1]; bins are [lo, hi) except the last,
/// which also takes x == 1.
inline Histogram make_histogram(std::span<const double> samples, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = static_cast<double>(k) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double x : samples) {
    if (!(x >= 0.0 && x <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "sample " + std::to_string(x) + " lies outside [0,1]");
    auto k = static_cast<std::size_t>(x * static_cast<double>(bins));
    h.counts[std::min(k, bins - 1)] += 1;
  }
  return h;
}

inline SampleStats empirical_stats(std::span<const double> samples, std::size_t bins) {
  if (samples.size() < 2)
    throw Error(ErrorCode::InsufficientSamples, "need at least 2 samples, got " + std::to_string(samples.size()));
  SampleStats s;
  s.count = samples.size();
  // Welford, in sample order.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : samples) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  s.mean = mean;
  s.variance = std::max(0.0, m2 / static_cast<double>(s.count - 1));
  s.histogram = make_histogram(samples, bins);
  return s;
}

/// Kolmogorov-Smirnov statistic sup |F_n(x) - F(x)| against a Beta CDF.
inline double ks_distance(std::span<const double> samples, const BetaParams& beta) {
  if (samples.size() < 100)
    throw Error(ErrorCode::InsufficientSamples, "KS distance needs at least 100 samples");
  if (!(beta.a > 0.0) || !(beta.b > 0.0)) throw Error(ErrorCode::DegenerateBeta, "Beta parameters must be positive");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = beta_cdf(beta, sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace stakeurn
