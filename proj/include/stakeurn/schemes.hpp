#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace stakeurn {

/// Diagonal and shared off-diagonal value of one column of a balanced matrix.
/// w is paid to node i when it proposes, l when any other node proposes.
struct BalancedParams {
  double w = 0.0;
  double l = 0.0;

  friend bool operator==(const BalancedParams&, const BalancedParams&) = default;
};

enum class RegimeTag { Subcritical, Critical, Supercritical };

constexpr std::string_view to_string(RegimeTag tag) noexcept {
  switch (tag) {
    case RegimeTag::Subcritical: return "subcritical";
    case RegimeTag::Critical: return "critical";
    case RegimeTag::Supercritical: return "supercritical";
  }
  return "unknown";
}

// Relative tolerance applied to row sums, balanced detection and the critical
// equality. Scaled by K.
inline constexpr double kMatrixRelTol = 1e-9;

/// Compares w - l against K/2. Equality holds within 1e-9 K.
inline RegimeTag classify_regime(double w, double l, double K) {
  const double gap = (w - l) - 0.5 * K;
  if (std::abs(gap) <= kMatrixRelTol * K) return RegimeTag::Critical;
  return gap < 0.0 ? RegimeTag::Subcritical : RegimeTag::Supercritical;
}

/// Square reward matrix with nonnegative entries and a common row sum K.
/// Row g is the reward vector paid out when node g proposes. Immutable once
/// built; construct through constant_matrix, frd_matrix or custom_matrix.
class RewardMatrix {
 public:
  std::size_t size() const noexcept { return size_; }
  double row_sum() const noexcept { return row_sum_; }

  double operator()(std::size_t row, std::size_t col) const { return entries_[row * size_ + col]; }

  std::span<const double> row(std::size_t g) const {
    return std::span<const double>(entries_).subspan(g * size_, size_);
  }

  const std::optional<std::vector<BalancedParams>>& balanced_params() const noexcept { return balanced_; }
  bool is_balanced() const noexcept { return balanced_.has_value(); }

  std::vector<std::vector<double>> to_rows() const {
    std::vector<std::vector<double>> rows(size_);
    for (std::size_t g = 0; g < size_; ++g) rows[g].assign(row(g).begin(), row(g).end());
    return rows;
  }

  friend bool operator==(const RewardMatrix&, const RewardMatrix&) = default;

 private:
  RewardMatrix(std::size_t m, std::vector<double> entries, double K,
               std::optional<std::vector<BalancedParams>> balanced)
      : size_(m), entries_(std::move(entries)), row_sum_(K), balanced_(std::move(balanced)) {}

  friend RewardMatrix constant_matrix(std::size_t m, double K);
  friend RewardMatrix frd_matrix(std::span<const double> initial_stakes, double K);
  friend RewardMatrix custom_matrix(const std::vector<std::vector<double>>& rows);

  std::size_t size_ = 0;
  std::vector<double> entries_;
  double row_sum_ = 0.0;
  std::optional<std::vector<BalancedParams>> balanced_;
};

namespace detail {

inline void require_budget(double K) {
  if (!(K > 0.0) || !std::isfinite(K))
    throw Error(ErrorCode::NonpositiveBudget, "reward budget K must be positive, got " + std::to_string(K));
}

// Shared validation for any initial stake vector; returns S(0).
inline double validate_stakes(std::span<const double> stakes) {
  if (stakes.empty()) throw Error(ErrorCode::EmptyStakeSet, "at least one node is required");
  double total = 0.0;
  for (std::size_t i = 0; i < stakes.size(); ++i) {
    if (!(stakes[i] >= 0.0) || !std::isfinite(stakes[i]))
      throw Error(ErrorCode::NegativeStake,
                  "stake of node " + std::to_string(i) + " is " + std::to_string(stakes[i]));
    total += stakes[i];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroTotalStake, "initial stakes sum to zero");
  return total;
}

}  // namespace detail

/// Constant reward: the proposer keeps the whole budget, R = K I.
inline RewardMatrix constant_matrix(std::size_t m, double K) {
  if (m == 0) throw Error(ErrorCode::InvalidDimension, "matrix needs at least one node");
  detail::require_budget(K);
  std::vector<double> entries(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) entries[i * m + i] = K;
  return RewardMatrix(m, std::move(entries), K, std::vector<BalancedParams>(m, BalancedParams{K, 0.0}));
}

/// Fair reward distribution. Every node j receives alpha S_j(0) per slot and
/// the proposer an extra alpha S(0), with alpha = K / (2 S(0)) so that each
/// row pays out exactly K. Every column sits in the critical regime.
inline RewardMatrix frd_matrix(std::span<const double> initial_stakes, double K) {
  const double total = detail::validate_stakes(initial_stakes);
  detail::require_budget(K);
  const std::size_t m = initial_stakes.size();
  const double alpha = K / (2.0 * total);

  std::vector<BalancedParams> params(m);
  for (std::size_t j = 0; j < m; ++j) {
    params[j].l = alpha * initial_stakes[j];
    params[j].w = alpha * (initial_stakes[j] + total);
  }
  std::vector<double> entries(m * m);
  for (std::size_t g = 0; g < m; ++g)
    for (std::size_t j = 0; j < m; ++j) entries[g * m + j] = g == j ? params[j].w : params[j].l;
  return RewardMatrix(m, std::move(entries), K, std::move(params));
}

/// Validates a user-supplied matrix. Row sums must agree with row 0 within
/// 1e-9 K. Balanced parameters are filled in when each column's off-diagonal
/// entries agree within the same tolerance.
inline RewardMatrix custom_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.size();
  if (m == 0) throw Error(ErrorCode::InvalidDimension, "matrix needs at least one row");
  for (std::size_t g = 0; g < m; ++g)
    if (rows[g].size() != m)
      throw Error(ErrorCode::NotSquare, "row " + std::to_string(g) + " has " + std::to_string(rows[g].size()) +
                                            " entries, expected " + std::to_string(m));

  std::vector<double> entries;
  entries.reserve(m * m);
  for (std::size_t g = 0; g < m; ++g)
    for (std::size_t j = 0; j < m; ++j) {
      const double v = rows[g][j];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(g) + "," + std::to_string(j) + ") is " + std::to_string(v));
      entries.push_back(v);
    }

  auto sum_row = [&](std::size_t g) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += entries[g * m + j];
    return s;
  };
  const double K = sum_row(0);
  detail::require_budget(K);
  for (std::size_t g = 1; g < m; ++g) {
    const double s = sum_row(g);
    if (std::abs(s - K) > kMatrixRelTol * K)
      throw Error(ErrorCode::RowSumMismatch, "row " + std::to_string(g) + " sums to " + std::to_string(s) +
                                                 ", row 0 sums to " + std::to_string(K));
  }

  std::optional<std::vector<BalancedParams>> balanced{std::vector<BalancedParams>(m)};
  for (std::size_t i = 0; i < m && balanced; ++i) {
    const std::size_t first_other = i == 0 ? 1 : 0;
    const double l = m == 1 ? 0.0 : entries[first_other * m + i];
    for (std::size_t g = 0; g < m; ++g) {
      if (g == i) continue;
      if (std::abs(entries[g * m + i] - l) > kMatrixRelTol * K) {
        balanced.reset();
        break;
      }
    }
    if (balanced) (*balanced)[i] = BalancedParams{entries[i * m + i], l};
  }
  return RewardMatrix(m, std::move(entries), K, std::move(balanced));
}

/// Regime of one column. Only defined for balanced matrices.
inline RegimeTag classify_regime(const RewardMatrix& matrix, std::size_t node) {
  if (!matrix.is_balanced())
    throw Error(ErrorCode::UnbalancedMatrix, "regime is only defined for column-balanced matrices");
  if (node >= matrix.size())
    throw Error(ErrorCode::InvalidArgument, "node " + std::to_string(node) + " out of range");
  const auto& p = (*matrix.balanced_params())[node];
  return classify_regime(p.w, p.l, matrix.row_sum());
}

}  // namespace stakeurn
