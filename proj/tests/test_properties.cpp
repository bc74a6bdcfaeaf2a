// Randomized invariants over generated stake vectors and budgets.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "stakeurn/analytics.hpp"
#include "stakeurn/config_json.hpp"
#include "stakeurn/urn.hpp"

using namespace stakeurn;

namespace {

constexpr int kCases = 1000;

struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::size_t nodes(std::size_t lo = 1, std::size_t hi = 32) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }
  double budget() { return std::exp(std::uniform_real_distribution<double>(-3, 8)(rng)); }

  // Positive stakes spread over several orders of magnitude, with the odd zero.
  std::vector<double> stakes(std::size_t m) {
    std::vector<double> s(m);
    std::uniform_real_distribution<double> mag(-2, 4);
    std::bernoulli_distribution zero(0.1);
    for (auto& x : s) x = zero(rng) ? 0.0 : std::pow(10.0, mag(rng));
    if (std::accumulate(s.begin(), s.end(), 0.0) == 0.0) s[0] = 1.0;
    return s;
  }
};

}  // namespace

TEST(Properties, FrdRowSumsCriticalAndLinearInBudget) {
  Gen gen(1);
  for (int c = 0; c < kCases; ++c) {
    const auto s = gen.stakes(gen.nodes());
    const double K = gen.budget();
    const auto m = frd_matrix(s, K);
    const auto doubled = frd_matrix(s, 2 * K);
    for (std::size_t g = 0; g < m.size(); ++g) {
      const auto row = m.row(g);
      EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), K, 1e-9 * K);
      EXPECT_EQ(classify_regime(m, g), RegimeTag::Critical);
      const auto& p = (*m.balanced_params())[g];
      EXPECT_NEAR(p.w - p.l, K / 2, 1e-12 * K);
      for (std::size_t j = 0; j < m.size(); ++j) EXPECT_NEAR(doubled(g, j), 2 * m(g, j), 1e-15 * K);
    }
  }
}

TEST(Properties, ConstantRowSums) {
  Gen gen(2);
  for (int c = 0; c < kCases; ++c) {
    const double K = gen.budget();
    const auto m = constant_matrix(gen.nodes(), K);
    for (std::size_t g = 0; g < m.size(); ++g) {
      const auto row = m.row(g);
      EXPECT_EQ(std::accumulate(row.begin(), row.end(), 0.0), K);
    }
  }
}

TEST(Properties, CustomDetectionRecoversFrdParams) {
  Gen gen(3);
  for (int c = 0; c < kCases; ++c) {
    const auto s = gen.stakes(gen.nodes(2, 12));
    const auto frd = frd_matrix(s, gen.budget());
    const auto again = custom_matrix(frd.to_rows());
    ASSERT_TRUE(again.is_balanced());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_DOUBLE_EQ((*again.balanced_params())[i].w, (*frd.balanced_params())[i].w);
      EXPECT_DOUBLE_EQ((*again.balanced_params())[i].l, (*frd.balanced_params())[i].l);
    }
  }
}

TEST(Properties, StakeTotalsAreConserved) {
  Gen gen(4);
  for (int c = 0; c < kCases; ++c) {
    const auto s = gen.stakes(gen.nodes(1, 10));
    const double K = gen.budget();
    const auto m = (c % 2) ? frd_matrix(s, K) : constant_matrix(s.size(), K);
    const std::uint64_t n = c % 200;
    const auto run = simulate_trajectory(new_state(s), m, n, static_cast<std::uint64_t>(c), 0);
    const double s0 = std::accumulate(s.begin(), s.end(), 0.0);
    EXPECT_EQ(run.final_state.total(), s0 + static_cast<double>(n) * K);
    const double summed = std::accumulate(run.final_state.stakes.begin(), run.final_state.stakes.end(), 0.0);
    EXPECT_NEAR(summed, run.final_state.total(), 1e-9 * run.final_state.total());
    const auto f = fractional_stakes(run.final_state).fractions;
    EXPECT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(Properties, FrdPredictedSharesSumToOneAndEqualInitialShares) {
  Gen gen(5);
  for (int c = 0; c < kCases; ++c) {
    const auto s = gen.stakes(gen.nodes());
    const double K = gen.budget();
    const double s0 = std::accumulate(s.begin(), s.end(), 0.0);
    const auto m = frd_matrix(s, K);
    const std::uint64_t n = 1 + c * 37;
    double share_sum = 0, mean_sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& p = (*m.balanced_params())[i];
      const double share = limit_mean_fraction(p.l, p.w, K);
      EXPECT_NEAR(share, s[i] / s0, 1e-12);
      share_sum += share;
      mean_sum += predict(m, i, n, s0).mean_stake;
    }
    EXPECT_NEAR(share_sum, 1.0, 1e-9);
    EXPECT_NEAR(mean_sum, K * static_cast<double>(n), 1e-9 * K * static_cast<double>(n));
  }
}

TEST(Properties, BalancedSubcriticalMeansSumToBudget) {
  // Random balanced matrices with all columns subcritical or critical.
  Gen gen(6);
  int checked = 0;
  while (checked < kCases) {
    const std::size_t m = gen.nodes(2, 8);
    std::vector<double> l(m);
    for (auto& x : l) x = std::uniform_real_distribution<double>(0.1, 1.0)(gen.rng);
    const double L = std::accumulate(l.begin(), l.end(), 0.0);
    // Row g: w_g + (L - l_g) = K, so w_g - l_g = K - L for every column.
    const double K = L + std::uniform_real_distribution<double>(0.0, L)(gen.rng);
    if (K - L > 0.5 * K) continue;
    double sum = 0;
    for (std::size_t i = 0; i < m; ++i) sum += predict_mean_stake(l[i], K - L + l[i], K, 1000);
    EXPECT_NEAR(sum, 1000 * K, 1e-9 * 1000 * K);
    ++checked;
  }
}

TEST(Properties, ConfigRoundTrip) {
  Gen gen(7);
  for (int c = 0; c < kCases; ++c) {
    ExperimentConfig cfg;
    cfg.initial_stakes = gen.stakes(gen.nodes(1, 6));
    cfg.reward_budget = gen.budget();
    cfg.scheme = (c % 3 == 0) ? Scheme::constant() : (c % 3 == 1) ? Scheme::frd()
                                                                   : Scheme::custom_rows(frd_matrix(cfg.initial_stakes, cfg.reward_budget).to_rows());
    cfg.steps = gen.rng() % 100000;
    cfg.repetitions = 1 + gen.rng() % 1000;
    cfg.base_seed = gen.rng();
    cfg.record.stride = gen.rng() % 50;
    if (c % 2) cfg.record.track_nodes = std::vector<std::size_t>{0};
    EXPECT_EQ(load_config(serialize_config(cfg)), cfg);
  }
}
