// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stakeurn/stakeurn.hpp"

using namespace stakeurn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[x] ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig with_scheme(ExperimentConfig c, Scheme s, std::uint64_t reps, std::uint64_t steps = 1000) {
  c.scheme = std::move(s);
  c.repetitions = reps;
  c.steps = steps;
  return c;
}

SampleStats node0_stats(const ExperimentConfig& c, const RunOptions& opt = {}) {
  return empirical_stats(run_experiment(c, opt).node_samples(0), 100);
}

bool in(double x, double lo, double hi) { return x >= lo && x <= hi; }

// Criteria 1-3: empirical columns of the fairness table.
Outcome table_row(const LabeledConfig& lc, std::uint64_t reps, double const_mean_tol,
                  std::optional<double> const_mean_target, double const_var, double const_var_tol, double frd_mean,
                  std::optional<double> frd_mean_tol, double frd_var_lo, double frd_var_hi, bool timed) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cs = node0_stats(with_scheme(lc.config, Scheme::constant(), reps), {.threads = 1});
  const auto fs = node0_stats(with_scheme(lc.config, Scheme::frd(), reps), {.threads = 1});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (const_mean_target)
    o.check(std::abs(cs.mean - *const_mean_target) <= const_mean_tol,
            fmt("Constant mean %.4f (want %.3f +- %.3f)", cs.mean, *const_mean_target, const_mean_tol));
  o.check(std::abs(cs.variance - const_var) <= const_var_tol,
          fmt("Constant var %.4f (want %.3f +- %.3f)", cs.variance, const_var, const_var_tol));
  if (frd_mean_tol)
    o.check(std::abs(fs.mean - frd_mean) <= *frd_mean_tol,
            fmt("FRD mean %.4f (want %.3f +- %.3f)", fs.mean, frd_mean, *frd_mean_tol));
  o.check(in(fs.variance, frd_var_lo, frd_var_hi),
          fmt("FRD var %.3e (want [%.1e, %.1e])", fs.variance, frd_var_lo, frd_var_hi));
  if (timed) o.check(secs < 30.0, fmt("%.1f s single-threaded (< 30 s)", secs));
  return o;
}

Outcome criterion1() {
  const auto lc = table1_configs(1, 0x5eed0001)[2];
  return table_row(lc, 20000, 0.01, 0.5, 0.167, 0.012, 0.5, 0.003, 3.6e-4, 5.0e-4, true);
}

Outcome criterion2() {
  const auto lc = table1_configs(1, 0x5eed0002)[3];
  return table_row(lc, 20000, 0.0, std::nullopt, 0.147, 0.012, 1.0 / 3.0, 0.003, 3.2e-4, 4.6e-4, true);
}

Outcome criterion3() {
  Outcome o;
  for (std::size_t row : {0u, 1u}) {
    const auto lc = table1_configs(1, 0x5eed0003)[row];
    const auto r = table_row(lc, 20000, 0.0, std::nullopt, 0.060, 0.006, 0.1, std::nullopt, 1.3e-4, 1.8e-4, false);
    o.check(r.pass, std::to_string(lc.config.initial_stakes.size()) + " nodes: " + r.detail);
  }
  return o;
}

// Criterion 4: stake variance against (K-w) l n ln n, and away from the
// alternative constant alpha S(0) (2 - v) v.
Outcome criterion4() {
  Outcome o;
  for (const auto& lc : table1_configs(1, 0x5eed0004)) {
    const auto c = with_scheme(lc.config, Scheme::frd(), 100000);
    const auto stats = node0_stats(c);
    const double K = c.reward_budget, s0 = c.initial_total(), n = static_cast<double>(c.steps);
    const double total = s0 + K * n;
    const double emp = stats.variance * total * total;
    const auto frd = frd_matrix(c.initial_stakes, K);
    const auto& p = (*frd.balanced_params())[0];
    const double predicted = (K - p.w) * p.l * n * std::log(n);
    const double alpha = K / (2 * s0), v = c.initial_stakes[0] / s0;
    const double alt_constant = alpha * s0 * (2 - v) * v * n * std::log(n);
    const double rel = std::abs(emp / predicted - 1.0);
    const double off = emp / alt_constant;
    o.check(rel <= 0.15 && (off > 10.0 || off < 0.1),
            fmt("%zu nodes v=%.3f: emp/predicted %.3f, emp/alt %.1f", c.initial_stakes.size(), v, emp / predicted, off));
  }
  return o;
}

// Criterion 5: ln n / n decay of the FRD variance, mean pinned at v(0).
Outcome criterion5() {
  Outcome o;
  const std::uint64_t reps = 20000;
  for (const auto& lc : table1_configs(1, 0x5eed0005)) {
    const double v = lc.config.initial_stakes[0] / lc.config.initial_total();
    const auto short_run = node0_stats(with_scheme(lc.config, Scheme::frd(), reps, 1000));
    const auto long_run = node0_stats(with_scheme(lc.config, Scheme::frd(), reps, 10000));
    const double ratio = long_run.variance / short_run.variance;
    const double se_short = std::sqrt(short_run.variance / reps), se_long = std::sqrt(long_run.variance / reps);
    const bool ok = ratio < 0.25 && std::abs(short_run.mean - v) <= 3 * se_short &&
                    std::abs(long_run.mean - v) <= 3 * se_long;
    o.check(ok, fmt("%zu nodes: ratio %.3f, mean dev %.2f/%.2f SE", lc.config.initial_stakes.size(), ratio,
                    (short_run.mean - v) / se_short, (long_run.mean - v) / se_long));
  }
  return o;
}

// Criterion 6: Constant final fractions against the Beta limit.
Outcome criterion6() {
  Outcome o;
  auto c = with_scheme(table1_configs(1, 0x5eed0006)[2].config, Scheme::constant(), 10000);
  const auto samples = run_experiment(c).node_samples(0);
  const double d = ks_distance(samples, beta_limit_params(c.initial_stakes, c.reward_budget, 0));
  // The finite-n law is a lattice of n + 1 atoms (beta-binomial); its exact
  // KS distance to the Beta limit bounds what any sample can reach.
  const auto beta = beta_limit_params(c.initial_stakes, c.reward_budget, 0);
  const double n = static_cast<double>(c.steps), s0 = c.initial_total(), K = c.reward_budget;
  const double log_norm = std::lgamma(beta.a) + std::lgamma(beta.b) - std::lgamma(beta.a + beta.b);
  double cdf = 0.0, floor = 0.0;
  for (std::uint64_t k = 0; k <= c.steps; ++k) {
    const double kd = static_cast<double>(k);
    const double x = (c.initial_stakes[0] + K * kd) / (s0 + K * n);
    const double limit = beta_cdf(beta, x);
    floor = std::max(floor, std::abs(limit - cdf));
    cdf += std::exp(std::lgamma(n + 1) - std::lgamma(kd + 1) - std::lgamma(n - kd + 1) + std::lgamma(kd + beta.a) +
                    std::lgamma(n - kd + beta.b) - std::lgamma(n + beta.a + beta.b) - log_norm);
    floor = std::max(floor, std::abs(limit - cdf));
  }
  o.check(d < 0.05, fmt("KS distance to Beta(0.25,0.25) = %.4f (< 0.05); exact finite-n distance %.4f", d, floor));
  return o;
}

// Criterion 7: 3-node balanced matrix, exhaustive enumeration to n = 8.
Outcome criterion7() {
  Outcome o;
  const oracle::Matrix rows{{3, 2, 3}, {1, 4, 3}, {1, 2, 5}};
  const std::vector<double> stakes{2, 1, 5};
  const double K = 8, s0 = 8;
  const auto matrix = custom_matrix(rows);
  const auto& params = *matrix.balanced_params();

  double worst_rec = 0;
  for (int n = 0; n <= 8; ++n) {
    const auto exact = oracle::enumerate_means(rows, stakes, n);
    for (std::size_t i = 0; i < 3; ++i)
      worst_rec = std::max(worst_rec, std::abs(expected_stake(params[i].l, params[i].w, K, stakes[i], s0, n) - exact[i]));
  }
  o.check(worst_rec <= 1e-10, fmt("recurrence vs enumeration max |diff| %.1e", worst_rec));

  ExperimentConfig c;
  c.initial_stakes = stakes;
  c.scheme = Scheme::custom_rows(rows);
  c.reward_budget = K;
  c.steps = 8;
  c.repetitions = 1000000;
  c.base_seed = 0x5eed0007;
  const auto r = run_experiment(c);
  const auto exact = oracle::enumerate_means(rows, stakes, 8);
  const double total = s0 + 8 * K;
  double worst_z = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto st = empirical_stats(r.node_samples(i), 10);
    const double z = std::abs(st.mean * total - exact[i]) / (std::sqrt(st.variance / c.repetitions) * total);
    worst_z = std::max(worst_z, z);
  }
  o.check(worst_z <= 4.0, fmt("simulated means vs enumeration max %.2f sigma (<= 4)", worst_z));
  return o;
}

// Criterion 8: byte-identical outputs across reruns and worker counts.
Outcome criterion8() {
  Outcome o;
  const std::string text = R"({"initial_stakes": [10, 30, 60], "scheme": "frd", "reward_budget_K": 200,
    "steps_n": 500, "repetitions": 400, "base_seed": 1234, "record": {"stride": 25}})";
  const auto config = load_config(text);
  auto emit = [&](unsigned threads) {
    const auto result = run_experiment(config, {.threads = threads, .chunk = 16});
    return std::make_pair(write_samples_csv(result), write_stats_csv(result.time_series()));
  };
  const auto a = emit(1), b = emit(1), p = emit(4);
  o.check(a == b, "rerun byte-identical");
  o.check(a == p, "1 vs 4 workers byte-identical");
  return o;
}

// Criterion 9: structural invariants over random cases.
Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(0x5eed0009);
  std::uniform_int_distribution<std::size_t> nodes(1, 16);
  std::uniform_real_distribution<double> mag(-1, 3);
  int fails = 0;
  const int cases = 1000;
  for (int c = 0; c < cases; ++c) {
    std::vector<double> s(nodes(rng));
    for (auto& x : s) x = std::pow(10.0, mag(rng));
    const double K = std::pow(10.0, mag(rng));
    const double s0 = std::accumulate(s.begin(), s.end(), 0.0);
    const auto frd = frd_matrix(s, K);
    const auto constant = constant_matrix(s.size(), K);
    double share_sum = 0;
    for (std::size_t g = 0; g < s.size(); ++g) {
      for (const auto* m : {&frd, &constant}) {
        const auto row = m->row(g);
        fails += std::abs(std::accumulate(row.begin(), row.end(), 0.0) - K) > 1e-9 * K;
      }
      fails += classify_regime(frd, g) != RegimeTag::Critical;
      const auto& p = (*frd.balanced_params())[g];
      share_sum += limit_mean_fraction(p.l, p.w, K);
    }
    fails += std::abs(share_sum - 1.0) > 1e-9;
    const std::uint64_t n = static_cast<std::uint64_t>(c % 100);
    const auto run = simulate_trajectory(new_state(s), c % 2 ? frd : constant, n, c, 0);
    fails += run.final_state.total() != s0 + static_cast<double>(n) * K;
    const double summed = std::accumulate(run.final_state.stakes.begin(), run.final_state.stakes.end(), 0.0);
    fails += std::abs(summed - run.final_state.total()) > 1e-9 * run.final_state.total();
  }
  o.check(fails == 0, fmt("%d random cases, %d violations", cases, fails));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 fairness table, two nodes 1/2", criterion1},
      {"2 fairness table, two nodes 1/3", criterion2},
      {"3 fairness table, 4 and 10 nodes 1/10", criterion3},
      {"4 critical variance constant", criterion4},
      {"5 FRD variance decay and mean", criterion5},
      {"6 Constant vs Beta limit (KS)", criterion6},
      {"7 3-node enumeration oracle", criterion7},
      {"8 determinism", criterion8},
      {"9 structural invariants", criterion9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
