#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "csv.hpp"
#include "montecarlo.hpp"

namespace stakeurn {

struct ReportRow {
  std::string label;
  std::string scheme;  // "constant" | "frd"
  double mean_empirical = 0.0;
  double var_empirical = 0.0;
  std::optional<double> mean_predicted;
  std::optional<double> var_predicted;
  std::string regime;  // "beta-limit" for the constant scheme
};

struct LabeledConfig {
  std::string label;
  ExperimentConfig config;
};

/// The four initial-stake settings of the fairness table: S(0) = 100,
/// K = 200, n = 1000, node 0 tracked.
inline std::vector<LabeledConfig> table1_configs(std::uint64_t repetitions, std::uint64_t base_seed) {
  auto make = [&](std::string label, std::vector<double> stakes, std::uint64_t seed_offset) {
    ExperimentConfig c;
    c.initial_stakes = std::move(stakes);
    c.scheme = Scheme::frd();
    c.reward_budget = 200.0;
    c.steps = 1000;
    c.repetitions = repetitions;
    c.base_seed = base_seed + (seed_offset << 32);
    c.record.track_nodes = std::vector<std::size_t>{0};
    return LabeledConfig{std::move(label), std::move(c)};
  };
  return {
      make("Four nodes, initial stake ratio = 1/10", {10.0, 30.0, 30.0, 30.0}, 1),
      make("Ten nodes, initial stake ratio = 1/10", std::vector<double>(10, 10.0), 2),
      make("Two nodes, initial stake ratio = 1/2", {50.0, 50.0}, 3),
      make("Two nodes, initial stake ratio = 1/3", {100.0 / 3.0, 200.0 / 3.0}, 4),
  };
}

inline std::size_t report_node(const ExperimentConfig& config) {
  const auto tracked = tracked_nodes(config);
  return tracked.empty() ? 0 : tracked.front();
}

/// Runs `config` under `scheme` and summarizes the tracked node's final
/// fraction against its analytic prediction.
inline ReportRow report_row(const std::string& label, ExperimentConfig config, const Scheme& scheme,
                            const RunOptions& options = {}) {
  config.scheme = scheme;
  const std::size_t node = report_node(config);
  const RewardMatrix matrix = resolve_matrix(config);
  const ExperimentResult result = run_experiment(config, options);
  const auto samples = result.node_samples(node);

  ReportRow row;
  row.label = label;
  if (samples.size() >= 2) {
    const auto stats = empirical_stats(samples, config.record.histogram_bins);
    row.mean_empirical = stats.mean;
    row.var_empirical = stats.variance;
  } else {
    row.mean_empirical = samples.front();
  }

  switch (scheme.kind) {
    case SchemeKind::Constant: {
      row.scheme = "constant";
      row.regime = "beta-limit";
      try {
        const auto beta = beta_limit_params(config.initial_stakes, config.reward_budget, node);
        row.mean_predicted = beta.mean();
        row.var_predicted = beta.variance();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateBeta) throw;
      }
      break;
    }
    case SchemeKind::Frd:
    case SchemeKind::Custom: {
      row.scheme = scheme.kind == SchemeKind::Frd ? "frd" : "custom";
      if (!matrix.is_balanced()) {
        row.regime = "unbalanced";
        break;
      }
      const RegimeTag regime = classify_regime(matrix, node);
      row.regime = std::string(to_string(regime));
      if (regime == RegimeTag::Supercritical) break;
      const auto p = predict(matrix, node, config.steps, config.initial_total());
      row.mean_predicted = p.mean_fraction;
      row.var_predicted = p.var_fraction;
      break;
    }
  }
  return row;
}

/// Constant and FRD rows for every config, in order.
inline std::vector<ReportRow> table1_report(const std::vector<LabeledConfig>& configs, const RunOptions& options = {}) {
  std::vector<ReportRow> rows;
  for (const auto& c : configs) {
    rows.push_back(report_row(c.label, c.config, Scheme::constant(), options));
    rows.push_back(report_row(c.label, c.config, Scheme::frd(), options));
  }
  return rows;
}

inline std::string write_report_csv(const std::vector<ReportRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  std::string out = "label,scheme,mean_emp,var_emp,mean_pred,var_pred,regime\n";
  for (const auto& r : rows) {
    std::string label = r.label;
    if (label.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : label) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      label = quoted + "\"";
    }
    out += label + ',' + r.scheme + ',' + format_real(r.mean_empirical) + ',' + format_real(r.var_empirical) + ',' +
           opt(r.mean_predicted) + ',' + opt(r.var_predicted) + ',' + r.regime + '\n';
  }
  return out;
}

/// Text table in the column order of the fairness table: one line per label
/// with Constant then FRD, empirical values first and predictions below.
inline std::string render_report_table(const std::vector<ReportRow>& rows) {
  auto sci = [](std::optional<double> v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", *v);
    return std::string(buf);
  };
  auto line = [](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                 const std::string& e) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-40s %-18s %-18s %-18s %-18s\n", a.c_str(), b.c_str(), c.c_str(), d.c_str(),
                  e.c_str());
    return std::string(buf);
  };

  std::string out = line("Initial values", "Mean of Constant", "Var of Constant", "Mean of FRD", "Var of FRD");
  out += std::string(40 + 4 * 19, '-') + "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReportRow* constant = nullptr;
    const ReportRow* frd = nullptr;
    const std::string& label = rows[i].label;
    std::size_t j = i;
    for (; j < rows.size() && rows[j].label == label; ++j) {
      if (rows[j].scheme == "constant") constant = &rows[j];
      else frd = &rows[j];
    }
    auto emp_mean = [&](const ReportRow* r) { return r ? sci(r->mean_empirical) : std::string("-"); };
    auto emp_var = [&](const ReportRow* r) { return r ? sci(r->var_empirical) : std::string("-"); };
    out += line(label, emp_mean(constant), emp_var(constant), emp_mean(frd), emp_var(frd));
    out += line("  predicted", constant ? sci(constant->mean_predicted) : "-",
                constant ? sci(constant->var_predicted) : "-", frd ? sci(frd->mean_predicted) : "-",
                frd ? sci(frd->var_predicted) : "-");
    i = j - 1;
  }
  return out;
}

}  // namespace stakeurn
