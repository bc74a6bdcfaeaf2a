// Command-line front end: simulate, predict, compare, hist, table1.
//
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stakeurn/stakeurn.hpp"

namespace fs = std::filesystem;
using namespace stakeurn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigFailure {
  std::string message;
};

ExperimentConfig read_config(const std::string& path) {
  try {
    return load_config(read_file(path));
  } catch (const Error& e) {
    throw ConfigFailure{e.what()};
  }
}

nlohmann::json prediction_json(const ExperimentConfig& config, const RewardMatrix& matrix, std::size_t node) {
  nlohmann::json j;
  j["node"] = node;
  if (config.scheme.kind == SchemeKind::Constant) {
    j["regime"] = "supercritical";
    try {
      const auto beta = beta_limit_params(config.initial_stakes, config.reward_budget, node);
      j["beta_limit"] = {{"a", beta.a}, {"b", beta.b}, {"mean", beta.mean()}, {"variance", beta.variance()}};
    } catch (const Error& e) {
      j["error"] = e.what();
    }
    return j;
  }
  if (!matrix.is_balanced()) {
    j["regime"] = nullptr;
    j["error"] = "matrix is not column-balanced; no closed form";
    return j;
  }
  const RegimeTag regime = classify_regime(matrix, node);
  j["regime"] = std::string(to_string(regime));
  const auto [w, l] = (*matrix.balanced_params())[node];
  j["w"] = w;
  j["l"] = l;
  try {
    const auto p = predict(matrix, node, config.steps, config.initial_total());
    j["mean_stake"] = p.mean_stake;
    j["var_stake"] = p.var_stake;
    j["mean_fraction"] = p.mean_fraction;
    j["var_fraction"] = p.var_fraction;
    j["limit_mean_fraction"] = p.limit_mean_fraction;
    j["leading_order_only"] = p.leading_order_only;
  } catch (const Error& e) {
    j["error"] = e.what();
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stake-evolution simulator for Proof-of-Stake reward matrices"};
  app.require_subcommand(1);

  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::string config_path, out_dir = ".";

  auto* simulate = app.add_subcommand("simulate", "Run a config; write samples.csv, stats.csv, run.json");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Print closed-form predictions as JSON");
  predict_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* compare = app.add_subcommand("compare", "Run Constant and FRD on the config's stakes; write report.csv");
  compare->add_option("--config", config_path, "Experiment config (JSON)")->required();
  compare->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string samples_path, beta_spec, svg_path;
  std::size_t hist_node = 0, hist_bins = 100;
  std::optional<double> mark;
  auto* hist = app.add_subcommand("hist", "Render a final-fraction histogram as SVG");
  hist->add_option("--samples", samples_path, "samples.csv from simulate")->required();
  hist->add_option("--beta", beta_spec, "Overlay Beta(a,b) density, given as a,b");
  hist->add_option("--mark", mark, "Draw a marker at this predicted mean");
  hist->add_option("--node", hist_node, "Node to plot")->capture_default_str();
  hist->add_option("--bins", hist_bins, "Number of bins")->capture_default_str();
  hist->add_option("--out", svg_path, "Output SVG path")->required();

  std::uint64_t table_reps = 100000, table_seed = 20220101;
  auto* table1 = app.add_subcommand("table1", "Run the four built-in fairness-table configurations");
  table1->add_option("--reps", table_reps, "Repetitions per configuration")->capture_default_str();
  table1->add_option("--seed", table_seed, "Base seed")->capture_default_str();
  table1->add_option("--out", out_dir, "Directory for report.csv")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  RunOptions options;
  options.threads = threads;

  try {
    if (*simulate) {
      const ExperimentConfig config = read_config(config_path);
      std::cout << "base_seed " << config.base_seed << "\n";
      const ExperimentResult result = run_experiment(config, options);
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "samples.csv", write_samples_csv(result));
      write_file(fs::path(out_dir) / "stats.csv", write_stats_csv(result.time_series()));
      nlohmann::json run;
      run["config"] = config_to_json(config);
      run["base_seed"] = config.base_seed;
      run["proposer_counts"] = result.proposer_counts;
      write_file(fs::path(out_dir) / "run.json", run.dump(2) + "\n");
      std::cout << "wrote " << (fs::path(out_dir) / "samples.csv").string() << ", stats.csv, run.json\n";
    } else if (*predict_cmd) {
      const ExperimentConfig config = read_config(config_path);
      const RewardMatrix matrix = resolve_matrix(config);
      nlohmann::json out;
      out["base_seed"] = config.base_seed;
      out["steps_n"] = config.steps;
      out["reward_budget_K"] = config.reward_budget;
      out["initial_total"] = config.initial_total();
      out["nodes"] = nlohmann::json::array();
      for (std::size_t node : tracked_nodes(config)) out["nodes"].push_back(prediction_json(config, matrix, node));
      std::cout << out.dump(2) << "\n";
    } else if (*compare) {
      const ExperimentConfig config = read_config(config_path);
      std::cout << "base_seed " << config.base_seed << "\n";
      const auto rows = table1_report({{config_path, config}}, options);
      std::cout << render_report_table(rows);
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "report.csv", write_report_csv(rows));
    } else if (*hist) {
      Histogram h;
      HistogramOverlay overlay;
      try {
        std::vector<double> samples;
        for (const auto& row : read_samples_csv(read_file(samples_path)))
          if (row.node == hist_node) samples.push_back(row.final_fraction);
        h = make_histogram(samples, hist_bins);
        if (!beta_spec.empty()) {
          const auto comma = beta_spec.find(',');
          if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--beta expects a,b");
          overlay.beta = BetaParams{std::stod(beta_spec.substr(0, comma)), std::stod(beta_spec.substr(comma + 1))};
          if (!(overlay.beta->a > 0 && overlay.beta->b > 0))
            throw Error(ErrorCode::DegenerateBeta, "Beta parameters must be positive");
        }
      } catch (const std::invalid_argument&) {
        throw ConfigFailure{"--beta expects two numbers a,b"};
      } catch (const Error& e) {
        throw ConfigFailure{e.what()};
      }
      overlay.predicted_mean = mark;
      overlay.title = "node " + std::to_string(hist_node) + " final fractional stake";
      write_file(svg_path, render_histogram_svg(h, overlay));
    } else if (*table1) {
      std::cout << "base_seed " << table_seed << "\n";
      const auto rows = table1_report(table1_configs(table_reps, table_seed), options);
      std::cout << render_report_table(rows);
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "report.csv", write_report_csv(rows));
    }
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.message << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
