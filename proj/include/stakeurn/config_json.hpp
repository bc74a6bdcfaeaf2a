#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "error.hpp"
#include "montecarlo.hpp"

namespace stakeurn {

// JSON experiment config:
//
// {
//   "initial_stakes": [50, 50],
//   "scheme": "frd",                  // "constant" | "frd" | {"custom": [[...], ...]}
//   "reward_budget_K": 200,
//   "steps_n": 1000,
//   "repetitions": 100,
//   "base_seed": 42,
//   "record": {"stride": 10, "histogram_bins": 100, "track_nodes": [0]}   // optional
// }
//
// Every key in "record" is optional. Unknown keys are rejected at any level.

namespace detail {

[[noreturn]] inline void schema_error(std::string_view field, std::string_view reason) {
  throw Error(ErrorCode::SchemaError, "field '" + std::string(field) + "': " + std::string(reason));
}

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, std::string_view where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) schema_error(std::string(where) + key, "unknown key");
}

inline const nlohmann::json& required(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(key, "missing");
  return *it;
}

inline double as_real(const nlohmann::json& v, std::string_view field) {
  if (!v.is_number()) schema_error(field, "expected a number");
  return v.get<double>();
}

inline std::uint64_t as_count(const nlohmann::json& v, std::string_view field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) schema_error(field, "must be nonnegative");
  schema_error(field, "expected an integer");
}

inline std::vector<double> as_real_array(const nlohmann::json& v, std::string_view field) {
  if (!v.is_array()) schema_error(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], std::string(field) + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace detail

inline ExperimentConfig load_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t line = detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object()) detail::schema_error("<root>", "expected a JSON object");
  detail::reject_unknown(doc,
                         {"initial_stakes", "scheme", "reward_budget_K", "steps_n", "repetitions", "base_seed", "record"},
                         "");

  ExperimentConfig config;
  config.initial_stakes = detail::as_real_array(detail::required(doc, "initial_stakes"), "initial_stakes");

  const auto& scheme = detail::required(doc, "scheme");
  if (scheme.is_string()) {
    const auto name = scheme.get<std::string>();
    if (name == "constant") config.scheme = Scheme::constant();
    else if (name == "frd") config.scheme = Scheme::frd();
    else detail::schema_error("scheme", "expected \"constant\", \"frd\" or {\"custom\": [[...]]}, got \"" + name + "\"");
  } else if (scheme.is_object()) {
    detail::reject_unknown(scheme, {"custom"}, "scheme.");
    const auto& rows = detail::required(scheme, "custom");
    if (!rows.is_array()) detail::schema_error("scheme.custom", "expected an array of rows");
    std::vector<std::vector<double>> matrix;
    for (std::size_t g = 0; g < rows.size(); ++g)
      matrix.push_back(detail::as_real_array(rows[g], "scheme.custom[" + std::to_string(g) + "]"));
    config.scheme = Scheme::custom_rows(std::move(matrix));
  } else {
    detail::schema_error("scheme", "expected a string or an object");
  }

  config.reward_budget = detail::as_real(detail::required(doc, "reward_budget_K"), "reward_budget_K");
  config.steps = detail::as_count(detail::required(doc, "steps_n"), "steps_n");
  config.repetitions = detail::as_count(detail::required(doc, "repetitions"), "repetitions");
  config.base_seed = detail::as_count(detail::required(doc, "base_seed"), "base_seed");

  if (auto it = doc.find("record"); it != doc.end()) {
    const auto& rec = *it;
    if (!rec.is_object()) detail::schema_error("record", "expected an object");
    detail::reject_unknown(rec, {"stride", "histogram_bins", "track_nodes"}, "record.");
    if (auto s = rec.find("stride"); s != rec.end()) config.record.stride = detail::as_count(*s, "record.stride");
    if (auto b = rec.find("histogram_bins"); b != rec.end())
      config.record.histogram_bins = detail::as_count(*b, "record.histogram_bins");
    if (auto t = rec.find("track_nodes"); t != rec.end()) {
      if (!t->is_array()) detail::schema_error("record.track_nodes", "expected an array of node indices");
      std::vector<std::size_t> nodes;
      for (std::size_t i = 0; i < t->size(); ++i)
        nodes.push_back(detail::as_count((*t)[i], "record.track_nodes[" + std::to_string(i) + "]"));
      config.record.track_nodes = std::move(nodes);
    }
  }

  try {
    resolve_matrix(config);
  } catch (const Error& e) {
    detail::schema_error("<config>", e.what());
  }
  return config;
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["initial_stakes"] = config.initial_stakes;
  switch (config.scheme.kind) {
    case SchemeKind::Constant: doc["scheme"] = "constant"; break;
    case SchemeKind::Frd: doc["scheme"] = "frd"; break;
    case SchemeKind::Custom: doc["scheme"] = {{"custom", config.scheme.custom}}; break;
  }
  doc["reward_budget_K"] = config.reward_budget;
  doc["steps_n"] = config.steps;
  doc["repetitions"] = config.repetitions;
  doc["base_seed"] = config.base_seed;
  nlohmann::json rec;
  rec["stride"] = config.record.stride;
  rec["histogram_bins"] = config.record.histogram_bins;
  if (config.record.track_nodes) rec["track_nodes"] = *config.record.track_nodes;
  doc["record"] = std::move(rec);
  return doc;
}

inline std::string serialize_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

}  // namespace stakeurn
