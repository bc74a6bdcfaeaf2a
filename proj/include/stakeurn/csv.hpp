#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "montecarlo.hpp"

namespace stakeurn {

// 17 significant digits round-trip every double exactly.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string write_samples_csv(const ExperimentResult& result) {
  std::string out = "rep,node,final_fraction\n";
  for (std::uint64_t r = result.rep_begin; r < result.rep_end; ++r)
    for (std::size_t node = 0; node < result.nodes; ++node) {
      out += std::to_string(r);
      out += ',';
      out += std::to_string(node);
      out += ',';
      out += format_real(result.final_fraction(r, node));
      out += '\n';
    }
  return out;
}

inline std::string write_stats_csv(const std::vector<TimeSeriesPoint>& series) {
  std::string out = "step,node,mean,variance\n";
  for (const auto& p : series)
    for (std::size_t t = 0; t < p.nodes.size(); ++t)
      out += std::to_string(p.step) + ',' + std::to_string(p.nodes[t]) + ',' + format_real(p.mean[t]) + ',' +
             format_real(p.variance[t]) + '\n';
  return out;
}

struct SampleRow {
  std::uint64_t rep = 0;
  std::size_t node = 0;
  double final_fraction = 0.0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return cells;
    start = comma + 1;
  }
}

template <typename Row, typename ParseRow>
std::vector<Row> read_csv(std::string_view text, std::string_view header, ParseRow&& parse_row) {
  std::vector<Row> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != header)
        throw Error(ErrorCode::ParseError, "line 1: expected header '" + std::string(header) + "', got '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    try {
      rows.push_back(parse_row(split_csv_line(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (lineno == 0) throw Error(ErrorCode::ParseError, "line 1: empty file");
  return rows;
}

}  // namespace detail

inline std::vector<SampleRow> read_samples_csv(std::string_view text) {
  return detail::read_csv<SampleRow>(text, "rep,node,final_fraction", [](const std::vector<std::string>& cells) {
    if (cells.size() != 3) throw std::invalid_argument("expected 3 columns");
    return SampleRow{std::stoull(cells[0]), static_cast<std::size_t>(std::stoull(cells[1])), std::stod(cells[2])};
  });
}

inline std::vector<TimeSeriesPoint> read_stats_csv(std::string_view text) {
  struct Row {
    std::uint64_t step;
    std::size_t node;
    double mean, variance;
  };
  const auto rows = detail::read_csv<Row>(text, "step,node,mean,variance", [](const std::vector<std::string>& c) {
    if (c.size() != 4) throw std::invalid_argument("expected 4 columns");
    return Row{std::stoull(c[0]), static_cast<std::size_t>(std::stoull(c[1])), std::stod(c[2]), std::stod(c[3])};
  });
  std::vector<TimeSeriesPoint> series;
  for (const auto& r : rows) {
    if (series.empty() || series.back().step != r.step) series.push_back({r.step, {}, {}, {}});
    series.back().nodes.push_back(r.node);
    series.back().mean.push_back(r.mean);
    series.back().variance.push_back(r.variance);
  }
  return series;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace stakeurn
