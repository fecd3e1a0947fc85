#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "narkoop/errors.hpp"
#include "narkoop/types.hpp"

namespace narkoop {

/// Relative tolerance for the uniform-timestep check on ingestion.
inline constexpr double kTimestepTolerance = 1e-6;

struct GrowthSeries {
  std::string well_id;
  std::optional<double> casein_g_l;
  std::optional<double> glucose_g_l;
  Series od;
};

/// A plate of growth curves: equal-length OD series on one uniform time grid.
struct GrowthDataset {
  double timestep_min = 0.0;
  double start_time_min = 0.0;
  std::vector<GrowthSeries> wells;

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(wells.size());
    for (const auto& w : wells) out.push_back(w.well_id);
    return out;
  }

  SeriesSet series() const {
    SeriesSet out;
    out.reserve(wells.size());
    for (const auto& w : wells) out.push_back(w.od);
    return out;
  }

  const GrowthSeries* find(std::string_view id) const {
    for (const auto& w : wells) {
      if (w.well_id == id) return &w;
    }
    return nullptr;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.emplace_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const std::string_view sv = cell;
  if (sv.empty()) {
    throw ParseError("plate csv: empty cell at row " + std::to_string(row) + ", column " + std::to_string(col),
                     row, col);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) {
    throw ParseError("plate csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col),
                     row, col);
  }
  return value;
}

inline std::optional<std::vector<double>> parse_metadata_row(std::string_view line, std::string_view key,
                                                             std::size_t row) {
  std::string_view s = trim(line);
  if (!s.starts_with("#")) return std::nullopt;
  s = trim(s.substr(1));
  if (!s.starts_with(key)) return std::nullopt;
  s = trim(s.substr(key.size()));
  if (!s.starts_with(":")) return std::nullopt;
  s = trim(s.substr(1));
  std::vector<double> values;
  const auto cells = split_csv_line(s);
  values.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    values.push_back(parse_cell(cells[c], row, c + 1));
  }
  return values;
}

}  // namespace detail

/// Reads the plate-reader CSV schema:
///
///   # casein_gL: <one value per well>        (optional)
///   # glucose_gL: <one value per well>       (optional)
///   time_min,<well id>,<well id>,...
///   <time>,<od>,<od>,...
///
/// Rows must be rectangular, cells numeric, OD values finite and
/// non-negative, and the time column uniformly spaced to relative 1e-6.
inline GrowthDataset load_plate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_plate_csv: cannot open '" + path.string() + "'");

  GrowthDataset dataset;
  std::optional<std::vector<double>> casein;
  std::optional<std::vector<double>> glucose;

  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  std::vector<double> times;

  while (std::getline(in, line)) {
    ++row;
    const std::string_view sv = detail::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      if (auto v = detail::parse_metadata_row(sv, "casein_gL", row)) casein = std::move(v);
      else if (auto g = detail::parse_metadata_row(sv, "glucose_gL", row)) glucose = std::move(g);
      continue;  // unrecognized comment lines are ignored
    }
    const auto cells = detail::split_csv_line(sv);
    if (!have_header) {
      if (cells.size() < 2 || cells[0] != "time_min") {
        throw ParseError("plate csv: header must be 'time_min,<well ids...>' (row " + std::to_string(row) + ")",
                         row, 1);
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          throw ParseError("plate csv: empty well id at row " + std::to_string(row) + ", column " +
                               std::to_string(c + 1),
                           row, c + 1);
        }
        dataset.wells.push_back(GrowthSeries{cells[c], std::nullopt, std::nullopt, {}});
      }
      have_header = true;
      continue;
    }
    if (cells.size() != dataset.wells.size() + 1) {
      const std::size_t col =
          cells.size() < dataset.wells.size() + 1 ? cells.size() + 1 : dataset.wells.size() + 2;
      throw ParseError("plate csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(dataset.wells.size() + 1),
                       row, col);
    }
    times.push_back(detail::parse_cell(cells[0], row, 1));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const double od = detail::parse_cell(cells[c], row, c + 1);
      if (!std::isfinite(od) || od < 0.0) {
        throw DataError("plate csv: OD at row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                        " must be finite and non-negative");
      }
      dataset.wells[c - 1].od.push_back(od);
    }
  }

  if (!have_header) throw ParseError("plate csv: missing header row", 0, 0);
  if (times.size() < 2) {
    throw DataError("plate csv: need at least two timepoints, got " + std::to_string(times.size()));
  }

  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw DataError("plate csv: time column must be strictly increasing");
  for (std::size_t i = 2; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > kTimestepTolerance * std::abs(dt)) {
      throw ParseError("plate csv: non-uniform timestep at row " + std::to_string(i + 1) +
                           " (step " + std::to_string(step) + " vs " + std::to_string(dt) + ")",
                       i + 1, 1);
    }
  }
  dataset.timestep_min = dt;
  dataset.start_time_min = times[0];

  auto attach = [&](const std::optional<std::vector<double>>& values, bool is_casein) {
    if (!values) return;
    if (values->size() != dataset.wells.size()) {
      throw DataError(std::string("plate csv: ") + (is_casein ? "casein_gL" : "glucose_gL") +
                      " metadata has " + std::to_string(values->size()) + " values for " +
                      std::to_string(dataset.wells.size()) + " wells");
    }
    for (std::size_t i = 0; i < values->size(); ++i) {
      if (is_casein) dataset.wells[i].casein_g_l = (*values)[i];
      else dataset.wells[i].glucose_g_l = (*values)[i];
    }
  };
  attach(casein, true);
  attach(glucose, false);
  return dataset;
}

inline void save_plate_csv(const GrowthDataset& dataset, const std::filesystem::path& path) {
  if (dataset.wells.empty()) throw ContractError("save_plate_csv: dataset has no wells");
  const std::size_t n = dataset.wells.front().od.size();
  for (const auto& w : dataset.wells) {
    if (w.od.size() != n) throw ContractError("save_plate_csv: series lengths differ");
  }
  std::ofstream out(path);
  if (!out) throw DataError("save_plate_csv: cannot open '" + path.string() + "' for writing");

  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  const bool all_casein = std::all_of(dataset.wells.begin(), dataset.wells.end(),
                                      [](const GrowthSeries& w) { return w.casein_g_l.has_value(); });
  const bool all_glucose = std::all_of(dataset.wells.begin(), dataset.wells.end(),
                                       [](const GrowthSeries& w) { return w.glucose_g_l.has_value(); });
  if (all_casein) {
    out << "# casein_gL:";
    for (std::size_t i = 0; i < dataset.wells.size(); ++i) {
      out << (i == 0 ? " " : ",") << fmt(*dataset.wells[i].casein_g_l);
    }
    out << '\n';
  }
  if (all_glucose) {
    out << "# glucose_gL:";
    for (std::size_t i = 0; i < dataset.wells.size(); ++i) {
      out << (i == 0 ? " " : ",") << fmt(*dataset.wells[i].glucose_g_l);
    }
    out << '\n';
  }
  out << "time_min";
  for (const auto& w : dataset.wells) out << ',' << w.well_id;
  out << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    out << fmt(dataset.start_time_min + static_cast<double>(t) * dataset.timestep_min);
    for (const auto& w : dataset.wells) out << ',' << fmt(w.od[t]);
    out << '\n';
  }
  if (!out) throw DataError("save_plate_csv: write to '" + path.string() + "' failed");
}

}  // namespace narkoop
