#pragma once

// Plot-ready CSV. Every file starts with a versioned schema comment naming the units, then a header
// row. Numbers are written with 17 significant digits so files round-trip and are byte-stable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsm/histogram.hpp"
#include "rsm/kinematics.hpp"

namespace rsm::io {

inline constexpr int kCsvSchemaVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Column-major table. All columns must have equal length.
struct CsvTable {
  std::string schema;                 // e.g. "kinematic_series"
  std::string units;                  // e.g. "tau[s] t[s] x[m] v[m/s]"
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};

inline void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  if (table.names.size() != table.columns.size()) throw std::invalid_argument("csv: names/columns mismatch");
  const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (const auto& col : table.columns)
    if (col.size() != rows) throw std::invalid_argument("csv: columns differ in length");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "# rsm " << table.schema << " v" << kCsvSchemaVersion << "; units: " << table.units << "\n";
  for (std::size_t j = 0; j < table.names.size(); ++j) out << (j ? "," : "") << table.names[j];
  out << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << format_number(table.columns[j][i]);
    out << "\n";
  }
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_series_csv(const KinematicSeries& s, const std::filesystem::path& path) {
  write_csv({"kinematic_series", "tau[s] t[s] x[m] v[m/s]", {"tau", "t", "x", "v"}, {s.tau, s.t, s.x, s.v}}, path);
}

inline void write_histogram_csv(const Histogram& h, const std::filesystem::path& path) {
  std::vector<double> left, right;
  for (std::size_t k = 0; k < h.n_bins(); ++k) {
    left.push_back(h.edges[k]);
    right.push_back(h.edges[k + 1]);
  }
  write_csv({"histogram", "bin_left[x] bin_right[x] density[1/x]", {"bin_left", "bin_right", "density"},
             {left, right, h.density}},
            path);
}

}  // namespace rsm::io
