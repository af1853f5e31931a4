#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mafd {

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name`; throws ConfigError naming the missing column.
  int column(const std::string& name) const;
  /// Cell as a number ("nan" and "inf" accepted).
  double number(std::size_t row, int col) const;
};

/// Comma-separated file with a header line. Throws ConfigError if it cannot
/// be read or a row has the wrong number of fields.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& source);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
  bool stepped = false;  // horizontal then vertical segments
  bool markers = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Deterministic SVG text. Non-finite points are skipped.
std::string render_svg(const LineChart& chart);

/// Stepped gbest fitness curve per trace (iteration, gbest_fitness columns).
LineChart convergence_chart(const std::vector<CsvTable>& traces);
/// Mean T_2 against mean T_1 per (scheme, antennas) from tradeoff_mean.csv.
LineChart tradeoff_chart(const CsvTable& means);
/// Mean T_1 (solid) and T_2 (dashed) against rho per (scheme, antennas) from si_sweep_mean.csv.
LineChart si_sweep_chart(const CsvTable& means);

/// Renders every figure whose CSVs exist in `dir` and returns the SVG paths.
/// Throws ConfigError when a present CSV is empty or lacks a column.
std::vector<std::string> emit_plots(const std::string& dir);

}  // namespace mafd
