#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bftavail/availability.hpp"

namespace bftavail {

inline constexpr const char* kVersion = "1.0.0";

// 12 significant digits, the precision used for every emitted value.
std::string format_value(double value);

// Header `N,<col1>,<col2>,...`, one row per N in table order.
void write_csv(const SweepTable& table, std::ostream& out);

// Parses what write_csv emits. Throws DomainError on an empty or malformed table.
SweepTable read_csv(std::istream& in);

struct PlotOptions {
  std::string title;
  // Upper end of the A axis; by default 1, or 0.42 when every value lies
  // at or below 0.42.
  std::optional<double> y_max;
};

// Self-contained Vega-Lite specification with the table inlined, N on the
// x axis, A on the y axis and one series per table column.
std::string plot_script(const SweepTable& table, const PlotOptions& options);

// Flat key=value record written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string version = kVersion;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> outputs;

  void write(std::ostream& out) const;
};

}  // namespace bftavail
