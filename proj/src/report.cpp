#include "bftavail/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bftavail/errors.hpp"

namespace bftavail {

namespace {

std::vector<std::string> split(const std::string& line, char separator) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, separator)) fields.push_back(field);
  if (!line.empty() && line.back() == separator) fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t line_number) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DomainError(fmt::format("line {}: '{}' is not a number", line_number, text));
  }
  return value;
}

}  // namespace

std::string format_value(double value) { return fmt::format("{:.12g}", value); }

void write_csv(const SweepTable& table, std::ostream& out) {
  out << 'N';
  for (const auto& column : table.columns) out << ',' << column;
  out << '\n';
  for (std::size_t r = 0; r < table.n_values.size(); ++r) {
    out << table.n_values[r];
    for (double value : table.values[r]) out << ',' << format_value(value);
    out << '\n';
  }
}

SweepTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw DomainError("CSV is empty");
  if (line.back() == '\r') line.pop_back();

  const auto header = split(line, ',');
  if (header.size() < 2 || header.front() != "N") {
    throw DomainError("CSV header must be `N,<series>,...` with at least one series");
  }
  SweepTable table;
  table.columns.assign(header.begin() + 1, header.end());

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw DomainError(fmt::format("line {}: expected {} fields, found {}", line_number,
                                    header.size(), fields.size()));
    }
    const double n = parse_number(fields[0], line_number);
    if (n != static_cast<double>(static_cast<int>(n))) {
      throw DomainError(fmt::format("line {}: N must be an integer", line_number));
    }
    table.n_values.push_back(static_cast<int>(n));
    auto& row = table.values.emplace_back();
    for (std::size_t c = 1; c < fields.size(); ++c) row.push_back(parse_number(fields[c], line_number));
  }
  if (table.n_values.empty()) throw DomainError("CSV has a header but no rows");
  return table;
}

std::string plot_script(const SweepTable& table, const PlotOptions& options) {
  using nlohmann::ordered_json;
  if (table.n_values.empty()) throw DomainError("cannot plot an empty table");

  double largest = 0.0;
  auto values = ordered_json::array();
  for (std::size_t r = 0; r < table.n_values.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      largest = std::max(largest, table.values[r][c]);
      values.push_back({{"N", table.n_values[r]}, {"series", table.columns[c]}, {"A", table.values[r][c]}});
    }
  }
  const double y_max = options.y_max.value_or(largest <= 0.42 ? 0.42 : 1.0);
  const auto [n_low, n_high] = std::minmax_element(table.n_values.begin(), table.n_values.end());

  ordered_json spec;
  spec["$schema"] = "https://vega.github.io/schema/vega-lite/v5.json";
  spec["title"] = options.title;
  spec["width"] = 640;
  spec["height"] = 400;
  spec["data"] = {{"values", values}};
  spec["mark"] = {{"type", "line"}, {"point", true}};
  spec["encoding"] = {
      {"x", {{"field", "N"}, {"type", "quantitative"}, {"title", "N"},
             {"scale", {{"domain", {*n_low, *n_high}}}}}},
      {"y", {{"field", "A"}, {"type", "quantitative"}, {"title", "A"},
             {"scale", {{"domain", {0.0, y_max}}}}}},
      {"color", {{"field", "series"}, {"type", "nominal"}, {"sort", table.columns}}},
  };
  return spec.dump(2) + "\n";
}

void RunManifest::write(std::ostream& out) const {
  out << "command=" << command << '\n';
  out << "version=" << version << '\n';
  for (const auto& [key, value] : parameters) out << "param." << key << '=' << value << '\n';
  out << fmt::format("wall_clock_seconds={:.6f}\n", wall_clock_seconds);
  for (std::size_t k = 0; k < outputs.size(); ++k) out << "output." << k << '=' << outputs[k] << '\n';
}

}  // namespace bftavail
