#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bftavail/errors.hpp"
#include "bftavail/report.hpp"

namespace bftavail {
namespace {

SweepTable sample_table() {
  SweepTable t;
  t.columns = {"fig3_uniform", "fig3_binomial"};
  t.n_values = {4, 5, 6};
  t.values = {{0.997382140046444, 0.123456789012345}, {1.0, 0.0}, {0.5, 1.0 / 3.0}};
  return t;
}

TEST(FormatValue, TwelveSignificantDigits) {
  EXPECT_EQ(format_value(0.997382140046444), "0.997382140046");
  EXPECT_EQ(format_value(1.0), "1");
  EXPECT_EQ(format_value(0.0), "0");
  EXPECT_EQ(format_value(1e-20), "1e-20");
}

TEST(Csv, RoundTrip) {
  const auto table = sample_table();
  std::ostringstream out;
  write_csv(table, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "N,fig3_uniform,fig3_binomial");

  std::istringstream in(out.str());
  const auto back = read_csv(in);
  EXPECT_EQ(back.columns, table.columns);
  EXPECT_EQ(back.n_values, table.n_values);
  for (std::size_t r = 0; r < table.values.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      EXPECT_NEAR(back.values[r][c], table.values[r][c], 1e-12 * std::max(1.0, std::abs(table.values[r][c])));
    }
  }
  // Writing the parsed table again is byte-identical.
  std::ostringstream again;
  write_csv(back, again);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, AcceptsCrlf) {
  std::istringstream in("N,a\r\n4,0.5\r\n");
  const auto t = read_csv(in);
  EXPECT_EQ(t.n_values, std::vector<int>{4});
  EXPECT_EQ(t.values[0][0], 0.5);
}

TEST(Csv, RejectsMalformedInput) {
  for (const char* text : {"", "N\n4\n", "M,a\n4,0.5\n", "N,a\n", "N,a\n4,0.5,1\n", "N,a\n4,abc\n",
                           "N,a\n4.5,0.1\n", "N,a\n4,\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_csv(in), DomainError) << '"' << text << '"';
  }
}

TEST(Plot, VegaLiteStructure) {
  const auto spec = nlohmann::json::parse(plot_script(sample_table(), {"availability", std::nullopt}));
  EXPECT_EQ(spec["title"], "availability");
  EXPECT_EQ(spec["data"]["values"].size(), 6u);
  EXPECT_EQ(spec["data"]["values"][1]["series"], "fig3_binomial");
  EXPECT_EQ(spec["encoding"]["x"]["field"], "N");
  EXPECT_EQ(spec["encoding"]["x"]["scale"]["domain"], nlohmann::json::array({4, 6}));
  EXPECT_EQ(spec["encoding"]["y"]["scale"]["domain"][1], 1.0);
  EXPECT_EQ(spec["encoding"]["color"]["sort"], nlohmann::json::array({"fig3_uniform", "fig3_binomial"}));
}

TEST(Plot, AxisLimit) {
  SweepTable low;
  low.columns = {"d"};
  low.n_values = {4, 5};
  low.values = {{0.1}, {0.42}};
  auto domain_top = [](const std::string& s) { return nlohmann::json::parse(s)["encoding"]["y"]["scale"]["domain"][1].get<double>(); };
  EXPECT_EQ(domain_top(plot_script(low, {})), 0.42);
  EXPECT_EQ(domain_top(plot_script(low, {"", 0.9})), 0.9);
  low.values[1][0] = 0.43;
  EXPECT_EQ(domain_top(plot_script(low, {})), 1.0);
  EXPECT_THROW(plot_script(SweepTable{}, {}), DomainError);
}

TEST(Manifest, KeyValueLines) {
  RunManifest m;
  m.command = "sweep";
  m.parameters = {{"n_min", "4"}, {"ratio", "0.015"}};
  m.wall_clock_seconds = 1.25;
  m.outputs = {"out.csv"};
  std::ostringstream out;
  m.write(out);
  EXPECT_EQ(out.str(),
            "command=sweep\nversion=1.0.0\nparam.n_min=4\nparam.ratio=0.015\n"
            "wall_clock_seconds=1.250000\noutput.0=out.csv\n");
}

}  // namespace
}  // namespace bftavail
