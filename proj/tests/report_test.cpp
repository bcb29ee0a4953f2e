#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "minimon/report.hpp"
#include "oracles.hpp"

using namespace minimon;

namespace {

const std::string kGoldenDir = MINIMON_GOLDEN_DIR;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Set MINIMON_UPDATE_GOLDEN=1 to rewrite the expected files after an intended format change.
void expect_golden(const std::string& name, const std::string& actual) {
  const std::string path = kGoldenDir + "/" + name;
  if (const char* update = std::getenv("MINIMON_UPDATE_GOLDEN"); update != nullptr && *update == '1') {
    std::ofstream(path, std::ios::binary) << actual;
  }
  const std::string expected = read_file(path);
  ASSERT_FALSE(expected.empty()) << "missing golden file " << path;
  EXPECT_EQ(actual, expected);
}

using oracles::chart_fixture;
using oracles::table_fixture;

SummaryStats stats(double mean, double ci, double q1, double median, double q3) {
  return oracles::fixture_stats(mean, ci, q1, median, q3);
}

std::vector<std::pair<double, double>> parse_points(const std::string& points) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(points);
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
  }
  return out;
}

}  // namespace

TEST(RenderTable, Golden) { expect_golden("summary_table.txt", render_table(table_fixture())); }

TEST(RenderTable, ShapeAndAlignment) {
  const auto table = render_table(table_fixture());
  std::vector<std::string> lines;
  std::istringstream in(table);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 8u);
  EXPECT_EQ(lines[1].find_first_not_of('-'), std::string::npos);
  EXPECT_EQ(lines[4].find_first_not_of('-'), std::string::npos);
  EXPECT_EQ(lines[2].rfind("Mean", 0), 0u);
  EXPECT_NE(lines[3].find("±0.0000"), std::string::npos);
  EXPECT_EQ(detail::display_width(lines[0]), detail::display_width(lines[2]));
  EXPECT_EQ(detail::display_width(lines[3]), detail::display_width(lines[7]));
}

TEST(RenderTable, EmptyInputRejected) { EXPECT_THROW(render_table({}), std::invalid_argument); }

TEST(SummaryCsv, Golden) { expect_golden("summary.csv", render_summary_csv(table_fixture())); }

TEST(SummaryCsv, HeaderAndRows) {
  const auto csv = render_summary_csv(table_fixture());
  EXPECT_EQ(csv.rfind("config_id,n,mean_us,ci95_us,q1_us,median_us,q3_us,stddev_us\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("Full,250000,4.771100,0.012300,"), std::string::npos);
}

TEST(Comparisons, SameDepthOnly) {
  auto s = table_fixture();
  s.push_back({"deep", "direct-full", 128, stats(40, 0.1, 1, 2, 3)});
  const auto c = pairwise_comparisons(s);
  EXPECT_EQ(c.size(), 6u);
  for (const auto& x : c) EXPECT_NE(x.config_b, "deep");
  const auto text = render_comparisons(c);
  EXPECT_NE(text.find("No instr. vs Full: a_faster (significant), ratio b/a = 87.0639"), std::string::npos) << text;
}

TEST(DepthChart, Golden) { expect_golden("depth_chart.svg", render_depth_chart(chart_fixture())); }

TEST(DepthChart, Deterministic) {
  EXPECT_EQ(render_depth_chart(chart_fixture()), render_depth_chart(chart_fixture()));
}

TEST(DepthChart, BandMatchesLayout) {
  const auto series = chart_fixture();
  const auto svg = render_depth_chart(series);
  const auto layout = ChartLayout::fit(series);
  const std::regex band_re("<polygon class=\"band\" points=\"([^\"]*)\"");
  const std::regex line_re("<polyline class=\"mean\" points=\"([^\"]*)\"");
  std::vector<std::string> bands, lines;
  for (std::sregex_iterator it(svg.begin(), svg.end(), band_re), end; it != end; ++it) bands.push_back((*it)[1]);
  for (std::sregex_iterator it(svg.begin(), svg.end(), line_re), end; it != end; ++it) lines.push_back((*it)[1]);
  ASSERT_EQ(bands.size(), series.size());
  ASSERT_EQ(lines.size(), series.size());
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto band = parse_points(bands[s]);
    const auto line = parse_points(lines[s]);
    const auto& pts = series[s].points;
    ASSERT_EQ(band.size(), 2 * pts.size());
    ASSERT_EQ(line.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      const auto& lower = band[band.size() - 1 - i];
      EXPECT_NEAR(band[i].first, layout.x(static_cast<double>(p.depth)), 0.005);
      EXPECT_NEAR(band[i].second, layout.y(p.mean + p.stddev), 0.005);
      EXPECT_NEAR(lower.first, layout.x(static_cast<double>(p.depth)), 0.005);
      EXPECT_NEAR(lower.second, layout.y(p.mean - p.stddev), 0.005);
      EXPECT_NEAR(line[i].second, layout.y(p.mean), 0.005);
      // upper edge above the mean above the lower edge (SVG y grows downward)
      EXPECT_LE(band[i].second, line[i].second);
      EXPECT_GE(lower.second, line[i].second);
    }
  }
}

TEST(DepthChart, LayoutMapsExtremesToPlotEdges) {
  const auto layout = ChartLayout::fit(chart_fixture());
  EXPECT_DOUBLE_EQ(layout.x(2), ChartLayout::kLeft);
  EXPECT_DOUBLE_EQ(layout.x(128), ChartLayout::kWidth - ChartLayout::kRight);
  EXPECT_DOUBLE_EQ(layout.y(layout.y_min), ChartLayout::kHeight - ChartLayout::kBottom);
  EXPECT_DOUBLE_EQ(layout.y(layout.y_max), ChartLayout::kTop);
}

TEST(DepthChart, WellFormedXml) {
  const auto svg = render_depth_chart(chart_fixture());
  // tag balance: every opened non-self-closing element is closed in order
  std::vector<std::string> stack;
  const std::regex tag_re("<(/?)([a-zA-Z]+)[^>]*?(/?)>");
  for (std::sregex_iterator it(svg.begin(), svg.end(), tag_re), end; it != end; ++it) {
    const auto& m = *it;
    if (m[1] == "/") {
      ASSERT_FALSE(stack.empty());
      ASSERT_EQ(stack.back(), m[2].str());
      stack.pop_back();
    } else if (m[3] != "/") {
      stack.push_back(m[2]);
    }
  }
  EXPECT_TRUE(stack.empty());
  EXPECT_EQ(svg.find("a<b>"), std::string::npos);
  EXPECT_NE(svg.find("a&lt;b&gt;&amp;&quot;c&quot;"), std::string::npos);
}

TEST(DepthChart, NeedsTwoDepths) {
  const std::vector<DepthSeries> one{{"x", {{10, 1.0, 0.1}}}};
  EXPECT_THROW(render_depth_chart(one), std::invalid_argument);
  EXPECT_THROW(render_depth_chart({}), std::invalid_argument);
}

TEST(DepthSeries, GroupsAndSorts) {
  const std::vector<NamedSummary> s{{"a@d8", "a", 8, stats(2, 0, 0, 0, 0)},
                                    {"b@d2", "b", 2, stats(1, 0, 0, 0, 0)},
                                    {"a@d2", "a", 2, stats(1, 0, 0, 0, 0)}};
  const auto series = depth_series(s);
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].config_id, "a");
  EXPECT_EQ(series[0].points[0].depth, 2);
  EXPECT_EQ(series[0].points[1].depth, 8);
}
