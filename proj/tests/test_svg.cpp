#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "netsel/svg.hpp"

namespace {

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace

TEST_CASE("scatter charts render one marker per point", "[svg]") {
  std::vector<netsel::svg::ScatterPoint> points;
  points.push_back({10, 0.2, 4, netsel::svg::Marker::Circle, "#112233", "a"});
  points.push_back({20, 0.4, 4, netsel::svg::Marker::Square, "#112233", "b"});
  points.push_back({30, 0.1, 4, netsel::svg::Marker::Cross, "#112233", "c"});
  const std::string chart = netsel::svg::scatter_chart(
      "t", {"x", 0, 40}, {"y", 0, 1}, points, {{10, 0.2}, {20, 0.4}}, {{"legend", "#112233"}});
  CHECK(chart.rfind("<svg", 0) == 0);
  CHECK(chart.find("</svg>\n") != std::string::npos);
  CHECK(count_of(chart, "<circle") == 1);
  CHECK(count_of(chart, "<polyline") == 1);
  CHECK(count_of(chart, "<title>") == 3);
  CHECK(chart == netsel::svg::scatter_chart("t", {"x", 0, 40}, {"y", 0, 1}, points,
                                            {{10, 0.2}, {20, 0.4}}, {{"legend", "#112233"}}));
}

TEST_CASE("pie charts cover full circles and slices", "[svg]") {
  const std::string full = netsel::svg::pie_chart("t", {{"only", 1.0}});
  CHECK(count_of(full, "<circle") == 1);
  CHECK(count_of(full, "<path") == 0);

  const std::string split = netsel::svg::pie_chart("t", {{"a", 0.6}, {"b", 0.3}, {"c", 0.1}});
  CHECK(count_of(split, "<path") == 3);
  CHECK(split.find("60.0%") != std::string::npos);
}

TEST_CASE("time series charts stack one panel per series", "[svg]") {
  netsel::svg::Series s1{"latency", "#000000", {{0, 5}, {1, 6}, {2, 7}}};
  netsel::svg::Series s2{"objective", "#ff0000", {{0, 0.5}, {1, 0.5}, {2, 0.4}}};
  const std::string chart = netsel::svg::timeseries_chart("t", "frame", {s1, s2}, {1.0});
  CHECK(count_of(chart, "<polyline") == 2);
  CHECK(count_of(chart, "stroke-dasharray=\"4,3\"") == 2);  // one mark per panel
}
