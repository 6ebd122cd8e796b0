#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "coincast/plot.hpp"
#include "test_util.hpp"

using namespace coincast;

namespace {

bool looks_like_png(const std::string& path) {
  const std::string data = testutil::read_text(path);
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (data.size() < 8) return false;
  for (int i = 0; i < 8; ++i)
    if (static_cast<unsigned char>(data[static_cast<std::size_t>(i)]) != sig[i])
      return false;
  return data.find("IHDR") != std::string::npos &&
         data.find("IEND") != std::string::npos;
}

bool looks_like_svg(const std::string& path) {
  const std::string data = testutil::read_text(path);
  return data.find("<svg") != std::string::npos &&
         data.find("</svg>") != std::string::npos;
}

}  // namespace

TEST_CASE("line chart writes well-formed svg and png") {
  testutil::TempDir dir("plot");
  PlotSeries s{"forecast", "#2ca02c", {}, {}};
  PlotSeries t{"actual", "#1f77b4", {}, {}};
  for (int i = 0; i < 50; ++i) {
    s.x.push_back(i);
    s.y.push_back(100 + 10 * std::sin(i / 4.0));
    t.x.push_back(i);
    t.y.push_back(102 + 10 * std::sin(i / 4.0 + 0.2));
  }
  PlotBand band{"#aec7e8", s.x, {}, {}};
  for (double y : s.y) {
    band.lo.push_back(y - 5);
    band.hi.push_back(y + 5);
  }
  const std::string base = dir.file("chart");
  write_line_chart(base, "demo", {s, t}, &band);
  CHECK(looks_like_svg(base + ".svg"));
  CHECK(looks_like_png(base + ".png"));
  const std::string svg = testutil::read_text(base + ".svg");
  CHECK(svg.find("forecast") != std::string::npos);
  CHECK(svg.find("#1f77b4") != std::string::npos);

  // byte-stable across runs
  const std::string base2 = dir.file("chart2");
  write_line_chart(base2, "demo", {s, t}, &band);
  CHECK(testutil::read_text(base + ".svg") == testutil::read_text(base2 + ".svg"));
  CHECK(testutil::read_text(base + ".png") == testutil::read_text(base2 + ".png"));
}

TEST_CASE("histogram and density plots render") {
  testutil::TempDir dir("plot2");
  const std::string hist = dir.file("hist");
  write_histogram(hist, "errors", {0, 100, 200, 300, 400}, {5, 9, 2, 1});
  CHECK(looks_like_svg(hist + ".svg"));
  CHECK(looks_like_png(hist + ".png"));

  const std::string dens = dir.file("dens");
  write_density_plot(dens, "distribution", 8000.0, 250000.0);
  CHECK(looks_like_svg(dens + ".svg"));
  CHECK(looks_like_png(dens + ".png"));
  const std::string svg = testutil::read_text(dens + ".svg");
  CHECK(svg.find("mu") != std::string::npos);

  // near-zero variance still renders (display-only widening)
  write_density_plot(dir.file("flat"), "flat", 100.0, 0.0);
  CHECK(looks_like_svg(dir.file("flat") + ".svg"));
}

TEST_CASE("the density grid integrates to one") {
  for (const auto& [mu, sigma2] :
       std::vector<std::pair<double, double>>{{0.0, 1.0}, {8000.0, 250000.0},
                                              {-3.0, 0.04}}) {
    const auto [x, y] = gaussian_density_grid(mu, sigma2);
    REQUIRE(x.size() == y.size());
    REQUIRE(x.size() >= 100);
    double integral = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
      integral += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    CHECK(std::abs(integral - 1.0) < 1e-6);
    // density peaks at the mean
    double peak = 0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] > peak) {
        peak = y[i];
        arg = i;
      }
    CHECK(std::abs(x[arg] - mu) < (x[1] - x[0]) * 1.5);
  }
}
