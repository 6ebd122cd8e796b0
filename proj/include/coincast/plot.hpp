#pragma once

#include <string>
#include <utility>
#include <vector>

namespace coincast {

// Static result plots, written as both <base>.svg and <base>.png.

struct PlotSeries {
  std::string name;
  std::string color;  // e.g. "#1f77b4"
  std::vector<double> x, y;
};

// Optional shaded region between lo(x) and hi(x) behind the series.
struct PlotBand {
  std::string color;
  std::vector<double> x, lo, hi;
};

void write_line_chart(const std::string& base, const std::string& title,
                      const std::vector<PlotSeries>& series,
                      const PlotBand* band = nullptr);

void write_histogram(const std::string& base, const std::string& title,
                     const std::vector<double>& bin_edges,
                     const std::vector<std::size_t>& counts);

// Normal density annotated with mu and sigma. A near-zero variance is
// widened for display only.
void write_density_plot(const std::string& base, const std::string& title,
                        double mu, double sigma2);

// The evaluation grid behind the density plot (mu +/- 6 sigma); exposed so
// its trapezoid integral can be checked.
std::pair<std::vector<double>, std::vector<double>> gaussian_density_grid(
    double mu, double sigma2, int n_points = 2001);

}  // namespace coincast
