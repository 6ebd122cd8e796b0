#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "coincast/ensemble.hpp"

namespace coincast {

struct MetricsReport {
  std::string split;  // train / val / test
  std::size_t n = 0;
  double rmse = 0;  // USD
  double mse = 0;   // USD^2
  double mae = 0;   // USD
};

MetricsReport compute_metrics(const std::vector<double>& predictions,
                              const std::vector<double>& actuals,
                              const std::string& split = "test");

struct ErrorDistribution {
  std::vector<double> errors;  // signed, USD
  std::vector<double> bin_edges;
  std::vector<std::size_t> bin_counts;
  // fraction of |error| <= band; reported, never asserted
  std::vector<std::pair<double, double>> share_within;
};

ErrorDistribution error_distribution(const std::vector<double>& predictions,
                                     const std::vector<double>& actuals,
                                     const std::vector<double>& bands,
                                     int n_bins = 20);

double share_within_band(const std::vector<double>& signed_errors, double band);

struct RollingForecast {
  // index h-1 holds horizon h = 1..horizon
  std::vector<double> mean_abs_err, min_abs_err, max_abs_err;
};

// Iterated roll-forward with a price-only model: predict day+1, append the
// prediction to the input, repeat to the horizon. `start_indices` are the
// positions in `closes_usd` of each evaluation window's first forecast day.
RollingForecast rolling_forecast(const EnsembleModel& model,
                                 const std::vector<double>& closes_usd,
                                 const std::vector<std::size_t>& start_indices,
                                 int horizon = 30);

struct ComparisonCell {
  std::string combination;
  std::string kind;  // single_learner / ensemble
  std::vector<MetricsReport> reports;  // train, val, test when successful
  std::string error;                   // nonempty if the cell failed
};

struct ComparisonTable {
  std::vector<ComparisonCell> cells;
};

// Trains one model per (combination, kind) cell on a shared table, split
// and seed, and evaluates each split. Cell failures are recorded, not
// propagated.
ComparisonTable compare_models(const DailySeries& table,
                               const std::vector<std::string>& combinations,
                               const std::vector<std::string>& kinds,
                               const LearnerConfig& base_config, int rounds,
                               const std::array<double, 3>& split_ratios,
                               std::uint64_t seed, int window = 7);

void write_metrics_csv(const std::string& path, const ComparisonTable& table);
// Fixed row order: Training RMSE/MAE, Validation RMSE/MAE, Testing
// RMSE/MSE/MAE; one column per cell.
std::string format_comparison_text(const ComparisonTable& table);

}  // namespace coincast
