#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "coincast/market_data.hpp"

namespace coincast {

// Canonical 18-channel order of the merged feature store.
const std::vector<std::string>& canonical_channels();

// A named modality combination and its ordered channel list.
struct FeatureSpec {
  std::string name;
  std::vector<std::string> channels;

  int dimension() const { return static_cast<int>(channels.size()); }
};

// Known combinations: trading (9), sentiment (2), trading+hash (10),
// trading+search (10), trading+blockchain (15), trading+sentiment (11),
// all (18), plus price (close only, 1) for roll-forward forecasting.
FeatureSpec select_modalities(const std::string& id);

struct Span {
  std::size_t offset = 0;
  std::size_t count = 0;
};

struct SplitSpans {
  Span train, val, test;
};

// Contiguous chronological train/val/test spans sized
// floor(N*r_train) / floor(N*r_val) / remainder.
SplitSpans chronological_split(std::size_t n, const std::array<double, 3>& ratios);

// Per-channel (min, max) fitted on the training split only, plus the
// close-price stats used for the prediction target.
struct NormalizationStats {
  std::vector<std::string> channels;
  std::vector<double> mins, maxs;
  double target_min = 0, target_max = 0;

  bool degenerate(std::size_t channel) const { return mins[channel] == maxs[channel]; }
};

NormalizationStats fit_normalization(const DailySeries& table,
                                     const FeatureSpec& spec, Span train);

// (x - min) / (max - min); degenerate channels map to 0. No clipping:
// out-of-range inference inputs are legitimate.
double normalize_value(double x, double min, double max);
// Exact inverse for non-degenerate channels; returns min when degenerate.
double denormalize_value(double v, double min, double max);

inline double normalize_target(double usd, const NormalizationStats& s) {
  return normalize_value(usd, s.target_min, s.target_max);
}
inline double denormalize_target(double v, const NormalizationStats& s) {
  return denormalize_value(v, s.target_min, s.target_max);
}

// 7 x D normalized feature matrix for days t-6..t with the normalized
// close of day t+1 as target.
struct WindowSample {
  Eigen::MatrixXd X;  // window x D
  double y = 0;
  Date date;  // day t+1
};

using Dataset = std::vector<WindowSample>;

// One sample per valid position inside the span; a span of length L yields
// L - window - horizon + 1 samples. Never straddles the span boundary.
Dataset build_windows(const DailySeries& table, const FeatureSpec& spec,
                      const NormalizationStats& stats, Span span,
                      int window = 7, int horizon = 1);

// features.csv: date plus the 18 canonical channels.
void write_feature_table(const std::string& path, const DailySeries& table);
DailySeries load_feature_table(const std::string& path);

// Index of a channel in a table; throws DataError when absent.
std::size_t channel_index(const DailySeries& table, const std::string& name);

}  // namespace coincast
