#include "coincast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coincast/csv.hpp"
#include "coincast/errors.hpp"
#include "coincast/rng.hpp"

namespace coincast {

MetricsReport compute_metrics(const std::vector<double>& predictions,
                              const std::vector<double>& actuals,
                              const std::string& split) {
  if (predictions.empty()) throw DataError("compute_metrics: empty input");
  if (predictions.size() != actuals.size())
    throw DataError("compute_metrics: length mismatch, " +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(actuals.size()));
  MetricsReport report;
  report.split = split;
  report.n = predictions.size();
  double abs_sum = 0, sq_sum = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - actuals[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  report.mae = abs_sum / static_cast<double>(report.n);
  report.mse = sq_sum / static_cast<double>(report.n);
  report.rmse = std::sqrt(report.mse);
  return report;
}

double share_within_band(const std::vector<double>& signed_errors, double band) {
  if (signed_errors.empty()) throw DataError("share_within_band: empty input");
  std::size_t hits = 0;
  for (double e : signed_errors)
    if (std::abs(e) <= band) ++hits;
  return static_cast<double>(hits) / static_cast<double>(signed_errors.size());
}

ErrorDistribution error_distribution(const std::vector<double>& predictions,
                                     const std::vector<double>& actuals,
                                     const std::vector<double>& bands, int n_bins) {
  if (predictions.empty() || predictions.size() != actuals.size())
    throw DataError("error_distribution: empty or mismatched inputs");
  ErrorDistribution dist;
  dist.errors.resize(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i)
    dist.errors[i] = predictions[i] - actuals[i];

  const auto [lo_it, hi_it] = std::minmax_element(dist.errors.begin(), dist.errors.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {  // all identical: one-wide bin around the value
    lo -= 0.5;
    hi += 0.5;
  }
  dist.bin_counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (int b = 0; b <= n_bins; ++b)
    dist.bin_edges.push_back(lo + (hi - lo) * b / n_bins);
  for (double e : dist.errors) {
    int b = static_cast<int>((e - lo) / (hi - lo) * n_bins);
    b = std::clamp(b, 0, n_bins - 1);
    ++dist.bin_counts[static_cast<std::size_t>(b)];
  }
  for (double band : bands)
    dist.share_within.emplace_back(band, share_within_band(dist.errors, band));
  return dist;
}

RollingForecast rolling_forecast(const EnsembleModel& model,
                                 const std::vector<double>& closes_usd,
                                 const std::vector<std::size_t>& start_indices,
                                 int horizon) {
  if (model.feature_spec.dimension() != 1)
    throw ConfigError("rolling_forecast needs a price-only model (D = 1)");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (start_indices.empty()) throw DataError("rolling_forecast: no windows given");

  const int window = model.learners.front().config().window;
  RollingForecast out;
  out.mean_abs_err.assign(static_cast<std::size_t>(horizon), 0.0);
  out.min_abs_err.assign(static_cast<std::size_t>(horizon),
                         std::numeric_limits<double>::infinity());
  out.max_abs_err.assign(static_cast<std::size_t>(horizon), 0.0);

  for (std::size_t start : start_indices) {
    if (start < static_cast<std::size_t>(window) ||
        start + static_cast<std::size_t>(horizon) > closes_usd.size())
      throw DataError("rolling_forecast: insufficient history for window starting at index " +
                      std::to_string(start));
    // normalized context of the last `window` observed closes
    std::vector<double> context;
    for (int r = window; r >= 1; --r)
      context.push_back(normalize_target(closes_usd[start - static_cast<std::size_t>(r)],
                                         model.stats));

    for (int h = 1; h <= horizon; ++h) {
      Eigen::MatrixXd x(window, 1);
      for (int r = 0; r < window; ++r)
        x(r, 0) = context[context.size() - static_cast<std::size_t>(window - r)];
      const double pred_norm = predict_ensemble_normalized(model, x);
      const double pred_usd = denormalize_target(pred_norm, model.stats);
      const double actual = closes_usd[start + static_cast<std::size_t>(h - 1)];
      const double err = std::abs(pred_usd - actual);
      const std::size_t idx = static_cast<std::size_t>(h - 1);
      out.mean_abs_err[idx] += err;
      out.min_abs_err[idx] = std::min(out.min_abs_err[idx], err);
      out.max_abs_err[idx] = std::max(out.max_abs_err[idx], err);
      context.push_back(pred_norm);  // the prediction feeds the next step
    }
  }
  for (double& v : out.mean_abs_err) v /= static_cast<double>(start_indices.size());
  return out;
}

namespace {

std::vector<double> actuals_usd(const Dataset& samples, const NormalizationStats& stats) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(denormalize_target(s.y, stats));
  return out;
}

}  // namespace

ComparisonTable compare_models(const DailySeries& table,
                               const std::vector<std::string>& combinations,
                               const std::vector<std::string>& kinds,
                               const LearnerConfig& base_config, int rounds,
                               const std::array<double, 3>& split_ratios,
                               std::uint64_t seed, int window) {
  ComparisonTable out;
  const SplitSpans spans = chronological_split(table.size(), split_ratios);

  for (const auto& combination : combinations) {
    for (const auto& kind : kinds) {
      ComparisonCell cell;
      cell.combination = combination;
      cell.kind = kind;
      try {
        if (kind != "single_learner" && kind != "ensemble")
          throw ConfigError("unknown model kind '" + kind + "'");
        const FeatureSpec spec = select_modalities(combination);
        const NormalizationStats stats = fit_normalization(table, spec, spans.train);
        LearnerConfig cfg = base_config;
        cfg.input_dim = spec.dimension();
        cfg.window = window;

        const Dataset train = build_windows(table, spec, stats, spans.train, window);
        const Dataset val = build_windows(table, spec, stats, spans.val, window);
        const Dataset test = build_windows(table, spec, stats, spans.test, window);

        EnsembleModel model;
        if (kind == "ensemble") {
          model = train_ensemble(train, val, rounds, cfg, spec, stats, seed);
        } else {
          cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(SeedStream::kLearnerInit), 0);
          model.learners.push_back(train_learner(train, val, cfg));
          model.weights = {1.0};
          model.feature_spec = spec;
          model.stats = stats;
        }

        const std::array<std::pair<const char*, const Dataset*>, 3> splits = {
            {{"train", &train}, {"val", &val}, {"test", &test}}};
        for (const auto& [name, data] : splits)
          cell.reports.push_back(compute_metrics(predict_ensemble_all_usd(model, *data),
                                                 actuals_usd(*data, stats), name));
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

void write_metrics_csv(const std::string& path, const ComparisonTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& cell : table.cells) {
    if (!cell.error.empty()) {
      rows.push_back({cell.combination, cell.kind, "error", "0", "", "", ""});
      continue;
    }
    for (const auto& r : cell.reports)
      rows.push_back({cell.combination, cell.kind, r.split, std::to_string(r.n),
                      format_double(r.rmse), format_double(r.mse),
                      format_double(r.mae)});
  }
  write_csv(path, {"combination", "kind", "split", "n", "rmse", "mse", "mae"}, rows);
}

std::string format_comparison_text(const ComparisonTable& table) {
  struct RowDef {
    const char* label;
    const char* split;
    double MetricsReport::*field;
  };
  static const RowDef row_defs[] = {
      {"Training RMSE ($)", "train", &MetricsReport::rmse},
      {"Training MAE ($)", "train", &MetricsReport::mae},
      {"Validation RMSE ($)", "val", &MetricsReport::rmse},
      {"Validation MAE ($)", "val", &MetricsReport::mae},
      {"Testing RMSE ($)", "test", &MetricsReport::rmse},
      {"Testing MSE ($^2)", "test", &MetricsReport::mse},
      {"Testing MAE ($)", "test", &MetricsReport::mae},
  };

  std::ostringstream os;
  os << "metric";
  for (const auto& cell : table.cells)
    os << '\t' << cell.combination << '/' << cell.kind;
  os << '\n';
  for (const auto& def : row_defs) {
    os << def.label;
    for (const auto& cell : table.cells) {
      os << '\t';
      if (!cell.error.empty()) {
        os << "error";
        continue;
      }
      for (const auto& r : cell.reports)
        if (r.split == def.split) os << format_double(r.*def.field);
    }
    os << '\n';
  }
  for (const auto& cell : table.cells)
    if (!cell.error.empty())
      os << "# " << cell.combination << '/' << cell.kind << " failed: " << cell.error
         << '\n';
  return os.str();
}

}  // namespace coincast
