#include "coincast/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "coincast/csv.hpp"
#include "coincast/errors.hpp"
#include "coincast/evaluation.hpp"
#include "coincast/features.hpp"
#include "coincast/fluctuation.hpp"
#include "coincast/market_data.hpp"
#include "coincast/plot.hpp"
#include "coincast/rng.hpp"
#include "coincast/sentiment.hpp"
#include "coincast/serialize.hpp"

namespace coincast::cli {

namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output.dir);
  return (fs::path(cfg.output.dir) / name).string();
}

template <class Record>
std::vector<Record> load_modality(const std::vector<std::string>& paths,
                                  const char* modality) {
  if (paths.empty())
    throw ConfigError(std::string("no input files configured for modality '") +
                      modality + "'");
  for (const auto& p : paths)
    if (!fs::exists(p))
      throw DataError(std::string("missing ") + modality + " file: " + p);
  const std::vector<Record> primary = load_records<Record>(paths[0]);
  std::vector<std::vector<Record>> fillers;
  for (std::size_t i = 1; i < paths.size(); ++i)
    fillers.push_back(load_records<Record>(paths[i]));
  return merge_sources(primary, fillers);
}

// Merged records are gap-free, so span coverage is a bounds check.
template <class Record>
std::vector<Record> slice_span(const std::vector<Record>& records, Date start,
                               Date end, const char* modality) {
  if (records.empty() || records.front().date > start || records.back().date < end)
    throw DataError(std::string(modality) + " sources do not cover " +
                    format_date(start) + ".." + format_date(end));
  const std::size_t offset = static_cast<std::size_t>(start - records.front().date);
  const std::size_t count = static_cast<std::size_t>(end - start) + 1;
  return {records.begin() + static_cast<std::ptrdiff_t>(offset),
          records.begin() + static_cast<std::ptrdiff_t>(offset + count)};
}

struct Pipeline {
  DailySeries table;
  FeatureSpec spec;
  SplitSpans spans;
  NormalizationStats stats;
  Dataset train, val, test;
};

Pipeline build_pipeline(const RunConfig& cfg, const FeatureSpec& spec) {
  Pipeline p;
  p.table = load_feature_table(out_path(cfg, "features.csv"));
  p.spec = spec;
  p.spans = chronological_split(p.table.size(), cfg.features.split);
  p.stats = fit_normalization(p.table, p.spec, p.spans.train);
  p.train = build_windows(p.table, p.spec, p.stats, p.spans.train, cfg.features.window);
  p.val = build_windows(p.table, p.spec, p.stats, p.spans.val, cfg.features.window);
  p.test = build_windows(p.table, p.spec, p.stats, p.spans.test, cfg.features.window);
  return p;
}

LearnerConfig learner_for(const RunConfig& cfg, const FeatureSpec& spec) {
  LearnerConfig lc = cfg.learner;
  lc.input_dim = spec.dimension();
  lc.window = cfg.features.window;
  return lc;
}

std::vector<double> usd_actuals(const Dataset& samples, const NormalizationStats& stats) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(denormalize_target(s.y, stats));
  return out;
}

void write_single_cell_metrics(const std::string& path, const EnsembleModel& model,
                               const Pipeline& p, const std::string& kind,
                               ComparisonTable& table) {
  ComparisonCell cell;
  cell.combination = model.feature_spec.name;
  cell.kind = kind;
  const std::array<std::pair<const char*, const Dataset*>, 3> splits = {
      {{"train", &p.train}, {"val", &p.val}, {"test", &p.test}}};
  for (const auto& [name, data] : splits)
    cell.reports.push_back(compute_metrics(predict_ensemble_all_usd(model, *data),
                                           usd_actuals(*data, model.stats), name));
  table.cells.push_back(std::move(cell));
  write_metrics_csv(path, table);
}

}  // namespace

std::string cmd_prepare(const RunConfig& cfg) {
  const Date start = cfg.data.start, end = cfg.data.end;
  if (start > end) throw ConfigError("data.start is after data.end");

  const auto trading = slice_span(
      load_modality<TradingRecord>(cfg.data.trading, "trading"), start, end, "trading");
  const auto chain = slice_span(
      load_modality<BlockchainRecord>(cfg.data.blockchain, "blockchain"), start, end,
      "blockchain");
  const auto search = slice_span(
      load_modality<SearchRecord>(cfg.data.search, "search"), start, end, "search");

  if (cfg.data.tweets.empty())
    throw ConfigError("no input file configured for modality 'tweets'");
  if (!fs::exists(cfg.data.tweets))
    throw DataError("missing tweets file: " + cfg.data.tweets);
  const auto sentiment = aggregate_range(load_tweets(cfg.data.tweets), start, end);

  DailySeries table;
  table.start_date = start;
  table.channels = canonical_channels();
  const std::size_t n_days = static_cast<std::size_t>(end - start) + 1;
  table.values.reserve(n_days);
  for (std::size_t i = 0; i < n_days; ++i) {
    const auto& t = trading[i];
    const auto& b = chain[i];
    std::vector<double> row = {t.open,
                               t.high,
                               t.low,
                               t.close,
                               t.volume_coin,
                               t.volume_usd,
                               t.weighted_price,
                               t.avg_fees,
                               static_cast<double>(t.transactions),
                               sentiment[i].weighted_sentiment,
                               static_cast<double>(sentiment[i].tweet_volume),
                               b.hash_rate,
                               b.block_size,
                               b.block_time,
                               b.network_difficulty,
                               static_cast<double>(b.active_addresses),
                               b.mining_profitability,
                               search[i].search_volume};
    table.values.push_back(std::move(row));
  }

  const std::string path = out_path(cfg, "features.csv");
  write_feature_table(path, table);

  std::cout << "feature store: " << path << "\n"
            << "days: " << n_days << " (" << format_date(start) << " .. "
            << format_date(end) << ")\n";
  for (std::size_t c = 0; c < table.channels.size(); ++c) {
    double lo = table.values[0][c], hi = lo;
    for (const auto& row : table.values) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    std::cout << "  " << table.channels[c] << ": min " << format_double(lo)
              << ", max " << format_double(hi) << "\n";
  }
  return path;
}

namespace {

void write_training_logs(const RunConfig& cfg, const EnsembleModel& model,
                         const std::string& prefix) {
  std::vector<std::vector<std::string>> trace_rows;
  for (std::size_t j = 0; j < model.trace.size(); ++j)
    trace_rows.push_back({std::to_string(j), format_double(model.trace[j].sum_errors),
                          format_double(model.trace[j].weight),
                          format_double(model.weights[j])});
  write_csv(out_path(cfg, prefix + "_trace.csv"),
            {"round", "sum_errors", "weight_raw", "weight_final"}, trace_rows);

  std::vector<std::vector<std::string>> loss_rows;
  std::vector<std::vector<std::string>> val_rows;
  for (std::size_t j = 0; j < model.learners.size(); ++j) {
    const TrainingLog& log = model.learners[j].log();
    for (std::size_t e = 0; e < log.train_loss.size(); ++e)
      loss_rows.push_back({std::to_string(j), std::to_string(e + 1),
                           format_double(log.train_loss[e])});
    for (const auto& [epoch, mae] : log.val_mae)
      val_rows.push_back({std::to_string(j), std::to_string(epoch), format_double(mae)});
  }
  write_csv(out_path(cfg, prefix + "_losses.csv"), {"round", "epoch", "train_loss"},
            loss_rows);
  write_csv(out_path(cfg, prefix + "_val_mae.csv"), {"round", "epoch", "val_mae"},
            val_rows);
}

}  // namespace

std::string cmd_train(const RunConfig& cfg) {
  const FeatureSpec spec = select_modalities(cfg.features.combination);
  const Pipeline p = build_pipeline(cfg, spec);

  const EnsembleModel model =
      train_ensemble(p.train, p.val, cfg.ensemble.rounds, learner_for(cfg, spec),
                     p.spec, p.stats, cfg.seed, cfg.ensemble.combiner_mode);
  const std::string bundle_dir = out_path(cfg, "bundle");
  save_bundle(bundle_dir, model);
  write_training_logs(cfg, model, "training");
  std::cout << "bundle: " << bundle_dir << " (" << model.rounds() << " learners)\n";

  if (cfg.fluctuation.enabled) {
    for (const VarietySpec& vs : build_varieties()) {
      const FeatureSpec vspec = select_modalities(vs.combination);
      const NormalizationStats vstats = fit_normalization(p.table, vspec, p.spans.train);
      const Dataset vtrain =
          build_windows(p.table, vspec, vstats, p.spans.train, cfg.features.window);
      const Dataset vval =
          build_windows(p.table, vspec, vstats, p.spans.val, cfg.features.window);

      LearnerConfig vcfg = learner_for(cfg, vspec);
      vcfg.dropout_site = vs.dropout_site;
      vcfg.dropout_rate = vs.dropout_rate;
      try {
        const EnsembleModel vmodel = train_ensemble(
            vtrain, vval, cfg.ensemble.rounds, vcfg, vspec, vstats,
            mix_seed(cfg.seed, static_cast<std::uint64_t>(SeedStream::kVariety),
                     static_cast<std::uint64_t>(vs.id)),
            cfg.ensemble.combiner_mode);
        const std::string vdir =
            (fs::path(out_path(cfg, "varieties")) / vs.label()).string();
        save_bundle(vdir, vmodel);
        std::cout << "variety " << vs.label() << ": " << vdir << "\n";
      } catch (const std::exception& e) {
        throw TrainError("variety " + vs.label() + ": " + e.what());
      }
    }
  }
  return bundle_dir;
}

void cmd_evaluate(const RunConfig& cfg, const std::string& bundle_dir) {
  const EnsembleModel model = load_bundle(bundle_dir);

  Pipeline p;
  p.table = load_feature_table(out_path(cfg, "features.csv"));
  p.spec = model.feature_spec;
  p.spans = chronological_split(p.table.size(), cfg.features.split);
  // the bundle's fitted stats are authoritative; the table only supplies rows
  p.stats = model.stats;
  p.train = build_windows(p.table, p.spec, p.stats, p.spans.train, cfg.features.window);
  p.val = build_windows(p.table, p.spec, p.stats, p.spans.val, cfg.features.window);
  p.test = build_windows(p.table, p.spec, p.stats, p.spans.test, cfg.features.window);

  ComparisonTable table;
  write_single_cell_metrics(out_path(cfg, "metrics.csv"), model, p, "ensemble", table);

  // forecast-vs-actual over the start of the test split
  int window_days = cfg.evaluate.plot_window;
  if (static_cast<std::size_t>(window_days) > p.test.size()) {
    std::cerr << "warning: plot window of " << window_days
              << " days clipped to the " << p.test.size() << "-day test split\n";
    window_days = static_cast<int>(p.test.size());
  }
  const std::vector<double> predictions = predict_ensemble_all_usd(model, p.test);
  const std::vector<double> actuals = usd_actuals(p.test, model.stats);

  PlotSeries actual_series{"actual", "#1f77b4", {}, {}};
  PlotSeries ensemble_series{"ensemble", "#2ca02c", {}, {}};
  for (int i = 0; i < window_days; ++i) {
    actual_series.x.push_back(i);
    actual_series.y.push_back(actuals[static_cast<std::size_t>(i)]);
    ensemble_series.x.push_back(i);
    ensemble_series.y.push_back(predictions[static_cast<std::size_t>(i)]);
  }
  std::vector<PlotSeries> series = {actual_series, ensemble_series};

  if (cfg.evaluate.include_single) {
    LearnerConfig lc = learner_for(cfg, model.feature_spec);
    lc.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(SeedStream::kLearnerInit), 0);
    EnsembleModel single;
    single.learners.push_back(train_learner(p.train, p.val, lc));
    single.weights = {1.0};
    single.feature_spec = model.feature_spec;
    single.stats = model.stats;
    const std::vector<double> single_preds = predict_ensemble_all_usd(single, p.test);
    PlotSeries single_series{"single", "#d62728", {}, {}};
    for (int i = 0; i < window_days; ++i) {
      single_series.x.push_back(i);
      single_series.y.push_back(single_preds[static_cast<std::size_t>(i)]);
    }
    series.push_back(std::move(single_series));
    write_single_cell_metrics(out_path(cfg, "metrics.csv"), single, p,
                              "single_learner", table);
  }
  write_line_chart(out_path(cfg, "forecast_vs_actual"),
                   "test forecast vs actual, usd", series);

  const ErrorDistribution dist =
      error_distribution(predictions, actuals, cfg.evaluate.bands);
  write_histogram(out_path(cfg, "mae_hist"), "test error distribution, usd",
                  dist.bin_edges, dist.bin_counts);
  std::vector<std::vector<std::string>> share_rows;
  for (const auto& [band, share] : dist.share_within)
    share_rows.push_back({format_double(band), format_double(share)});
  write_csv(out_path(cfg, "error_shares.csv"), {"band_usd", "share_within"}, share_rows);
}

void cmd_fluctuation(const RunConfig& cfg, const std::string& date_text) {
  const Date date = parse_date(date_text);
  const DailySeries table = load_feature_table(out_path(cfg, "features.csv"));
  const EnsembleModel point_model = load_bundle(out_path(cfg, "bundle"));

  std::vector<EnsembleModel> varieties;
  for (const VarietySpec& vs : build_varieties()) {
    const std::string vdir = (fs::path(out_path(cfg, "varieties")) / vs.label()).string();
    if (!fs::exists(vdir))
      throw DataError("missing variety bundle " + vdir +
                      " (train with fluctuation.enabled = true)");
    varieties.push_back(load_bundle(vdir));
  }

  const DistributionForecast fc = forecast_with_distribution(
      point_model, varieties, table, date, cfg.features.window);

  std::vector<std::string> header = {"date", "point_forecast_usd", "mu_usd",
                                     "sigma2_usd2"};
  std::vector<std::string> row = {format_date(fc.date),
                                  format_double(fc.point_forecast_usd),
                                  format_double(fc.distribution.mu),
                                  format_double(fc.distribution.sigma2)};
  for (std::size_t i = 0; i < fc.distribution.outputs.size(); ++i) {
    header.push_back("o_" + std::to_string(i + 1));
    row.push_back(format_double(fc.distribution.outputs[i]));
  }
  write_csv(out_path(cfg, "fluctuation_" + date_text + ".csv"), header, {row});
  write_density_plot(out_path(cfg, "fluctuation_" + date_text),
                     "predicted price distribution, " + date_text,
                     fc.distribution.mu, fc.distribution.sigma2);
  std::cout << date_text << ": point " << format_double(fc.point_forecast_usd)
            << ", mu " << format_double(fc.distribution.mu) << ", sigma2 "
            << format_double(fc.distribution.sigma2) << "\n";
}

void cmd_longterm(const RunConfig& cfg, const std::string& bundle_dir) {
  const EnsembleModel model = load_bundle(bundle_dir);
  if (model.feature_spec.dimension() != 1)
    throw ConfigError("longterm needs a price-only bundle (combination 'price')");

  const DailySeries table = load_feature_table(out_path(cfg, "features.csv"));
  const SplitSpans spans = chronological_split(table.size(), cfg.features.split);
  const std::size_t close_col = channel_index(table, "close");
  std::vector<double> closes;
  closes.reserve(table.size());
  for (const auto& row : table.values) closes.push_back(row[close_col]);

  const int window = cfg.features.window;
  const int horizon = cfg.longterm.horizon;
  const std::size_t first = std::max<std::size_t>(spans.test.offset,
                                                  static_cast<std::size_t>(window));
  if (spans.test.offset + spans.test.count < static_cast<std::size_t>(horizon) ||
      first + static_cast<std::size_t>(horizon) >
          spans.test.offset + spans.test.count)
    throw DataError("test split too short for a " + std::to_string(horizon) +
                    "-day roll-forward");
  const std::size_t last = spans.test.offset + spans.test.count -
                           static_cast<std::size_t>(horizon);

  std::vector<std::size_t> starts;
  const std::size_t want = static_cast<std::size_t>(std::max(1, cfg.longterm.windows));
  if (want == 1 || last <= first) {
    starts.push_back(first);
  } else {
    const std::size_t n = std::min(want, last - first + 1);
    for (std::size_t i = 0; i < n; ++i)
      starts.push_back(first + i * (last - first) / (n - 1));
  }

  const RollingForecast rf = rolling_forecast(model, closes, starts, horizon);

  std::vector<std::vector<std::string>> rows;
  PlotSeries mean_series{"mean abs err", "#d62728", {}, {}};
  PlotBand band{"#1f77b4", {}, {}, {}};
  for (int h = 1; h <= horizon; ++h) {
    const std::size_t i = static_cast<std::size_t>(h - 1);
    rows.push_back({std::to_string(h), format_double(rf.mean_abs_err[i]),
                    format_double(rf.min_abs_err[i]), format_double(rf.max_abs_err[i])});
    mean_series.x.push_back(h);
    mean_series.y.push_back(rf.mean_abs_err[i]);
    band.x.push_back(h);
    band.lo.push_back(rf.min_abs_err[i]);
    band.hi.push_back(rf.max_abs_err[i]);
  }
  write_csv(out_path(cfg, "rolling.csv"),
            {"horizon", "mean_abs_err", "min_abs_err", "max_abs_err"}, rows);
  write_line_chart(out_path(cfg, "rolling"), "roll-forward abs error by horizon, usd",
                   {mean_series}, &band);
}

void cmd_compare(const RunConfig& cfg) {
  const DailySeries table = load_feature_table(out_path(cfg, "features.csv"));
  LearnerConfig lc = cfg.learner;
  lc.window = cfg.features.window;
  const ComparisonTable result =
      compare_models(table, cfg.compare.combinations, cfg.compare.kinds, lc,
                     cfg.ensemble.rounds, cfg.features.split, cfg.seed,
                     cfg.features.window);
  write_metrics_csv(out_path(cfg, "metrics.csv"), result);
  const std::string text = format_comparison_text(result);
  std::ofstream txt(out_path(cfg, "comparison.txt"), std::ios::binary);
  txt << text;
  std::cout << text;
}

}  // namespace coincast::cli
