#include "coincast/features.hpp"

#include <algorithm>
#include <cmath>

namespace coincast {

const std::vector<std::string>& canonical_channels() {
  static const std::vector<std::string> channels = {
      "open",           "high",
      "low",            "close",
      "volume_coin",    "volume_usd",
      "weighted_price", "avg_fees",
      "transactions",   "weighted_sentiment",
      "tweet_volume",   "hash_rate",
      "block_size",     "block_time",
      "network_difficulty", "active_addresses",
      "mining_profitability", "search_volume"};
  return channels;
}

namespace {

std::vector<std::string> trading_channels() {
  const auto& all = canonical_channels();
  return {all.begin(), all.begin() + 9};
}

std::vector<std::string> blockchain_channels() {
  const auto& all = canonical_channels();
  return {all.begin() + 11, all.begin() + 17};
}

}  // namespace

FeatureSpec select_modalities(const std::string& id) {
  FeatureSpec spec;
  spec.name = id;
  if (id == "trading") {
    spec.channels = trading_channels();
  } else if (id == "sentiment") {
    spec.channels = {"weighted_sentiment", "tweet_volume"};
  } else if (id == "trading+hash") {
    spec.channels = trading_channels();
    spec.channels.push_back("hash_rate");
  } else if (id == "trading+search") {
    spec.channels = trading_channels();
    spec.channels.push_back("search_volume");
  } else if (id == "trading+blockchain") {
    spec.channels = trading_channels();
    for (const auto& c : blockchain_channels()) spec.channels.push_back(c);
  } else if (id == "trading+sentiment") {
    spec.channels = trading_channels();
    spec.channels.push_back("weighted_sentiment");
    spec.channels.push_back("tweet_volume");
  } else if (id == "all") {
    spec.channels = canonical_channels();
  } else if (id == "price") {
    spec.channels = {"close"};
  } else {
    throw ConfigError("unknown modality combination '" + id + "'");
  }
  return spec;
}

SplitSpans chronological_split(std::size_t n, const std::array<double, 3>& ratios) {
  for (double r : ratios)
    if (!(r > 0)) throw ConfigError("split ratios must be positive");
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("split ratios must sum to 1, got " + format_double(sum));
  if (n < 3) throw ConfigError("series too short to split: " + std::to_string(n));

  SplitSpans s;
  s.train.offset = 0;
  s.train.count = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[0]));
  s.val.offset = s.train.count;
  s.val.count = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[1]));
  s.test.offset = s.val.offset + s.val.count;
  s.test.count = n - s.train.count - s.val.count;
  if (s.train.count == 0 || s.val.count == 0 || s.test.count == 0)
    throw ConfigError("split produced an empty span for n = " + std::to_string(n));
  return s;
}

std::size_t channel_index(const DailySeries& table, const std::string& name) {
  const auto it = std::find(table.channels.begin(), table.channels.end(), name);
  if (it == table.channels.end())
    throw DataError("channel '" + name + "' not present in feature table");
  return static_cast<std::size_t>(it - table.channels.begin());
}

NormalizationStats fit_normalization(const DailySeries& table,
                                     const FeatureSpec& spec, Span train) {
  if (train.count == 0) throw DataError("fit_normalization: empty training span");
  if (train.offset + train.count > table.size())
    throw DataError("fit_normalization: span exceeds table");

  NormalizationStats stats;
  stats.channels = spec.channels;
  for (const auto& name : spec.channels) {
    const std::size_t col = channel_index(table, name);
    double lo = table.values[train.offset][col];
    double hi = lo;
    for (std::size_t r = train.offset; r < train.offset + train.count; ++r) {
      lo = std::min(lo, table.values[r][col]);
      hi = std::max(hi, table.values[r][col]);
    }
    stats.mins.push_back(lo);
    stats.maxs.push_back(hi);
  }
  const std::size_t close_col = channel_index(table, "close");
  double lo = table.values[train.offset][close_col];
  double hi = lo;
  for (std::size_t r = train.offset; r < train.offset + train.count; ++r) {
    lo = std::min(lo, table.values[r][close_col]);
    hi = std::max(hi, table.values[r][close_col]);
  }
  stats.target_min = lo;
  stats.target_max = hi;
  return stats;
}

double normalize_value(double x, double min, double max) {
  if (min == max) return 0.0;
  return (x - min) / (max - min);
}

double denormalize_value(double v, double min, double max) {
  if (min == max) return min;
  return min + v * (max - min);
}

Dataset build_windows(const DailySeries& table, const FeatureSpec& spec,
                      const NormalizationStats& stats, Span span, int window,
                      int horizon) {
  if (window < 1 || horizon < 1)
    throw ConfigError("window and horizon must be >= 1");
  if (span.offset + span.count > table.size())
    throw DataError("build_windows: span exceeds table");
  const std::size_t need = static_cast<std::size_t>(window + horizon);
  if (span.count < need)
    throw DataError("build_windows: span of " + std::to_string(span.count) +
                    " days too short for window " + std::to_string(window) +
                    " + horizon " + std::to_string(horizon));

  std::vector<std::size_t> cols;
  for (const auto& name : spec.channels) cols.push_back(channel_index(table, name));
  const std::size_t close_col = channel_index(table, "close");

  const std::size_t n_samples = span.count - need + 1;
  Dataset samples;
  samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    WindowSample s;
    s.X.resize(window, static_cast<int>(cols.size()));
    const std::size_t base = span.offset + i;
    for (int r = 0; r < window; ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        s.X(r, static_cast<int>(c)) =
            normalize_value(table.values[base + static_cast<std::size_t>(r)][cols[c]],
                            stats.mins[c], stats.maxs[c]);
    const std::size_t target_row = base + static_cast<std::size_t>(window + horizon - 1);
    s.y = normalize_target(table.values[target_row][close_col], stats);
    if (!std::isfinite(s.y)) throw DataError("non-finite target in window build");
    s.date = table.date_at(target_row);
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_feature_table(const std::string& path, const DailySeries& table) {
  std::vector<std::string> header = {"date"};
  for (const auto& c : table.channels) header.push_back(c);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::vector<std::string> row = {format_date(table.date_at(r))};
    for (double v : table.values[r]) row.push_back(format_double(v));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

DailySeries load_feature_table(const std::string& path) {
  std::vector<std::string> header = {"date"};
  for (const auto& c : canonical_channels()) header.push_back(c);
  CsvTable csv = read_csv(path, header);
  if (csv.rows.empty()) throw DataError(path + ": feature table has no rows");

  DailySeries table;
  table.channels = canonical_channels();
  table.start_date = parse_date(csv.rows.front()[0]);
  table.values.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (parse_date(csv.rows[r][0]) != table.start_date + static_cast<std::int64_t>(r))
      throw DataError(path + ":" + std::to_string(csv.line_numbers[r]) +
                      ": dates not consecutive");
    std::vector<double> row;
    row.reserve(table.channels.size());
    for (std::size_t c = 1; c < csv.rows[r].size(); ++c)
      row.push_back(parse_double(csv.rows[r][c]));
    table.values.push_back(std::move(row));
  }
  return table;
}

}  // namespace coincast
