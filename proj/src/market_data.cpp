#include "coincast/market_data.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

namespace coincast {

namespace {

void require_nonneg(double v, const char* field, Date date) {
  if (v < 0)
    throw DataError(std::string(field) + " < 0 on " + format_date(date));
}

}  // namespace

const std::vector<std::string>& TradingRecord::schema() {
  static const std::vector<std::string> s = {
      "date",        "open",     "high",           "low",
      "close",       "volume_coin", "volume_usd",  "weighted_price",
      "avg_fees",    "transactions"};
  return s;
}

TradingRecord TradingRecord::from_fields(const std::vector<std::string>& f) {
  TradingRecord r;
  r.date = parse_date(f[0]);
  r.open = parse_double(f[1]);
  r.high = parse_double(f[2]);
  r.low = parse_double(f[3]);
  r.close = parse_double(f[4]);
  r.volume_coin = parse_double(f[5]);
  r.volume_usd = parse_double(f[6]);
  r.weighted_price = parse_double(f[7]);
  r.avg_fees = parse_double(f[8]);
  r.transactions = parse_int(f[9]);
  r.validate();
  return r;
}

std::vector<std::string> TradingRecord::to_fields() const {
  return {format_date(date),          format_double(open),
          format_double(high),        format_double(low),
          format_double(close),       format_double(volume_coin),
          format_double(volume_usd),  format_double(weighted_price),
          format_double(avg_fees),    std::to_string(transactions)};
}

void TradingRecord::validate() const {
  if (high < std::max(open, close))
    throw DataError("high < max(open, close) on " + format_date(date));
  if (low > std::min(open, close))
    throw DataError("low > min(open, close) on " + format_date(date));
  require_nonneg(open, "open", date);
  require_nonneg(high, "high", date);
  require_nonneg(low, "low", date);
  require_nonneg(close, "close", date);
  require_nonneg(volume_coin, "volume_coin", date);
  require_nonneg(volume_usd, "volume_usd", date);
  require_nonneg(weighted_price, "weighted_price", date);
  require_nonneg(avg_fees, "avg_fees", date);
  if (transactions < 0)
    throw DataError("transactions < 0 on " + format_date(date));
}

const std::vector<std::string>& BlockchainRecord::schema() {
  static const std::vector<std::string> s = {
      "date",       "hash_rate",          "block_size",
      "block_time", "network_difficulty", "active_addresses",
      "mining_profitability"};
  return s;
}

BlockchainRecord BlockchainRecord::from_fields(const std::vector<std::string>& f) {
  BlockchainRecord r;
  r.date = parse_date(f[0]);
  r.hash_rate = parse_double(f[1]);
  r.block_size = parse_double(f[2]);
  r.block_time = parse_double(f[3]);
  r.network_difficulty = parse_double(f[4]);
  r.active_addresses = parse_int(f[5]);
  r.mining_profitability = parse_double(f[6]);
  r.validate();
  return r;
}

std::vector<std::string> BlockchainRecord::to_fields() const {
  return {format_date(date),
          format_double(hash_rate),
          format_double(block_size),
          format_double(block_time),
          format_double(network_difficulty),
          std::to_string(active_addresses),
          format_double(mining_profitability)};
}

void BlockchainRecord::validate() const {
  require_nonneg(hash_rate, "hash_rate", date);
  require_nonneg(block_size, "block_size", date);
  require_nonneg(block_time, "block_time", date);
  require_nonneg(network_difficulty, "network_difficulty", date);
  if (active_addresses < 0)
    throw DataError("active_addresses < 0 on " + format_date(date));
  require_nonneg(mining_profitability, "mining_profitability", date);
}

const std::vector<std::string>& SearchRecord::schema() {
  static const std::vector<std::string> s = {"date", "search_volume"};
  return s;
}

SearchRecord SearchRecord::from_fields(const std::vector<std::string>& f) {
  SearchRecord r;
  r.date = parse_date(f[0]);
  r.search_volume = parse_double(f[1]);
  r.validate();
  return r;
}

std::vector<std::string> SearchRecord::to_fields() const {
  return {format_date(date), format_double(search_volume)};
}

void SearchRecord::validate() const {
  require_nonneg(search_volume, "search_volume", date);
}

template <class Record>
std::vector<Record> load_records(const std::string& path) {
  CsvTable table = read_csv(path, Record::schema());
  std::vector<Record> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    try {
      records.push_back(Record::from_fields(table.rows[i]));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(table.line_numbers[i]) + ": " +
                      e.what());
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const Record& a, const Record& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].date == records[i - 1].date)
      throw DataError(path + ": duplicate date " + format_date(records[i].date));
  return records;
}

template <class Record>
void write_records(const std::string& path, const std::vector<Record>& records) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(r.to_fields());
  write_csv(path, Record::schema(), rows);
}

template <class Record>
std::vector<Record> merge_sources(const std::vector<Record>& primary,
                                  const std::vector<std::vector<Record>>& fillers) {
  bool any = !primary.empty();
  for (const auto& f : fillers) any = any || !f.empty();
  if (!any) throw DataError("merge_sources: all sources empty");

  // Precedence is caller order: primary first, then fillers in order.
  std::map<std::int64_t, Record> merged;
  auto absorb = [&merged](const std::vector<Record>& source) {
    for (const auto& r : source) merged.emplace(r.date.days, r);
  };
  absorb(primary);
  for (const auto& f : fillers) absorb(f);

  const Date first{merged.begin()->first};
  const Date last{merged.rbegin()->first};
  std::vector<Date> gaps;
  std::vector<Record> out;
  out.reserve(static_cast<std::size_t>(last - first) + 1);
  for (Date d = first; d <= last; d = d.next()) {
    auto it = merged.find(d.days);
    if (it == merged.end())
      gaps.push_back(d);
    else
      out.push_back(it->second);
  }
  if (!gaps.empty()) {
    std::string report = "merge_sources: unresolved gaps:";
    for (Date g : gaps) report += " " + format_date(g);
    throw DataError(report);
  }
  return out;
}

template <class Record>
DailySeries to_daily_series(const std::vector<Record>& records) {
  if (records.empty()) throw DataError("to_daily_series: empty record list");
  DailySeries series;
  series.start_date = records.front().date;
  const auto& header = Record::schema();
  series.channels.assign(header.begin() + 1, header.end());
  series.values.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].date != series.start_date + static_cast<std::int64_t>(i))
      throw DataError("to_daily_series: dates not consecutive at " +
                      format_date(records[i].date));
    const auto fields = records[i].to_fields();
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c)
      row.push_back(parse_double(fields[c]));
    series.values.push_back(std::move(row));
  }
  return series;
}

template <class Record>
std::string fetch_cached(SourceClient<Record>& client, Date start, Date end,
                         const std::string& cache_dir) {
  if (start > end)
    throw ConfigError("fetch_cached: empty span, start " + format_date(start) +
                      " after end " + format_date(end));
  namespace fs = std::filesystem;
  fs::create_directories(cache_dir);
  const std::string path = (fs::path(cache_dir) /
                            (client.name() + "_" + format_date(start) + "_" +
                             format_date(end) + ".csv"))
                               .string();
  if (fs::exists(path)) return path;

  std::vector<Record> rows;
  try {
    rows = client.get_range(start, end);
  } catch (const std::exception& e) {
    throw DataError("source '" + client.name() + "' failed: " + e.what());
  }
  const std::size_t span = static_cast<std::size_t>(end - start) + 1;
  if (rows.size() != span)
    throw DataError("source '" + client.name() + "' returned " +
                    std::to_string(rows.size()) + " of " + std::to_string(span) +
                    " requested days");
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].date != start + static_cast<std::int64_t>(i))
      throw DataError("source '" + client.name() + "' returned a partial span");
  write_records(path, rows);
  return path;
}

#define COINCAST_INSTANTIATE(Record)                                             \
  template std::vector<Record> load_records<Record>(const std::string&);         \
  template void write_records<Record>(const std::string&,                        \
                                      const std::vector<Record>&);               \
  template std::vector<Record> merge_sources<Record>(                            \
      const std::vector<Record>&, const std::vector<std::vector<Record>>&);      \
  template DailySeries to_daily_series<Record>(const std::vector<Record>&);      \
  template std::string fetch_cached<Record>(SourceClient<Record>&, Date, Date,   \
                                            const std::string&);

COINCAST_INSTANTIATE(TradingRecord)
COINCAST_INSTANTIATE(BlockchainRecord)
COINCAST_INSTANTIATE(SearchRecord)

#undef COINCAST_INSTANTIATE

}  // namespace coincast
