#pragma once

#include <memory>
#include <string>
#include <vector>

#include "coincast/csv.hpp"
#include "coincast/dates.hpp"
#include "coincast/errors.hpp"

namespace coincast {

// One day of exchange trading data.
struct TradingRecord {
  Date date;
  double open = 0, high = 0, low = 0, close = 0;
  double volume_coin = 0, volume_usd = 0;
  double weighted_price = 0;  // carried opaquely in USD
  double avg_fees = 0;
  long long transactions = 0;

  static const std::vector<std::string>& schema();
  static TradingRecord from_fields(const std::vector<std::string>& fields);
  std::vector<std::string> to_fields() const;
  void validate() const;
  bool operator==(const TradingRecord&) const = default;
};

struct BlockchainRecord {
  Date date;
  double hash_rate = 0, block_size = 0, block_time = 0;
  double network_difficulty = 0;
  long long active_addresses = 0;
  double mining_profitability = 0;

  static const std::vector<std::string>& schema();
  static BlockchainRecord from_fields(const std::vector<std::string>& fields);
  std::vector<std::string> to_fields() const;
  void validate() const;
  bool operator==(const BlockchainRecord&) const = default;
};

struct SearchRecord {
  Date date;
  double search_volume = 0;

  static const std::vector<std::string>& schema();
  static SearchRecord from_fields(const std::vector<std::string>& fields);
  std::vector<std::string> to_fields() const;
  void validate() const;
  bool operator==(const SearchRecord&) const = default;
};

// Gap-free per-channel daily values for one modality. Row r holds the
// values for start_date + r.
struct DailySeries {
  Date start_date;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> values;

  Date date_at(std::size_t row) const { return start_date + static_cast<std::int64_t>(row); }
  std::size_t size() const { return values.size(); }
};

// Loads one schema'd CSV, sorted by date, duplicate dates rejected.
template <class Record>
std::vector<Record> load_records(const std::string& path);

template <class Record>
void write_records(const std::string& path, const std::vector<Record>& records);

// Fills each day of the union span from the primary source if present,
// else from the first filler that has it. Days absent everywhere make the
// merge fail with a gap report.
template <class Record>
std::vector<Record> merge_sources(const std::vector<Record>& primary,
                                  const std::vector<std::vector<Record>>& fillers);

template <class Record>
DailySeries to_daily_series(const std::vector<Record>& records);

// Offline stand-in for the upstream data APIs: fetches a span once and
// caches it as a schema'd CSV.
template <class Record>
class SourceClient {
 public:
  virtual ~SourceClient() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Record> get_range(Date start, Date end) = 0;
};

template <class Record>
std::string fetch_cached(SourceClient<Record>& client, Date start, Date end,
                         const std::string& cache_dir);

}  // namespace coincast
