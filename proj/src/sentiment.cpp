#include "coincast/sentiment.hpp"

#include <algorithm>
#include <cmath>

#include "coincast/csv.hpp"
#include "coincast/errors.hpp"

namespace coincast {

namespace {

void check_score(double s) {
  if (!(s >= -1.0 && s <= 1.0))
    throw DataError("sentiment score " + format_double(s) + " outside [-1, +1]");
}

// 'YYYY-MM-DDTHH:MM:SSZ' -> UTC seconds
std::int64_t parse_timestamp(const std::string& text) {
  if (text.size() != 20 || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z')
    throw DataError("malformed timestamp '" + text + "'");
  const Date day = parse_date(text.substr(0, 10));
  const long long h = parse_int(text.substr(11, 2));
  const long long m = parse_int(text.substr(14, 2));
  const long long s = parse_int(text.substr(17, 2));
  if (h > 23 || m > 59 || s > 59)
    throw DataError("timestamp '" + text + "' out of range");
  return day.days * 86400 + h * 3600 + m * 60 + s;
}

std::string format_timestamp(std::int64_t ts) {
  std::int64_t days = ts / 86400;
  std::int64_t rem = ts % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02lld:%02lld:%02lldZ", rem / 3600,
                (rem / 60) % 60, rem % 60);
  return format_date(Date{days}) + buf;
}

}  // namespace

Date Tweet::day() const {
  std::int64_t d = timestamp / 86400;
  if (timestamp < 0 && timestamp % 86400 != 0) --d;
  return Date{d};
}

void Tweet::validate() const {
  check_score(score_a);
  if (score_b) check_score(*score_b);
  if (likes < 0 || comments < 0 || retweets < 0 || quotes < 0)
    throw DataError("negative engagement count");
}

double combine_scores(double score_a, std::optional<double> score_b) {
  check_score(score_a);
  if (!score_b) return score_a;
  check_score(*score_b);
  return 0.5 * (score_a + *score_b);
}

int classify_sentiment(double score) {
  check_score(score);
  // nine equal bins of width 2/9 over [-1, +1]
  const int idx = static_cast<int>(std::floor((score + 1.0) * 9.0 / 2.0));
  return std::min(idx, 8);
}

double engagement_weight(const Tweet& tweet) {
  tweet.validate();
  if (tweet.likes == 0 || tweet.comments == 0 || tweet.retweets == 0 ||
      tweet.quotes == 0)
    return 0.0;
  const double inv = 1.0 / static_cast<double>(tweet.likes) +
                     1.0 / static_cast<double>(tweet.comments) +
                     1.0 / static_cast<double>(tweet.retweets) +
                     1.0 / static_cast<double>(tweet.quotes);
  return 4.0 / inv;
}

DailySentiment daily_aggregate(Date day, const std::vector<Tweet>& tweets) {
  DailySentiment out;
  out.date = day;
  out.tweet_volume = static_cast<long long>(tweets.size());
  if (tweets.empty()) return out;  // neutral day

  std::vector<double> scores, weights;
  scores.reserve(tweets.size());
  weights.reserve(tweets.size());
  for (const auto& t : tweets) {
    if (t.day() != day)
      throw DataError("tweet timestamp outside day " + format_date(day));
    scores.push_back(combine_scores(t.score_a, t.score_b));
    weights.push_back(engagement_weight(t));
  }

  const auto [min_it, max_it] = std::minmax_element(weights.begin(), weights.end());
  const double lo = *min_it, hi = *max_it;
  double num = 0, den = 0;
  if (hi > lo) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double norm = (weights[i] - lo) / (hi - lo);
      num += norm * scores[i];
      den += norm;
    }
  }
  if (den > 0) {
    out.weighted_sentiment = num / den;
  } else {
    // all weights equal (possibly all zero): unweighted mean
    double sum = 0;
    for (double s : scores) sum += s;
    out.weighted_sentiment = sum / static_cast<double>(scores.size());
  }
  return out;
}

std::vector<DailySentiment> aggregate_range(const std::vector<Tweet>& tweets,
                                            Date start, Date end) {
  if (start > end) throw ConfigError("aggregate_range: start after end");
  const std::size_t n_days = static_cast<std::size_t>(end - start) + 1;
  std::vector<std::vector<Tweet>> buckets(n_days);
  for (const auto& t : tweets) {
    const Date d = t.day();
    if (d < start || d > end) continue;
    buckets[static_cast<std::size_t>(d - start)].push_back(t);
  }
  std::vector<DailySentiment> out;
  out.reserve(n_days);
  for (std::size_t i = 0; i < n_days; ++i)
    out.push_back(daily_aggregate(start + static_cast<std::int64_t>(i), buckets[i]));
  return out;
}

std::vector<Tweet> load_tweets(const std::string& path) {
  static const std::vector<std::string> header = {
      "timestamp", "score_a", "score_b", "likes", "comments", "retweets", "quotes"};
  CsvTable table = read_csv(path, header);
  std::vector<Tweet> tweets;
  tweets.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    try {
      Tweet t;
      t.timestamp = parse_timestamp(f[0]);
      t.score_a = parse_double(f[1]);
      if (!f[2].empty()) t.score_b = parse_double(f[2]);
      t.likes = parse_int(f[3]);
      t.comments = parse_int(f[4]);
      t.retweets = parse_int(f[5]);
      t.quotes = parse_int(f[6]);
      t.validate();
      tweets.push_back(t);
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(table.line_numbers[i]) + ": " +
                      e.what());
    }
  }
  return tweets;
}

void write_daily_sentiment(const std::string& path,
                           const std::vector<DailySentiment>& days) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(days.size());
  for (const auto& d : days)
    rows.push_back({format_date(d.date), format_double(d.weighted_sentiment),
                    std::to_string(d.tweet_volume)});
  write_csv(path, {"date", "weighted_sentiment", "tweet_volume"}, rows);
}

std::vector<DailySentiment> load_daily_sentiment(const std::string& path) {
  CsvTable table = read_csv(path, {"date", "weighted_sentiment", "tweet_volume"});
  std::vector<DailySentiment> out;
  out.reserve(table.rows.size());
  for (const auto& f : table.rows) {
    DailySentiment d;
    d.date = parse_date(f[0]);
    d.weighted_sentiment = parse_double(f[1]);
    d.tweet_volume = parse_int(f[2]);
    out.push_back(d);
  }
  return out;
}

// Round-trip helper used by tests and tooling.
std::string tweet_timestamp_text(std::int64_t ts) { return format_timestamp(ts); }

}  // namespace coincast
