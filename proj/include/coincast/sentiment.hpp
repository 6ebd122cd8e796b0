#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coincast/dates.hpp"

namespace coincast {

// One scored tweet. Scores come from upstream sentiment tools; this module
// never runs a model itself.
struct Tweet {
  std::int64_t timestamp = 0;  // UTC seconds since epoch
  double score_a = 0;
  std::optional<double> score_b;
  long long likes = 0, comments = 0, retweets = 0, quotes = 0;

  Date day() const;
  void validate() const;
};

struct DailySentiment {
  Date date;
  double weighted_sentiment = 0;  // in [-1, +1]
  long long tweet_volume = 0;
};

// Mean of the scores that are present; score_a alone if score_b is absent.
double combine_scores(double score_a, std::optional<double> score_b);

// Nine equal-width ordinal classes over [-1, +1], 0 = extremely negative,
// 8 = extremely positive; the last bin includes its right edge.
int classify_sentiment(double score);

// Harmonic mean of likes, comments, retweets and quotes; 0 whenever any
// count is 0 (limit convention).
double engagement_weight(const Tweet& tweet);

// Min-max normalizes the day's raw weights, then takes the weight-averaged
// combined score. Degenerate weights fall back to the unweighted mean; a
// day with no tweets is neutral (0.0, volume 0).
DailySentiment daily_aggregate(Date day, const std::vector<Tweet>& tweets);

// Buckets tweets by UTC day and aggregates each day in [start, end].
std::vector<DailySentiment> aggregate_range(const std::vector<Tweet>& tweets,
                                            Date start, Date end);

// tweets.csv: timestamp,score_a,score_b,likes,comments,retweets,quotes
// (timestamp ISO-8601 'YYYY-MM-DDTHH:MM:SSZ'; score_b may be empty)
std::vector<Tweet> load_tweets(const std::string& path);

// sentiment_daily.csv: date,weighted_sentiment,tweet_volume
void write_daily_sentiment(const std::string& path,
                           const std::vector<DailySentiment>& days);
std::vector<DailySentiment> load_daily_sentiment(const std::string& path);

// UTC seconds -> 'YYYY-MM-DDTHH:MM:SSZ' (for fixture generation).
std::string tweet_timestamp_text(std::int64_t ts);

}  // namespace coincast
