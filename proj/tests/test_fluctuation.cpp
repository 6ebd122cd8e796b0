#include <doctest.h>

#include <cmath>
#include <set>

#include "coincast/errors.hpp"
#include "coincast/fluctuation.hpp"
#include "coincast/rng.hpp"
#include "test_util.hpp"

using namespace coincast;

TEST_CASE("gaussian mle on a tiny sample") {
  double mu = 0, sigma2 = 0;
  estimate_distribution({1.0, 2.0, 3.0}, mu, sigma2);
  CHECK(mu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sigma2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  estimate_distribution({5.0, 5.0, 5.0, 5.0}, mu, sigma2);
  CHECK(mu == 5.0);
  CHECK(sigma2 == 0.0);

  CHECK_THROWS_AS(estimate_distribution({}, mu, sigma2), DataError);
}

namespace {

double log_likelihood(const std::vector<double>& x, double mu, double sigma2) {
  double acc = 0;
  for (double v : x)
    acc += -0.5 * std::log(2 * 3.14159265358979323846 * sigma2) -
           (v - mu) * (v - mu) / (2 * sigma2);
  return acc;
}

}  // namespace

TEST_CASE("mle estimate maximizes the likelihood over a parameter grid") {
  auto rng = make_rng(17, SeedStream::kSynthetic, 30);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(10);
    for (auto& v : x) v = uniform_range(rng, 50.0, 150.0);
    double mu = 0, sigma2 = 0;
    estimate_distribution(x, mu, sigma2);
    const double best = log_likelihood(x, mu, sigma2);
    for (double dm = -0.5; dm <= 0.5; dm += 1e-2)
      for (double ds = -0.3; ds <= 0.3; ds += 1e-2) {
        if (sigma2 * (1 + ds) <= 0) continue;
        CHECK(log_likelihood(x, mu + dm, sigma2 * (1 + ds)) <= best + 1e-9);
      }
  }
}

TEST_CASE("mle is shift- and scale-equivariant") {
  auto rng = make_rng(18, SeedStream::kSynthetic, 31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(8), y(8);
    const double shift = uniform_range(rng, -100, 100);
    const double scale = uniform_range(rng, 0.1, 5.0);
    for (std::size_t i = 0; i < 8; ++i) {
      x[i] = uniform_range(rng, -10, 10);
      y[i] = scale * x[i] + shift;
    }
    double mu_x, s2_x, mu_y, s2_y;
    estimate_distribution(x, mu_x, s2_x);
    estimate_distribution(y, mu_y, s2_y);
    CHECK(mu_y == doctest::Approx(scale * mu_x + shift).epsilon(1e-9));
    CHECK(s2_y == doctest::Approx(scale * scale * s2_x).epsilon(1e-9));
  }
}

TEST_CASE("the ten varieties are fixed and distinct") {
  const auto specs = build_varieties();
  REQUIRE(specs.size() == 10);

  // four input varieties, six dropout variants of the all-modality model
  CHECK(specs[0].combination == "trading");
  CHECK(specs[1].combination == "sentiment");
  CHECK(specs[2].combination == "trading+blockchain");
  CHECK(specs[3].combination == "trading+search");
  for (int i = 0; i < 4; ++i) {
    CHECK(specs[static_cast<std::size_t>(i)].kind == VarietyKind::kInputVariety);
    CHECK(specs[static_cast<std::size_t>(i)].dropout_site == DropoutSite::kNone);
  }
  std::set<std::pair<std::string, double>> dropout_pairs;
  for (int i = 4; i < 10; ++i) {
    const auto& s = specs[static_cast<std::size_t>(i)];
    CHECK(s.kind == VarietyKind::kDropoutVariant);
    CHECK(s.combination == "all");
    CHECK(s.dropout_site != DropoutSite::kNone);
    CHECK((s.dropout_rate == 0.1 || s.dropout_rate == 0.2 || s.dropout_rate == 0.35));
    dropout_pairs.insert({dropout_site_name(s.dropout_site), s.dropout_rate});
  }
  CHECK(dropout_pairs.size() == 6);

  std::set<std::string> labels;
  std::set<int> ids;
  for (const auto& s : specs) {
    labels.insert(s.label());
    ids.insert(s.id);
  }
  CHECK(labels.size() == 10);
  CHECK(*ids.begin() == 1);
  CHECK(*ids.rbegin() == 10);
  CHECK(select_modalities(specs[2].combination).dimension() == 15);
}

namespace {

EnsembleModel tiny_model(const DailySeries& table, const std::string& combination,
                         std::uint64_t seed) {
  const FeatureSpec spec = select_modalities(combination);
  const SplitSpans spans = chronological_split(table.size(), {0.70, 0.15, 0.15});
  const NormalizationStats stats = fit_normalization(table, spec, spans.train);
  const Dataset train = build_windows(table, spec, stats, spans.train, 7);
  const Dataset val = build_windows(table, spec, stats, spans.val, 7);
  LearnerConfig cfg;
  cfg.input_dim = spec.dimension();
  cfg.hidden = 4;
  cfg.fc1 = 3;
  cfg.epochs = 5;
  cfg.learning_rate = 0.01;
  return train_ensemble(train, val, 1, cfg, spec, stats, seed);
}

}  // namespace

TEST_CASE("distribution forecast fits the gaussian over the variety outputs") {
  const DailySeries table = testutil::make_table(80);
  const EnsembleModel point = tiny_model(table, "all", 1);

  std::vector<EnsembleModel> varieties;
  std::uint64_t seed = 2;
  for (const auto& spec : build_varieties())
    varieties.push_back(tiny_model(table, spec.combination, seed++));

  const Date date = table.date_at(table.size() - 1);
  const DistributionForecast fc =
      forecast_with_distribution(point, varieties, table, date, 7);
  CHECK(fc.date == date);
  REQUIRE(fc.distribution.outputs.size() == 10);
  double mu, sigma2;
  estimate_distribution(fc.distribution.outputs, mu, sigma2);
  CHECK(fc.distribution.mu == mu);
  CHECK(fc.distribution.sigma2 == sigma2);
  CHECK(std::isfinite(fc.point_forecast_usd));

  // one day past the table end is a legitimate query...
  CHECK_NOTHROW(forecast_with_distribution(point, varieties, table,
                                           table.date_at(table.size() - 1).next(), 7));
  // ...two days past, or inside the first window, is not
  CHECK_THROWS_AS(forecast_with_distribution(point, varieties, table,
                                             table.date_at(table.size() - 1) + 2, 7),
                  DataError);
  CHECK_THROWS_AS(
      forecast_with_distribution(point, varieties, table, table.date_at(3), 7),
      DataError);

  // a wrong variety count is rejected
  varieties.pop_back();
  CHECK_THROWS_AS(forecast_with_distribution(point, varieties, table, date, 7),
                  DataError);
}
