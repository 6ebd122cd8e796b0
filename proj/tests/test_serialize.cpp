#include <doctest.h>

#include <filesystem>

#include "coincast/errors.hpp"
#include "coincast/serialize.hpp"
#include "test_util.hpp"

using namespace coincast;

namespace {

LearnerConfig tiny_config() {
  LearnerConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden = 5;
  cfg.fc1 = 4;
  cfg.epochs = 3;
  cfg.learning_rate = 0.01;
  cfg.seed = 8;
  return cfg;
}

}  // namespace

TEST_CASE("parameter files round-trip bit for bit") {
  testutil::TempDir dir("params");
  const LearnerConfig cfg = tiny_config();
  const LstmParams params = init_params(cfg);
  const std::string base = dir.file("learner_00");
  save_params(base, params);
  CHECK(std::filesystem::exists(base + ".manifest"));
  CHECK(std::filesystem::exists(base + ".bin"));

  const LstmParams back = load_params(base, cfg);
  for (std::size_t t = 0; t < 7; ++t)
    CHECK(*params.tensors()[t] == *back.tensors()[t]);

  // shape mismatch is rejected
  LearnerConfig other = cfg;
  other.hidden = 6;
  CHECK_THROWS_AS(load_params(base, other), DataError);

  // tampered manifest version is rejected
  std::string manifest = testutil::read_text(base + ".manifest");
  const auto pos = manifest.find("format_version 1");
  REQUIRE(pos != std::string::npos);
  manifest.replace(pos, 16, "format_version 9");
  testutil::write_text(base + ".manifest", manifest);
  CHECK_THROWS_AS(load_params(base, cfg), DataError);

  CHECK_THROWS_AS(load_params(dir.file("absent"), cfg), DataError);
}

TEST_CASE("bundle round-trip preserves the whole model") {
  testutil::TempDir dir("bundle");
  const DailySeries table = testutil::make_table(60);
  const FeatureSpec spec = select_modalities("trading");
  const SplitSpans spans = chronological_split(60, {0.70, 0.15, 0.15});
  const NormalizationStats stats = fit_normalization(table, spec, spans.train);
  const Dataset train = build_windows(table, spec, stats, spans.train, 7);
  const Dataset val = build_windows(table, spec, stats, spans.val, 7);

  LearnerConfig cfg = tiny_config();
  cfg.input_dim = spec.dimension();
  const EnsembleModel model = train_ensemble(train, val, 2, cfg, spec, stats, 55);

  const std::string bundle = dir.file("model");
  save_bundle(bundle, model);
  const EnsembleModel back = load_bundle(bundle);

  CHECK(back.rounds() == 2);
  CHECK(back.weights == model.weights);
  CHECK(back.combiner_mode == model.combiner_mode);
  CHECK(back.feature_spec.name == "trading");
  CHECK(back.feature_spec.channels == spec.channels);
  CHECK(back.stats.mins == model.stats.mins);
  CHECK(back.stats.maxs == model.stats.maxs);
  CHECK(back.stats.target_min == model.stats.target_min);
  REQUIRE(back.trace.size() == 2);
  CHECK(back.trace[0].sum_errors == model.trace[0].sum_errors);

  for (int j = 0; j < 2; ++j) {
    const auto& a = model.learners[static_cast<std::size_t>(j)];
    const auto& b = back.learners[static_cast<std::size_t>(j)];
    CHECK(b.config().hidden == a.config().hidden);
    CHECK(b.config().dropout_rate == a.config().dropout_rate);
    for (std::size_t t = 0; t < 7; ++t)
      CHECK(*a.params().tensors()[t] == *b.params().tensors()[t]);
  }

  // identical predictions, bit for bit
  for (std::size_t i = 0; i < train.size(); i += 7)
    CHECK(predict_ensemble(model, train[i].X) == predict_ensemble(back, train[i].X));

  CHECK_THROWS_AS(load_bundle(dir.file("missing")), DataError);
}
