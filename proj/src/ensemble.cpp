#include "coincast/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coincast/errors.hpp"
#include "coincast/rng.hpp"

namespace coincast {

std::string combiner_mode_name(CombinerMode mode) {
  return mode == CombinerMode::kRescaled ? "rescaled" : "literal";
}

CombinerMode combiner_mode_from_name(const std::string& name) {
  if (name == "rescaled") return CombinerMode::kRescaled;
  if (name == "literal") return CombinerMode::kLiteral;
  throw ConfigError("unknown combiner mode '" + name + "'");
}

SamplingWeights init_weights(std::size_t n) {
  if (n == 0) throw TrainError("init_weights: N must be >= 1");
  return SamplingWeights(n, 1.0 / static_cast<double>(n));
}

static void check_weights(const SamplingWeights& s) {
  double sum = 0;
  for (double v : s) {
    if (v < 0) throw TrainError("sampling weight < 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw TrainError("sampling weights sum to " + format_double(sum) + ", not 1");
}

std::vector<double> round_errors(const std::vector<double>& residuals,
                                 const SamplingWeights& s) {
  if (residuals.empty()) throw TrainError("round_errors: empty dataset");
  if (residuals.size() != s.size())
    throw TrainError("round_errors: residual/weight size mismatch");
  check_weights(s);

  double max_abs = 0;
  for (double r : residuals) max_abs = std::max(max_abs, std::abs(r));
  std::vector<double> e(residuals.size(), 0.0);
  if (max_abs == 0) return e;  // perfect fit
  for (std::size_t i = 0; i < residuals.size(); ++i)
    e[i] = s[i] * std::abs(residuals[i]) / max_abs;
  return e;
}

double learner_weight(double sum_errors) {
  const double clamped =
      std::clamp(sum_errors, 1e-10, 0.5 - 1e-10);
  return 0.5 * std::log((1.0 - clamped) / clamped);
}

SamplingWeights update_weights(const SamplingWeights& s,
                               const std::vector<double>& e) {
  if (s.size() != e.size()) throw TrainError("update_weights: size mismatch");
  SamplingWeights out(s.size());
  double z = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = s[i] * std::exp(e[i]);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

std::vector<std::size_t> resample_indices(const SamplingWeights& s,
                                          std::mt19937_64& rng) {
  check_weights(s);
  std::vector<double> cdf(s.size());
  std::partial_sum(s.begin(), s.end(), cdf.begin());
  cdf.back() = 1.0;

  std::vector<std::size_t> indices(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double u = uniform01(rng);
    indices[i] = static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return indices;
}

BoostResult run_boosting(const std::vector<double>& targets, int rounds,
                         std::uint64_t seed, const RoundPredictor& predictor) {
  if (rounds < 1) throw ConfigError("ensemble rounds must be >= 1");
  if (targets.empty()) throw TrainError("run_boosting: empty dataset");

  BoostResult result;
  SamplingWeights s = init_weights(targets.size());
  for (int j = 0; j < rounds; ++j) {
    auto rng = make_rng(seed, SeedStream::kResample, static_cast<std::uint64_t>(j));
    const std::vector<std::size_t> resampled = resample_indices(s, rng);

    std::vector<double> predictions;
    try {
      predictions = predictor(j, resampled);
    } catch (const std::exception& e) {
      throw TrainError("boosting round " + std::to_string(j) + ": " + e.what());
    }
    if (predictions.size() != targets.size())
      throw TrainError("boosting round " + std::to_string(j) +
                       ": prediction count mismatch");

    std::vector<double> residuals(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
      residuals[i] = predictions[i] - targets[i];

    const std::vector<double> e = round_errors(residuals, s);
    const double sum_e = std::accumulate(e.begin(), e.end(), 0.0);
    const double w = learner_weight(sum_e);
    s = update_weights(s, e);
    check_weights(s);

    result.learner_weights.push_back(w);
    result.trace.push_back(RoundTrace{sum_e, w, s});
  }
  return result;
}

EnsembleModel train_ensemble(const Dataset& train, const Dataset& val, int rounds,
                             const LearnerConfig& base_config,
                             const FeatureSpec& spec, const NormalizationStats& stats,
                             std::uint64_t seed, CombinerMode mode) {
  if (train.empty()) throw TrainError("train_ensemble: empty dataset");

  std::vector<double> targets(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) targets[i] = train[i].y;

  EnsembleModel model;
  model.combiner_mode = mode;
  model.feature_spec = spec;
  model.stats = stats;

  const auto predictor = [&](int round, const std::vector<std::size_t>& resampled) {
    Dataset round_data;
    round_data.reserve(resampled.size());
    for (std::size_t idx : resampled) round_data.push_back(train[idx]);

    LearnerConfig cfg = base_config;
    // each round re-trains from scratch with its own named sub-seed
    cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(SeedStream::kLearnerInit),
                        static_cast<std::uint64_t>(round) + 1000);
    model.learners.push_back(train_learner(round_data, val, cfg));
    return model.learners.back().predict_all(train);
  };

  BoostResult boost = run_boosting(targets, rounds, seed, predictor);
  model.trace = boost.trace;
  model.weights = boost.learner_weights;
  if (mode == CombinerMode::kRescaled) {
    const double sum = std::accumulate(model.weights.begin(), model.weights.end(), 0.0);
    if (!(sum > 0)) throw TrainError("train_ensemble: non-positive weight sum");
    const double scale = static_cast<double>(rounds) / sum;
    for (double& w : model.weights) w *= scale;
  }
  return model;
}

double predict_ensemble_normalized(const EnsembleModel& model,
                                   const Eigen::MatrixXd& window) {
  if (model.learners.empty()) throw TrainError("ensemble has no learners");
  double sum = 0;
  for (std::size_t j = 0; j < model.learners.size(); ++j)
    sum += model.weights[j] * model.learners[j].predict(window);
  // rescaled mode keeps sum(w) == J, so this is the weighted mean there
  return sum / static_cast<double>(model.learners.size());
}

double predict_ensemble(const EnsembleModel& model, const Eigen::MatrixXd& window) {
  return denormalize_target(predict_ensemble_normalized(model, window), model.stats);
}

std::vector<double> predict_ensemble_all_usd(const EnsembleModel& model,
                                             const Dataset& samples) {
  if (model.learners.empty()) throw TrainError("ensemble has no learners");
  std::vector<double> combined(samples.size(), 0.0);
  for (std::size_t j = 0; j < model.learners.size(); ++j) {
    const std::vector<double> preds = model.learners[j].predict_all(samples);
    for (std::size_t i = 0; i < samples.size(); ++i)
      combined[i] += model.weights[j] * preds[i];
  }
  const double inv_j = 1.0 / static_cast<double>(model.learners.size());
  for (double& v : combined)
    v = denormalize_target(v * inv_j, model.stats);
  return combined;
}

}  // namespace coincast
