#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coincast/features.hpp"
#include "coincast/learner.hpp"

namespace coincast {

enum class CombinerMode { kRescaled, kLiteral };

std::string combiner_mode_name(CombinerMode mode);
CombinerMode combiner_mode_from_name(const std::string& name);

// Per-sample resampling probabilities; always sums to 1.
using SamplingWeights = std::vector<double>;

// Uniform 1/N start.
SamplingWeights init_weights(std::size_t n);

// e_i = s_i * |r_i| / max_u |r_u| from the round's residuals (normalized
// price space); all zero on a perfect fit.
std::vector<double> round_errors(const std::vector<double>& residuals,
                                 const SamplingWeights& s);

// w_j = 0.5 * ln((1 - sum_e) / sum_e), with sum_e clamped into
// [1e-10, 0.5 - 1e-10] so the weight stays finite and positive.
double learner_weight(double sum_errors);

// s*_i = s_i * exp(e_i) / sum_u s_u * exp(e_u)
SamplingWeights update_weights(const SamplingWeights& s,
                               const std::vector<double>& e);

// N index draws with replacement, index i with probability s_i.
// Inverse-CDF over our own uniform draws: deterministic per seed on every
// platform.
std::vector<std::size_t> resample_indices(const SamplingWeights& s,
                                          std::mt19937_64& rng);

// One boosting round as recorded in the training trace.
struct RoundTrace {
  double sum_errors = 0;
  double weight = 0;            // w_j before any rescaling
  SamplingWeights weights_after;
};

struct BoostResult {
  std::vector<double> learner_weights;  // raw w_j
  std::vector<RoundTrace> trace;
};

// Predictions of one trained round over the full dataset, in dataset order.
using RoundPredictor =
    std::function<std::vector<double>(int round, const std::vector<std::size_t>& resampled)>;

// The boosting loop itself, generic over how a round's learner is obtained.
// The real trainer and the mock-learner tests both drive this.
BoostResult run_boosting(const std::vector<double>& targets, int rounds,
                         std::uint64_t seed, const RoundPredictor& predictor);

// J weak learners with voting weights plus everything needed to map a raw
// window to a USD forecast.
struct EnsembleModel {
  std::vector<WeakLearner> learners;
  std::vector<double> weights;  // rescaled mode: sums to J
  CombinerMode combiner_mode = CombinerMode::kRescaled;
  FeatureSpec feature_spec;
  NormalizationStats stats;
  std::vector<RoundTrace> trace;

  int rounds() const { return static_cast<int>(learners.size()); }
};

// Sequentially trains J learners on resampled data per the boosting loop.
EnsembleModel train_ensemble(const Dataset& train, const Dataset& val, int rounds,
                             const LearnerConfig& base_config,
                             const FeatureSpec& spec, const NormalizationStats& stats,
                             std::uint64_t seed,
                             CombinerMode mode = CombinerMode::kRescaled);

// Weighted combination in normalized space.
double predict_ensemble_normalized(const EnsembleModel& model,
                                   const Eigen::MatrixXd& window);

// Same, denormalized to USD.
double predict_ensemble(const EnsembleModel& model, const Eigen::MatrixXd& window);

std::vector<double> predict_ensemble_all_usd(const EnsembleModel& model,
                                             const Dataset& samples);

}  // namespace coincast
