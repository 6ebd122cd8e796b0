#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "coincast/features.hpp"

namespace coincast {

enum class DropoutSite { kNone, kRecurrentLastHidden, kFc1Output };

std::string dropout_site_name(DropoutSite site);
DropoutSite dropout_site_from_name(const std::string& name);

struct LearnerConfig {
  int input_dim = 18;
  int hidden = 64;
  int fc1 = 32;
  DropoutSite dropout_site = DropoutSite::kNone;
  double dropout_rate = 0.0;
  int epochs = 200;
  double learning_rate = 0.0003;
  int batch_size = 32;
  int window = 7;
  std::uint64_t seed = 0;

  void validate() const;
};

// All parameters of one weak forecaster. Gate rows of w_ih / w_hh / b_gates
// are stacked input, forget, cell, output. Vectors are stored as n x 1 so
// the named-tensor view is uniform.
struct LstmParams {
  Eigen::MatrixXd w_ih;    // 4H x D
  Eigen::MatrixXd w_hh;    // 4H x H
  Eigen::MatrixXd b_gates; // 4H x 1
  Eigen::MatrixXd fc1_w;   // F x H
  Eigen::MatrixXd fc1_b;   // F x 1
  Eigen::MatrixXd out_w;   // 1 x F
  Eigen::MatrixXd out_b;   // 1 x 1

  static LstmParams zeros(const LearnerConfig& cfg);

  static const std::array<const char*, 7>& tensor_names();
  std::array<Eigen::MatrixXd*, 7> tensors();
  std::array<const Eigen::MatrixXd*, 7> tensors() const;

  void set_zero();
  bool all_finite() const;
};

// Inverted-dropout masks (entries 0 or 1/(1-rate)); empty matrix = no
// dropout at that site.
struct DropoutMasks {
  Eigen::MatrixXd hidden;  // H x batch
  Eigen::MatrixXd fc1;     // F x batch
};

// MSE over the batch; fills *grads (same shapes as params) when non-null.
// `windows` holds one window x D matrix per sample.
double batch_loss(const LearnerConfig& cfg, const LstmParams& params,
                  const std::vector<const Eigen::MatrixXd*>& windows,
                  const Eigen::VectorXd& targets, const DropoutMasks* masks,
                  LstmParams* grads);

struct TrainingLog {
  std::vector<double> train_loss;                    // one entry per epoch
  std::vector<std::pair<int, double>> val_mae;       // (epoch, MAE) every 10
};

// An immutable trained forecaster. Prediction is deterministic; dropout is
// active only while training.
class WeakLearner {
 public:
  WeakLearner(LearnerConfig config, LstmParams params, TrainingLog log = {});

  double predict(const Eigen::MatrixXd& window) const;
  std::vector<double> predict_all(const Dataset& samples) const;

  const LearnerConfig& config() const { return config_; }
  const LstmParams& params() const { return params_; }
  const TrainingLog& log() const { return log_; }

 private:
  LearnerConfig config_;
  LstmParams params_;
  TrainingLog log_;
};

// Adam on MSE for the configured epochs; validation MAE recorded every ten
// epochs. Bit-reproducible for a fixed seed on the same platform.
WeakLearner train_learner(const Dataset& train, const Dataset& val,
                          const LearnerConfig& cfg);

// Seeded parameter draw used at the start of training (exposed for the
// gradient-check tests).
LstmParams init_params(const LearnerConfig& cfg);

}  // namespace coincast
