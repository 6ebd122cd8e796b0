#pragma once

#include <string>
#include <vector>

#include "coincast/ensemble.hpp"

namespace coincast {

enum class VarietyKind { kInputVariety, kDropoutVariant };

// One of the ten model varieties whose forecasts feed the fluctuation
// distribution: four input-modality combinations plus six dropout variants
// of the all-modality model.
struct VarietySpec {
  int id = 0;  // 1..10
  VarietyKind kind = VarietyKind::kInputVariety;
  std::string combination;      // modality id of the trained model
  DropoutSite dropout_site = DropoutSite::kNone;
  double dropout_rate = 0.0;

  // stable directory/file identifier, e.g. "v03_trading+blockchain"
  std::string label() const;
};

// The fixed set of ten variety specs.
std::vector<VarietySpec> build_varieties();

// Gaussian MLE fit over forecasts: mu = mean, sigma2 = 1/n sum (o - mu)^2.
struct PriceDistribution {
  double mu = 0;       // USD
  double sigma2 = 0;   // USD^2
  std::vector<double> outputs;  // the variety forecasts, USD
};

void estimate_distribution(const std::vector<double>& outputs, double& mu,
                           double& sigma2);

// Point forecast from the all-modality ensemble plus the distribution of
// the ten variety outputs for one date.
struct DistributionForecast {
  Date date;
  double point_forecast_usd = 0;
  PriceDistribution distribution;
};

// `varieties` must hold one trained model per spec from build_varieties(),
// in the same order; `point_model` is the all-modality ensemble.
DistributionForecast forecast_with_distribution(
    const EnsembleModel& point_model, const std::vector<EnsembleModel>& varieties,
    const DailySeries& table, Date date, int window = 7);

}  // namespace coincast
