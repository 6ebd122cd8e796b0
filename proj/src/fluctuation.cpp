#include "coincast/fluctuation.hpp"

#include <cmath>
#include <cstdio>

#include "coincast/errors.hpp"

namespace coincast {

std::string VarietySpec::label() const {
  char prefix[8];
  std::snprintf(prefix, sizeof(prefix), "v%02d_", id);
  if (kind == VarietyKind::kInputVariety) return prefix + combination;
  const char* site =
      dropout_site == DropoutSite::kRecurrentLastHidden ? "lstm" : "fc1";
  char rate[16];
  std::snprintf(rate, sizeof(rate), "%g", dropout_rate);
  return std::string(prefix) + "dropout_" + site + "_" + rate;
}

std::vector<VarietySpec> build_varieties() {
  std::vector<VarietySpec> specs;
  int id = 1;
  for (const char* combo :
       {"trading", "sentiment", "trading+blockchain", "trading+search"}) {
    VarietySpec s;
    s.id = id++;
    s.kind = VarietyKind::kInputVariety;
    s.combination = combo;
    specs.push_back(s);
  }
  for (DropoutSite site :
       {DropoutSite::kRecurrentLastHidden, DropoutSite::kFc1Output}) {
    for (double rate : {0.1, 0.2, 0.35}) {
      VarietySpec s;
      s.id = id++;
      s.kind = VarietyKind::kDropoutVariant;
      s.combination = "all";
      s.dropout_site = site;
      s.dropout_rate = rate;
      specs.push_back(s);
    }
  }
  return specs;
}

void estimate_distribution(const std::vector<double>& outputs, double& mu,
                           double& sigma2) {
  if (outputs.empty())
    throw DataError("estimate_distribution: no forecasts given");
  double sum = 0;
  for (double o : outputs) {
    if (!std::isfinite(o))
      throw DataError("estimate_distribution: non-finite forecast");
    sum += o;
  }
  const double n = static_cast<double>(outputs.size());
  mu = sum / n;
  double ss = 0;
  for (double o : outputs) ss += (o - mu) * (o - mu);
  sigma2 = ss / n;  // MLE uses 1/n
}

namespace {

Eigen::MatrixXd window_for_date(const EnsembleModel& model,
                                const DailySeries& table, Date date, int window) {
  const std::int64_t idx = date - table.start_date;
  if (idx < window || idx > static_cast<std::int64_t>(table.size()))
    throw DataError("no " + std::to_string(window) + "-day window ending before " +
                    format_date(date) + " in the feature table");
  Eigen::MatrixXd x(window, model.feature_spec.dimension());
  for (int r = 0; r < window; ++r) {
    const auto& row = table.values[static_cast<std::size_t>(idx - window + r)];
    for (int c = 0; c < model.feature_spec.dimension(); ++c) {
      const std::size_t col = channel_index(table, model.feature_spec.channels[c]);
      x(r, c) = normalize_value(row[col], model.stats.mins[c], model.stats.maxs[c]);
    }
  }
  return x;
}

}  // namespace

DistributionForecast forecast_with_distribution(
    const EnsembleModel& point_model, const std::vector<EnsembleModel>& varieties,
    const DailySeries& table, Date date, int window) {
  const std::vector<VarietySpec> specs = build_varieties();
  if (varieties.size() != specs.size())
    throw DataError("expected " + std::to_string(specs.size()) +
                    " trained varieties, got " + std::to_string(varieties.size()));

  DistributionForecast out;
  out.date = date;
  out.point_forecast_usd =
      predict_ensemble(point_model, window_for_date(point_model, table, date, window));

  for (std::size_t v = 0; v < varieties.size(); ++v) {
    if (varieties[v].learners.empty())
      throw DataError("variety " + specs[v].label() + " is not trained");
    try {
      out.distribution.outputs.push_back(predict_ensemble(
          varieties[v], window_for_date(varieties[v], table, date, window)));
    } catch (const DataError& e) {
      throw DataError("variety " + specs[v].label() + ": " + e.what());
    }
  }
  estimate_distribution(out.distribution.outputs, out.distribution.mu,
                        out.distribution.sigma2);
  return out;
}

}  // namespace coincast
