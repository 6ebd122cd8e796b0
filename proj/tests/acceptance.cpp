// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coincast/cli.hpp"
#include "coincast/config.hpp"
#include "coincast/ensemble.hpp"
#include "coincast/evaluation.hpp"
#include "coincast/features.hpp"
#include "coincast/fluctuation.hpp"
#include "coincast/learner.hpp"
#include "coincast/market_data.hpp"
#include "coincast/plot.hpp"
#include "coincast/rng.hpp"
#include "coincast/sentiment.hpp"
#include "coincast/serialize.hpp"

using namespace coincast;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++failures;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// ---- criterion 1: boosting loop arithmetic against a frozen reference ----

void check_boosting_trace() {
  const std::vector<double> targets(4, 0.0);
  const std::vector<std::vector<double>> round_preds = {
      {0.1, 0.2, 0.1, 0.2}, {0.0, 0.4, 0.0, 0.0}, {0.05, 0.1, 0.2, 0.0}};
  const BoostResult r = run_boosting(
      targets, 3, 7,
      [&](int round, const std::vector<std::size_t>&) {
        return round_preds[static_cast<std::size_t>(round)];
      });

  // reference values computed independently from the update formulas
  const double exp_sum_e[3] = {0.75, 0.2656046866868781, 0.4313440310106301};
  const double exp_w[3] = {2.000000165080742e-10, 0.5085191972633248,
                           0.13818481992322357};
  const double exp_s[3][4] = {
      {0.23439531331312186, 0.2656046866868781, 0.23439531331312186,
       0.2656046866868781},
      {0.2168716314691006, 0.3205089833485087, 0.2168716314691006,
       0.24574775371329016},
      {0.20436651787040377, 0.3358136216224361, 0.2404636083867943,
       0.21935625212036586}};

  bool ok = r.trace.size() == 3;
  for (std::size_t j = 0; ok && j < 3; ++j) {
    ok = near(r.trace[j].sum_errors, exp_sum_e[j], 1e-12) &&
         near(r.trace[j].weight, exp_w[j], 1e-12) &&
         near(r.learner_weights[j], exp_w[j], 1e-12);
    double total = 0;
    for (std::size_t i = 0; ok && i < 4; ++i) {
      ok = near(r.trace[j].weights_after[i], exp_s[j][i], 1e-12);
      total += r.trace[j].weights_after[i];
    }
    ok = ok && near(total, 1.0, 1e-12);
  }
  report("boosting trace matches the hand-computed reference to 1e-12", ok);
}

// ---- shared synthetic data ----

DailySeries price_table(std::size_t days, std::uint64_t seed) {
  DailySeries t;
  t.start_date = parse_date("2014-01-01");
  t.channels = {"close"};
  auto rng = make_rng(seed, SeedStream::kSynthetic, 100);
  for (std::size_t i = 0; i < days; ++i) {
    const double x = static_cast<double>(i);
    t.values.push_back({150.0 + 0.05 * x + 25.0 * std::sin(x / 6.0) +
                        uniform_range(rng, -1.0, 1.0)});
  }
  return t;
}

struct Prepared {
  FeatureSpec spec;
  SplitSpans spans;
  NormalizationStats stats;
  Dataset train, val, test;
};

Prepared prepare(const DailySeries& table, const FeatureSpec& spec) {
  Prepared p;
  p.spec = spec;
  p.spans = chronological_split(table.size(), {0.70, 0.15, 0.15});
  p.stats = fit_normalization(table, spec, p.spans.train);
  p.train = build_windows(table, spec, p.stats, p.spans.train, 7);
  p.val = build_windows(table, spec, p.stats, p.spans.val, 7);
  p.test = build_windows(table, spec, p.stats, p.spans.test, 7);
  return p;
}

double mae_usd(const EnsembleModel& model, const Dataset& data) {
  const std::vector<double> preds = predict_ensemble_all_usd(model, data);
  double acc = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    acc += std::abs(preds[i] - denormalize_target(data[i].y, model.stats));
  return acc / static_cast<double>(data.size());
}

// ---- criteria 2, 5, 7, 9 share one trained price model ----

void check_combiner(const EnsembleModel& ensemble, const Prepared& p) {
  bool ok = true;
  // rescaled weights sum to J
  double wsum = std::accumulate(ensemble.weights.begin(), ensemble.weights.end(), 0.0);
  ok = ok && near(wsum, static_cast<double>(ensemble.rounds()), 1e-9);

  for (std::size_t i = 0; i < 20 && i < p.test.size(); ++i) {
    const Eigen::MatrixXd& window = p.test[i].X;
    double acc = 0;
    for (std::size_t j = 0; j < ensemble.learners.size(); ++j)
      acc += ensemble.weights[j] * ensemble.learners[j].predict(window);
    const double expected = acc / static_cast<double>(ensemble.rounds());
    ok = ok && near(predict_ensemble_normalized(ensemble, window), expected, 1e-12);
  }

  // literal mode keeps the raw weights
  EnsembleModel literal = ensemble;
  literal.combiner_mode = CombinerMode::kLiteral;
  literal.weights.clear();
  for (const auto& t : ensemble.trace) literal.weights.push_back(t.weight);
  const Eigen::MatrixXd& window = p.test[0].X;
  double acc = 0;
  for (std::size_t j = 0; j < literal.learners.size(); ++j)
    acc += literal.weights[j] * literal.learners[j].predict(window);
  ok = ok && near(predict_ensemble_normalized(literal, window),
                  acc / static_cast<double>(literal.rounds()), 1e-12);

  report("combined vote matches the weighted-average formula in both modes to 1e-12",
         ok);
}

void check_mle() {
  auto rng = make_rng(2026, SeedStream::kSynthetic, 101);
  bool ok = true;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    std::vector<double> x(10);
    for (auto& v : x) v = uniform_range(rng, 1000.0, 9000.0);
    double mu = 0, sigma2 = 0;
    estimate_distribution(x, mu, sigma2);

    auto nll = [&](double m, double s2) {
      double acc = 0;
      for (double v : x)
        acc += 0.5 * std::log(2 * 3.14159265358979323846 * s2) +
               (v - m) * (v - m) / (2 * s2);
      return acc;
    };
    // grid search around the estimate: no neighbor may beat it
    const double best = nll(mu, sigma2);
    for (int dm = -300; dm <= 300 && ok; ++dm)
      for (int ds = -300; ds <= 300; ds += 10) {
        const double m = mu + dm * 1e-3;
        const double s2 = sigma2 * (1.0 + ds * 1e-3);
        if (s2 <= 0) continue;
        if (nll(m, s2) < best - 1e-9) {
          ok = false;
          break;
        }
      }

    // shift/scale equivariance
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) y[i] = 2.5 * x[i] - 700.0;
    double mu_y = 0, s2_y = 0;
    estimate_distribution(y, mu_y, s2_y);
    ok = ok && near(mu_y, 2.5 * mu - 700.0, 1e-9 * std::abs(mu_y)) &&
         near(s2_y, 6.25 * sigma2, 1e-9 * s2_y);
  }
  report("gaussian mle beats every grid-search neighbor and is affine-equivariant",
         ok);
}

void check_gradients() {
  LearnerConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = 3;
  cfg.fc1 = 2;
  cfg.window = 5;
  cfg.seed = 12;

  bool ok = true;
  double worst = 0;
  auto rng = make_rng(12, SeedStream::kSynthetic, 102);
  for (int trial = 0; trial < 10 && ok; ++trial) {
    cfg.seed = 12 + static_cast<std::uint64_t>(trial);
    LstmParams params = init_params(cfg);
    std::vector<Eigen::MatrixXd> xs(3, Eigen::MatrixXd(cfg.window, cfg.input_dim));
    Eigen::VectorXd targets(3);
    for (int i = 0; i < 3; ++i) {
      for (int r = 0; r < cfg.window; ++r)
        for (int c = 0; c < cfg.input_dim; ++c)
          xs[static_cast<std::size_t>(i)](r, c) = uniform_range(rng, -1.0, 1.0);
      targets(i) = uniform_range(rng, 0.0, 1.0);
    }
    std::vector<const Eigen::MatrixXd*> windows = {&xs[0], &xs[1], &xs[2]};

    LstmParams grads = LstmParams::zeros(cfg);
    batch_loss(cfg, params, windows, targets, nullptr, &grads);

    const double h = 1e-5;
    for (std::size_t t = 0; t < 7 && ok; ++t) {
      Eigen::MatrixXd& tensor = *params.tensors()[t];
      const Eigen::MatrixXd& grad = *grads.tensors()[t];
      for (int r = 0; r < tensor.rows() && ok; ++r)
        for (int c = 0; c < tensor.cols(); ++c) {
          const double saved = tensor(r, c);
          tensor(r, c) = saved + h;
          const double up = batch_loss(cfg, params, windows, targets, nullptr, nullptr);
          tensor(r, c) = saved - h;
          const double dn = batch_loss(cfg, params, windows, targets, nullptr, nullptr);
          tensor(r, c) = saved;
          const double numeric = (up - dn) / (2 * h);
          const double rel = std::abs(numeric - grad(r, c)) /
                             std::max({std::abs(numeric), std::abs(grad(r, c)), 1e-6});
          worst = std::max(worst, rel);
          if (rel > 1e-4) {
            ok = false;
            break;
          }
        }
    }
  }
  std::ostringstream detail;
  detail << "max rel err " << worst;
  report("analytic lstm gradients match central differences within 1e-4", ok,
         detail.str());
}

void check_forecasting(EnsembleModel& price_model_out, Prepared& prepared_out,
                       DailySeries& table_out) {
  const DailySeries table = price_table(1825, 41);
  const Prepared p = prepare(table, select_modalities("price"));

  LearnerConfig cfg;
  cfg.input_dim = 1;
  cfg.hidden = 32;
  cfg.fc1 = 16;
  cfg.epochs = 50;
  cfg.learning_rate = 0.005;
  cfg.batch_size = 32;

  const EnsembleModel ensemble =
      train_ensemble(p.train, p.val, 5, cfg, p.spec, p.stats, 2023);
  const EnsembleModel single =
      train_ensemble(p.train, p.val, 1, cfg, p.spec, p.stats, 2023);

  const double ens_mae = mae_usd(ensemble, p.test);
  const double single_mae = mae_usd(single, p.test);

  // persistence: tomorrow's close is today's close
  double persist = 0;
  for (const auto& s : p.test) {
    const double last = denormalize_target(s.X(s.X.rows() - 1, 0), p.stats);
    persist += std::abs(last - denormalize_target(s.y, p.stats));
  }
  persist /= static_cast<double>(p.test.size());

  std::ostringstream detail;
  detail << "ensemble " << ens_mae << ", single " << single_mae << ", persistence "
         << persist;
  report("ensemble test MAE beats persistence by >= 30% and is <= 1.10x the single "
         "learner",
         ens_mae <= 0.70 * persist && ens_mae <= 1.10 * single_mae, detail.str());

  price_model_out = ensemble;
  prepared_out = p;
  table_out = table;
}

void check_multimodal_gain() {
  // tomorrow's move is driven by an exogenous signal only the second
  // channel can see
  DailySeries table;
  table.start_date = parse_date("2014-01-01");
  table.channels = {"close", "search_volume"};
  auto rng = make_rng(90, SeedStream::kSynthetic, 103);
  double close = 500.0;
  std::vector<double> aux_values;
  for (int i = 0; i < 900; ++i) {
    const double aux = uniform_range(rng, -1.0, 1.0);
    table.values.push_back({close, aux});
    aux_values.push_back(aux);
    close += 3.0 * aux + uniform_range(rng, -0.1, 0.1);
  }

  FeatureSpec both;
  both.name = "price+signal";
  both.channels = {"close", "search_volume"};
  const Prepared p_both = prepare(table, both);
  const Prepared p_price = prepare(table, select_modalities("price"));

  LearnerConfig cfg;
  cfg.hidden = 32;
  cfg.fc1 = 16;
  cfg.epochs = 50;
  cfg.learning_rate = 0.005;

  cfg.input_dim = 2;
  const EnsembleModel with_aux =
      train_ensemble(p_both.train, p_both.val, 1, cfg, both, p_both.stats, 314);
  cfg.input_dim = 1;
  const EnsembleModel price_only = train_ensemble(
      p_price.train, p_price.val, 1, cfg, p_price.spec, p_price.stats, 314);

  const double mae_both = mae_usd(with_aux, p_both.test);
  const double mae_price = mae_usd(price_only, p_price.test);
  std::ostringstream detail;
  detail << "with signal " << mae_both << ", price-only " << mae_price;
  report("adding an informative modality improves test MAE by >= 5%",
         mae_both <= 0.95 * mae_price, detail.str());
}

void check_horizon_growth(const EnsembleModel& model, const Prepared& p,
                          const DailySeries& table) {
  std::vector<double> closes;
  for (const auto& row : table.values) closes.push_back(row[0]);

  std::vector<std::size_t> starts;
  const std::size_t first = p.spans.test.offset;
  const std::size_t last = p.spans.test.offset + p.spans.test.count - 30;
  for (std::size_t i = 0; i < 12; ++i) starts.push_back(first + i * (last - first) / 11);

  const RollingForecast rf = rolling_forecast(model, closes, starts, 30);
  std::ostringstream detail;
  detail << "h1 " << rf.mean_abs_err[0] << ", h30 " << rf.mean_abs_err[29] << " over "
         << starts.size() << " windows";
  report("roll-forward MAE at horizon 30 is >= the single-step MAE",
         rf.mean_abs_err[29] >= rf.mean_abs_err[0], detail.str());
}

void check_serialization(const EnsembleModel& model, const Prepared& p) {
  const fs::path dir = fs::temp_directory_path() / "coincast_acceptance_bundle";
  fs::remove_all(dir);
  save_bundle(dir.string(), model);
  const EnsembleModel back = load_bundle(dir.string());
  fs::remove_all(dir);

  bool ok = back.rounds() == model.rounds();
  for (std::size_t i = 0; ok && i < 50 && i < p.test.size(); ++i)
    ok = predict_ensemble(model, p.test[i].X) == predict_ensemble(back, p.test[i].X);
  report("a reloaded bundle reproduces 50 predictions bit for bit", ok);
}

// ---- criterion 8: end-to-end determinism and invariants ----

void make_sources(const fs::path& dir, int days) {
  std::vector<TradingRecord> trading;
  std::vector<BlockchainRecord> chain;
  std::vector<SearchRecord> search;
  std::string tweets = "timestamp,score_a,score_b,likes,comments,retweets,quotes\n";
  const Date start = parse_date("2014-01-01");
  auto rng = make_rng(61, SeedStream::kSynthetic, 104);
  for (int i = 0; i < days; ++i) {
    const Date d = start + i;
    const double close =
        300.0 + 0.1 * i + 12.0 * std::sin(i / 7.0) + uniform_range(rng, -1, 1);
    TradingRecord t;
    t.date = d;
    t.open = close - 1;
    t.high = close + 2;
    t.low = close - 2;
    t.close = close;
    t.volume_coin = 80;
    t.volume_usd = 80 * close;
    t.weighted_price = close;
    t.avg_fees = 0.3;
    t.transactions = 900 + i;
    trading.push_back(t);
    chain.push_back({d, 2e6 + i, 0.9, 9.0, 2e9, 4000 + i, 1.2});
    search.push_back({d, 60 + 4 * std::sin(i / 5.0)});
    tweets += tweet_timestamp_text(d.days * 86400 + 43200) + "," +
              format_double(std::sin(i / 3.0) * 0.8) + ",,2,3,4,5\n";
  }
  write_records((dir / "trading.csv").string(), trading);
  write_records((dir / "blockchain.csv").string(), chain);
  write_records((dir / "search.csv").string(), search);
  std::ofstream(dir / "tweets.csv", std::ios::binary) << tweets;
}

RunConfig pipeline_config(const fs::path& dir, const fs::path& out) {
  RunConfig cfg;
  cfg.seed = 777;
  cfg.data.trading = {(dir / "trading.csv").string()};
  cfg.data.blockchain = {(dir / "blockchain.csv").string()};
  cfg.data.search = {(dir / "search.csv").string()};
  cfg.data.tweets = (dir / "tweets.csv").string();
  cfg.data.start = parse_date("2014-01-01");
  cfg.data.end = parse_date("2014-04-10");
  cfg.learner.hidden = 6;
  cfg.learner.fc1 = 4;
  cfg.learner.epochs = 5;
  cfg.learner.learning_rate = 0.01;
  cfg.ensemble.rounds = 2;
  cfg.evaluate.plot_window = 10;
  cfg.output.dir = out.string();
  return cfg;
}

void check_pipeline_determinism(const EnsembleModel& trained) {
  const fs::path root = fs::temp_directory_path() / "coincast_acceptance_pipeline";
  fs::remove_all(root);
  fs::create_directories(root);
  make_sources(root, 100);

  auto run = [&](const fs::path& out) {
    RunConfig cfg = pipeline_config(root, out);
    cli::cmd_prepare(cfg);
    const std::string bundle = cli::cmd_train(cfg);
    cli::cmd_evaluate(cfg, bundle);
    return cfg;
  };
  const RunConfig cfg_a = run(root / "out_a");
  run(root / "out_b");

  bool ok = true;
  std::string mismatch;
  for (const char* name :
       {"features.csv", "metrics.csv", "training_trace.csv", "error_shares.csv",
        "forecast_vs_actual.svg", "forecast_vs_actual.png"}) {
    const std::string a = read_file((root / "out_a" / name).string());
    const std::string b = read_file((root / "out_b" / name).string());
    if (a.empty() || a != b) {
      ok = false;
      mismatch += std::string(name) + " ";
    }
  }

  // structural invariants of the run
  const EnsembleModel model = load_bundle((root / "out_a" / "bundle").string());
  const double wsum =
      std::accumulate(model.weights.begin(), model.weights.end(), 0.0);
  if (!near(wsum, static_cast<double>(model.rounds()), 1e-9)) {
    ok = false;
    mismatch += "weight-sum ";
  }
  // sampling-weight history lives only on the in-memory model
  for (const auto& t : trained.trace) {
    double s = 0;
    for (double v : t.weights_after) {
      if (v <= 0) {
        ok = false;
        mismatch += "nonpositive-sampling-weight ";
      }
      s += v;
    }
    if (!near(s, 1.0, 1e-9)) {
      ok = false;
      mismatch += "sampling-weight-sum ";
    }
  }
  const DailySeries table =
      load_feature_table((root / "out_a" / "features.csv").string());
  const SplitSpans spans = chronological_split(table.size(), {0.70, 0.15, 0.15});
  if (spans.train.count + spans.val.count + spans.test.count != table.size()) {
    ok = false;
    mismatch += "split-partition ";
  }

  fs::remove_all(root);
  report("rerunning the pipeline with one seed reproduces every output byte for byte",
         ok, mismatch.empty() ? "" : "differs: " + mismatch);
}

}  // namespace

int main() {
  std::cout.setf(std::ios::boolalpha);
  try {
    check_boosting_trace();
    check_mle();
    check_gradients();

    EnsembleModel price_model;
    Prepared prepared;
    DailySeries table;
    check_forecasting(price_model, prepared, table);
    check_combiner(price_model, prepared);
    check_multimodal_gain();
    check_horizon_growth(price_model, prepared, table);
    check_pipeline_determinism(price_model);
    check_serialization(price_model, prepared);
  } catch (const std::exception& e) {
    std::cout << "FAIL: acceptance aborted (" << e.what() << ")" << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : "criteria failed: ")
            << (failures == 0 ? "" : std::to_string(failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
