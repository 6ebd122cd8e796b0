#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "coincast/cli.hpp"
#include "coincast/config.hpp"
#include "coincast/errors.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration (json)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "global seed (overrides config)");
}

coincast::RunConfig resolve(const CommonOpts& opts) {
  coincast::RunConfig cfg = coincast::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multimodal cryptocurrency price forecasting"};
  app.require_subcommand(1);

  CommonOpts prepare_o, train_o, evaluate_o, fluct_o, longterm_o, compare_o;
  std::string evaluate_bundle, longterm_bundle, fluct_date;

  add_common(app.add_subcommand("prepare", "merge sources into features.csv"),
             prepare_o);
  add_common(app.add_subcommand("train", "train the boosted ensemble"), train_o);
  auto* evaluate = app.add_subcommand("evaluate", "metrics and forecast plots");
  add_common(evaluate, evaluate_o);
  evaluate->add_option("--bundle", evaluate_bundle, "model bundle directory");
  auto* fluct = app.add_subcommand("fluctuation", "price distribution for a date");
  add_common(fluct, fluct_o);
  fluct->add_option("--date", fluct_date, "forecast date, YYYY-MM-DD")->required();
  auto* longterm = app.add_subcommand("longterm", "30-day roll-forward error");
  add_common(longterm, longterm_o);
  longterm->add_option("--bundle", longterm_bundle, "price-only bundle directory");
  add_common(app.add_subcommand("compare", "model / modality comparison table"),
             compare_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("prepare")) {
      coincast::cli::cmd_prepare(resolve(prepare_o));
    } else if (app.got_subcommand("train")) {
      coincast::cli::cmd_train(resolve(train_o));
    } else if (app.got_subcommand("evaluate")) {
      const auto cfg = resolve(evaluate_o);
      const std::string bundle =
          evaluate_bundle.empty() ? cfg.output.dir + "/bundle" : evaluate_bundle;
      coincast::cli::cmd_evaluate(cfg, bundle);
    } else if (app.got_subcommand("fluctuation")) {
      coincast::cli::cmd_fluctuation(resolve(fluct_o), fluct_date);
    } else if (app.got_subcommand("longterm")) {
      const auto cfg = resolve(longterm_o);
      const std::string bundle =
          longterm_bundle.empty() ? cfg.output.dir + "/bundle" : longterm_bundle;
      coincast::cli::cmd_longterm(cfg, bundle);
    } else if (app.got_subcommand("compare")) {
      coincast::cli::cmd_compare(resolve(compare_o));
    }
  } catch (const coincast::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const coincast::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const coincast::TrainError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
