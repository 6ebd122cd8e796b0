#include "coincast/config.hpp"

#include <fstream>
#include <json.hpp>

#include "coincast/errors.hpp"

namespace coincast {

using nlohmann::json;

namespace {

template <class T>
void read_into(const json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  try {
    RunConfig cfg;
    if (!j.contains("seed"))
      throw ConfigError(path + ": 'seed' is mandatory (no implicit entropy)");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("data")) {
      const json& d = j.at("data");
      read_into(d, "trading", cfg.data.trading);
      read_into(d, "blockchain", cfg.data.blockchain);
      read_into(d, "search", cfg.data.search);
      read_into(d, "tweets", cfg.data.tweets);
      if (d.contains("start")) cfg.data.start = parse_date(d.at("start").get<std::string>());
      if (d.contains("end")) cfg.data.end = parse_date(d.at("end").get<std::string>());
    }

    if (j.contains("features")) {
      const json& f = j.at("features");
      read_into(f, "combination", cfg.features.combination);
      if (f.contains("split")) {
        const auto v = f.at("split").get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("features.split needs 3 ratios");
        cfg.features.split = {v[0], v[1], v[2]};
      }
      read_into(f, "window", cfg.features.window);
    }

    if (j.contains("learner")) {
      const json& l = j.at("learner");
      read_into(l, "hidden", cfg.learner.hidden);
      read_into(l, "fc1", cfg.learner.fc1);
      read_into(l, "epochs", cfg.learner.epochs);
      read_into(l, "learning_rate", cfg.learner.learning_rate);
      read_into(l, "batch_size", cfg.learner.batch_size);
      read_into(l, "dropout_rate", cfg.learner.dropout_rate);
      if (l.contains("dropout_site"))
        cfg.learner.dropout_site =
            dropout_site_from_name(l.at("dropout_site").get<std::string>());
    }

    if (j.contains("ensemble")) {
      const json& e = j.at("ensemble");
      read_into(e, "rounds", cfg.ensemble.rounds);
      if (e.contains("combiner_mode"))
        cfg.ensemble.combiner_mode =
            combiner_mode_from_name(e.at("combiner_mode").get<std::string>());
    }

    if (j.contains("fluctuation"))
      read_into(j.at("fluctuation"), "enabled", cfg.fluctuation.enabled);

    if (j.contains("evaluate")) {
      const json& e = j.at("evaluate");
      read_into(e, "plot_window", cfg.evaluate.plot_window);
      read_into(e, "bands", cfg.evaluate.bands);
      read_into(e, "include_single", cfg.evaluate.include_single);
    }

    if (j.contains("longterm")) {
      const json& l = j.at("longterm");
      read_into(l, "horizon", cfg.longterm.horizon);
      read_into(l, "windows", cfg.longterm.windows);
    }

    if (j.contains("compare")) {
      const json& c = j.at("compare");
      read_into(c, "combinations", cfg.compare.combinations);
      read_into(c, "kinds", cfg.compare.kinds);
    }

    if (j.contains("output")) read_into(j.at("output"), "dir", cfg.output.dir);

    if (cfg.ensemble.rounds < 1) throw ConfigError("ensemble.rounds must be >= 1");
    cfg.learner.window = cfg.features.window;
    cfg.learner.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace coincast
