#include "coincast/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "coincast/csv.hpp"
#include "coincast/errors.hpp"

namespace coincast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kTensorFormatVersion = 1;
constexpr int kBundleFormatVersion = 1;

void write_doubles_le(std::ofstream& out, const Eigen::MatrixXd& m) {
  // row-major element order; host is little-endian
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
}

}  // namespace

void save_params(const std::string& base, const LstmParams& params) {
  std::ofstream manifest(base + ".manifest", std::ios::binary);
  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!manifest || !bin) throw DataError("cannot write parameter files at " + base);

  manifest << "format_version " << kTensorFormatVersion << "\n";
  std::size_t offset = 0;
  const auto& names = LstmParams::tensor_names();
  const auto tensors = params.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    manifest << "tensor " << names[t] << ' ' << tensors[t]->rows() << ' '
             << tensors[t]->cols() << ' ' << offset << "\n";
    write_doubles_le(bin, *tensors[t]);
    offset += static_cast<std::size_t>(tensors[t]->size());
  }
  if (!manifest || !bin) throw DataError("write failed at " + base);
}

LstmParams load_params(const std::string& base, const LearnerConfig& cfg) {
  std::ifstream manifest(base + ".manifest");
  if (!manifest) throw DataError("cannot open " + base + ".manifest");

  std::string key;
  int version = 0;
  manifest >> key >> version;
  if (key != "format_version" || version != kTensorFormatVersion)
    throw DataError(base + ".manifest: unsupported format version");

  LstmParams params = LstmParams::zeros(cfg);
  auto tensors = params.tensors();
  const auto& names = LstmParams::tensor_names();

  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw DataError("cannot open " + base + ".bin");

  for (std::size_t t = 0; t < tensors.size(); ++t) {
    std::string tag, name;
    long long rows = 0, cols = 0, offset = 0;
    if (!(manifest >> tag >> name >> rows >> cols >> offset) || tag != "tensor")
      throw DataError(base + ".manifest: truncated manifest");
    if (name != names[t])
      throw DataError(base + ".manifest: unexpected tensor '" + name + "'");
    if (rows != tensors[t]->rows() || cols != tensors[t]->cols())
      throw DataError(base + ".manifest: tensor '" + name + "' shape " +
                      std::to_string(rows) + "x" + std::to_string(cols) +
                      " does not match the configured architecture");
    bin.seekg(static_cast<std::streamoff>(offset) *
              static_cast<std::streamoff>(sizeof(double)));
    for (long long r = 0; r < rows; ++r)
      for (long long c = 0; c < cols; ++c) {
        double v = 0;
        bin.read(reinterpret_cast<char*>(&v), sizeof(double));
        (*tensors[t])(r, c) = v;
      }
    if (!bin) throw DataError(base + ".bin: truncated tensor data");
  }
  return params;
}

namespace {

json config_to_json(const LearnerConfig& cfg) {
  return json{{"input_dim", cfg.input_dim},
              {"hidden", cfg.hidden},
              {"fc1", cfg.fc1},
              {"dropout_site", dropout_site_name(cfg.dropout_site)},
              {"dropout_rate", cfg.dropout_rate},
              {"epochs", cfg.epochs},
              {"learning_rate", cfg.learning_rate},
              {"batch_size", cfg.batch_size},
              {"window", cfg.window},
              {"seed", cfg.seed}};
}

LearnerConfig config_from_json(const json& j) {
  LearnerConfig cfg;
  cfg.input_dim = j.at("input_dim").get<int>();
  cfg.hidden = j.at("hidden").get<int>();
  cfg.fc1 = j.at("fc1").get<int>();
  cfg.dropout_site = dropout_site_from_name(j.at("dropout_site").get<std::string>());
  cfg.dropout_rate = j.at("dropout_rate").get<double>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.window = j.at("window").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

std::string learner_base(const std::string& dir, int round) {
  char name[32];
  std::snprintf(name, sizeof(name), "learner_%02d", round);
  return (fs::path(dir) / name).string();
}

}  // namespace

void save_bundle(const std::string& dir, const EnsembleModel& model) {
  if (model.learners.empty()) throw DataError("save_bundle: model has no learners");
  fs::create_directories(dir);

  json manifest;
  manifest["format_version"] = kBundleFormatVersion;
  manifest["rounds"] = model.rounds();
  manifest["combiner_mode"] = combiner_mode_name(model.combiner_mode);
  manifest["weights"] = model.weights;
  manifest["feature_spec"] = {{"name", model.feature_spec.name},
                              {"channels", model.feature_spec.channels}};
  manifest["normalization"] = {{"channels", model.stats.channels},
                               {"mins", model.stats.mins},
                               {"maxs", model.stats.maxs},
                               {"target_min", model.stats.target_min},
                               {"target_max", model.stats.target_max}};
  json learners = json::array();
  for (int j = 0; j < model.rounds(); ++j) {
    learners.push_back(config_to_json(model.learners[static_cast<std::size_t>(j)].config()));
    save_params(learner_base(dir, j), model.learners[static_cast<std::size_t>(j)].params());
  }
  manifest["learners"] = learners;
  json trace = json::array();
  for (const auto& t : model.trace)
    trace.push_back({{"sum_errors", t.sum_errors}, {"weight", t.weight}});
  manifest["trace"] = trace;

  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw DataError("cannot write bundle manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

EnsembleModel load_bundle(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw DataError("cannot open bundle manifest in " + dir);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw DataError(dir + "/manifest.json: " + e.what());
  }
  if (manifest.value("format_version", -1) != kBundleFormatVersion)
    throw DataError(dir + ": unsupported bundle format version");

  EnsembleModel model;
  model.combiner_mode =
      combiner_mode_from_name(manifest.at("combiner_mode").get<std::string>());
  model.weights = manifest.at("weights").get<std::vector<double>>();
  model.feature_spec.name = manifest.at("feature_spec").at("name").get<std::string>();
  model.feature_spec.channels =
      manifest.at("feature_spec").at("channels").get<std::vector<std::string>>();
  const json& norm = manifest.at("normalization");
  model.stats.channels = norm.at("channels").get<std::vector<std::string>>();
  model.stats.mins = norm.at("mins").get<std::vector<double>>();
  model.stats.maxs = norm.at("maxs").get<std::vector<double>>();
  model.stats.target_min = norm.at("target_min").get<double>();
  model.stats.target_max = norm.at("target_max").get<double>();

  const int rounds = manifest.at("rounds").get<int>();
  const json& learners = manifest.at("learners");
  if (static_cast<int>(learners.size()) != rounds ||
      static_cast<int>(model.weights.size()) != rounds)
    throw DataError(dir + ": manifest round count inconsistent");
  for (int j = 0; j < rounds; ++j) {
    const LearnerConfig cfg = config_from_json(learners[static_cast<std::size_t>(j)]);
    model.learners.emplace_back(cfg, load_params(learner_base(dir, j), cfg));
  }
  for (const auto& t : manifest.at("trace")) {
    RoundTrace rt;
    rt.sum_errors = t.at("sum_errors").get<double>();
    rt.weight = t.at("weight").get<double>();
    model.trace.push_back(rt);
  }
  return model;
}

}  // namespace coincast
