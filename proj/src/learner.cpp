#include "coincast/learner.hpp"

#include <cmath>

#include "coincast/errors.hpp"
#include "coincast/rng.hpp"

namespace coincast {

std::string dropout_site_name(DropoutSite site) {
  switch (site) {
    case DropoutSite::kNone: return "none";
    case DropoutSite::kRecurrentLastHidden: return "recurrent_last_hidden";
    case DropoutSite::kFc1Output: return "fc1_output";
  }
  throw ConfigError("invalid dropout site");
}

DropoutSite dropout_site_from_name(const std::string& name) {
  if (name == "none") return DropoutSite::kNone;
  if (name == "recurrent_last_hidden") return DropoutSite::kRecurrentLastHidden;
  if (name == "fc1_output") return DropoutSite::kFc1Output;
  throw ConfigError("unknown dropout site '" + name + "'");
}

void LearnerConfig::validate() const {
  if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
  if (hidden < 1 || fc1 < 1) throw ConfigError("hidden and fc1 sizes must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (!(dropout_rate >= 0 && dropout_rate < 1))
    throw ConfigError("dropout_rate must be in [0, 1)");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (dropout_site == DropoutSite::kNone && dropout_rate != 0)
    throw ConfigError("dropout_rate set but dropout_site is none");
}

LstmParams LstmParams::zeros(const LearnerConfig& cfg) {
  LstmParams p;
  p.w_ih = Eigen::MatrixXd::Zero(4 * cfg.hidden, cfg.input_dim);
  p.w_hh = Eigen::MatrixXd::Zero(4 * cfg.hidden, cfg.hidden);
  p.b_gates = Eigen::MatrixXd::Zero(4 * cfg.hidden, 1);
  p.fc1_w = Eigen::MatrixXd::Zero(cfg.fc1, cfg.hidden);
  p.fc1_b = Eigen::MatrixXd::Zero(cfg.fc1, 1);
  p.out_w = Eigen::MatrixXd::Zero(1, cfg.fc1);
  p.out_b = Eigen::MatrixXd::Zero(1, 1);
  return p;
}

const std::array<const char*, 7>& LstmParams::tensor_names() {
  static const std::array<const char*, 7> names = {
      "w_ih", "w_hh", "b_gates", "fc1_w", "fc1_b", "out_w", "out_b"};
  return names;
}

std::array<Eigen::MatrixXd*, 7> LstmParams::tensors() {
  return {&w_ih, &w_hh, &b_gates, &fc1_w, &fc1_b, &out_w, &out_b};
}

std::array<const Eigen::MatrixXd*, 7> LstmParams::tensors() const {
  return {&w_ih, &w_hh, &b_gates, &fc1_w, &fc1_b, &out_w, &out_b};
}

void LstmParams::set_zero() {
  for (auto* t : tensors()) t->setZero();
}

bool LstmParams::all_finite() const {
  for (const auto* t : tensors())
    if (!t->allFinite()) return false;
  return true;
}

namespace {

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

struct ForwardCache {
  std::vector<Eigen::MatrixXd> x;            // T of D x K
  std::vector<Eigen::ArrayXXd> i, f, g, o;   // T of H x K
  std::vector<Eigen::ArrayXXd> c, tanh_c;    // T of H x K
  std::vector<Eigen::MatrixXd> h;            // T of H x K
  Eigen::MatrixXd h_last_dropped;            // H x K
  Eigen::MatrixXd a1;                        // F x K
  Eigen::MatrixXd fc1_dropped;               // F x K
  Eigen::RowVectorXd y;                      // 1 x K
};

void forward(const LearnerConfig& cfg, const LstmParams& p,
             const std::vector<const Eigen::MatrixXd*>& windows,
             const DropoutMasks* masks, ForwardCache& cache) {
  const int H = cfg.hidden;
  const int T = cfg.window;
  const int K = static_cast<int>(windows.size());

  cache.x.resize(T);
  cache.i.resize(T);
  cache.f.resize(T);
  cache.g.resize(T);
  cache.o.resize(T);
  cache.c.resize(T);
  cache.tanh_c.resize(T);
  cache.h.resize(T);

  for (int t = 0; t < T; ++t) {
    cache.x[t].resize(cfg.input_dim, K);
    for (int k = 0; k < K; ++k) {
      const Eigen::MatrixXd& w = *windows[k];
      if (w.rows() != T || w.cols() != cfg.input_dim)
        throw DataError("window shape mismatch: expected " + std::to_string(T) +
                        "x" + std::to_string(cfg.input_dim) + ", got " +
                        std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
      cache.x[t].col(k) = w.row(t).transpose();
    }
    if (!cache.x[t].allFinite()) throw DataError("non-finite entry in input window");
  }

  Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(H, K);
  Eigen::ArrayXXd c_prev = Eigen::ArrayXXd::Zero(H, K);
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd z = p.w_ih * cache.x[t] + p.w_hh * h_prev;
    z.colwise() += Eigen::VectorXd(p.b_gates.col(0));
    cache.i[t] = sigmoid(z.topRows(H).array());
    cache.f[t] = sigmoid(z.middleRows(H, H).array());
    cache.g[t] = z.middleRows(2 * H, H).array().tanh();
    cache.o[t] = sigmoid(z.bottomRows(H).array());
    cache.c[t] = cache.f[t] * c_prev + cache.i[t] * cache.g[t];
    cache.tanh_c[t] = cache.c[t].tanh();
    cache.h[t] = (cache.o[t] * cache.tanh_c[t]).matrix();
    h_prev = cache.h[t];
    c_prev = cache.c[t];
  }

  cache.h_last_dropped = cache.h[T - 1];
  if (masks && masks->hidden.size() > 0)
    cache.h_last_dropped = cache.h_last_dropped.cwiseProduct(masks->hidden);

  cache.a1 = p.fc1_w * cache.h_last_dropped;
  cache.a1.colwise() += Eigen::VectorXd(p.fc1_b.col(0));
  cache.fc1_dropped = cache.a1.cwiseMax(0.0);
  if (masks && masks->fc1.size() > 0)
    cache.fc1_dropped = cache.fc1_dropped.cwiseProduct(masks->fc1);

  cache.y = (p.out_w * cache.fc1_dropped).row(0);
  cache.y.array() += p.out_b(0, 0);
}

}  // namespace

double batch_loss(const LearnerConfig& cfg, const LstmParams& params,
                  const std::vector<const Eigen::MatrixXd*>& windows,
                  const Eigen::VectorXd& targets, const DropoutMasks* masks,
                  LstmParams* grads) {
  const int H = cfg.hidden;
  const int T = cfg.window;
  const int K = static_cast<int>(windows.size());
  if (K == 0) throw TrainError("batch_loss: empty batch");
  if (targets.size() != K) throw TrainError("batch_loss: target count mismatch");

  ForwardCache cache;
  forward(cfg, params, windows, masks, cache);

  const Eigen::RowVectorXd residual = cache.y - targets.transpose();
  const double loss = residual.squaredNorm() / static_cast<double>(K);
  if (!grads) return loss;

  grads->set_zero();
  const Eigen::RowVectorXd dy = residual * (2.0 / static_cast<double>(K));

  grads->out_w = dy * cache.fc1_dropped.transpose();
  grads->out_b(0, 0) = dy.sum();

  Eigen::MatrixXd d_fc1_dropped = params.out_w.transpose() * dy;  // F x K
  if (masks && masks->fc1.size() > 0)
    d_fc1_dropped = d_fc1_dropped.cwiseProduct(masks->fc1);
  const Eigen::MatrixXd da1 =
      d_fc1_dropped.cwiseProduct((cache.a1.array() > 0.0).cast<double>().matrix());

  grads->fc1_w = da1 * cache.h_last_dropped.transpose();
  grads->fc1_b.col(0) = da1.rowwise().sum();

  Eigen::MatrixXd dh = params.fc1_w.transpose() * da1;  // H x K
  if (masks && masks->hidden.size() > 0) dh = dh.cwiseProduct(masks->hidden);

  Eigen::ArrayXXd dh_arr = dh.array();
  Eigen::ArrayXXd dc = Eigen::ArrayXXd::Zero(H, K);
  Eigen::MatrixXd dz(4 * H, K);
  for (int t = T - 1; t >= 0; --t) {
    const auto& i = cache.i[t];
    const auto& f = cache.f[t];
    const auto& g = cache.g[t];
    const auto& o = cache.o[t];
    const auto& tc = cache.tanh_c[t];

    const Eigen::ArrayXXd do_ = dh_arr * tc;
    dc += dh_arr * o * (1.0 - tc.square());
    const Eigen::ArrayXXd di = dc * g;
    const Eigen::ArrayXXd dg = dc * i;
    const Eigen::ArrayXXd c_prev =
        t > 0 ? cache.c[t - 1] : Eigen::ArrayXXd::Zero(H, K);
    const Eigen::ArrayXXd df = dc * c_prev;

    dz.topRows(H) = (di * i * (1.0 - i)).matrix();
    dz.middleRows(H, H) = (df * f * (1.0 - f)).matrix();
    dz.middleRows(2 * H, H) = (dg * (1.0 - g.square())).matrix();
    dz.bottomRows(H) = (do_ * o * (1.0 - o)).matrix();

    const Eigen::MatrixXd h_prev =
        t > 0 ? cache.h[t - 1] : Eigen::MatrixXd::Zero(H, K);
    grads->w_ih += dz * cache.x[t].transpose();
    grads->w_hh += dz * h_prev.transpose();
    grads->b_gates.col(0) += dz.rowwise().sum();

    dh_arr = (params.w_hh.transpose() * dz).array();
    dc *= f;
  }
  return loss;
}

LstmParams init_params(const LearnerConfig& cfg) {
  auto rng = make_rng(cfg.seed, SeedStream::kLearnerInit);
  LstmParams p = LstmParams::zeros(cfg);
  const double k_rec = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
  const double k_out = 1.0 / std::sqrt(static_cast<double>(cfg.fc1));
  auto fill = [&rng](Eigen::MatrixXd& m, double k) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        m(r, c) = uniform_range(rng, -k, k);
  };
  fill(p.w_ih, k_rec);
  fill(p.w_hh, k_rec);
  fill(p.fc1_w, k_rec);
  fill(p.out_w, k_out);
  // forget-gate bias starts open
  p.b_gates.col(0).segment(cfg.hidden, cfg.hidden).setOnes();
  return p;
}

WeakLearner::WeakLearner(LearnerConfig config, LstmParams params, TrainingLog log)
    : config_(std::move(config)), params_(std::move(params)), log_(std::move(log)) {}

double WeakLearner::predict(const Eigen::MatrixXd& window) const {
  ForwardCache cache;
  const std::vector<const Eigen::MatrixXd*> batch = {&window};
  forward(config_, params_, batch, nullptr, cache);
  return cache.y(0);
}

std::vector<double> WeakLearner::predict_all(const Dataset& samples) const {
  ForwardCache cache;
  std::vector<double> out;
  out.reserve(samples.size());
  // chunked so big datasets keep reasonable batch shapes
  const std::size_t chunk = 256;
  for (std::size_t base = 0; base < samples.size(); base += chunk) {
    const std::size_t n = std::min(chunk, samples.size() - base);
    std::vector<const Eigen::MatrixXd*> batch(n);
    for (std::size_t k = 0; k < n; ++k) batch[k] = &samples[base + k].X;
    forward(config_, params_, batch, nullptr, cache);
    for (std::size_t k = 0; k < n; ++k) out.push_back(cache.y(static_cast<int>(k)));
  }
  return out;
}

namespace {

struct AdamState {
  LstmParams m, v;
  long long step = 0;
};

void adam_update(const LearnerConfig& cfg, LstmParams& params,
                 const LstmParams& grads, AdamState& state) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t t = 0; t < p.size(); ++t) {
    m[t]->array() = beta1 * m[t]->array() + (1.0 - beta1) * g[t]->array();
    v[t]->array() = beta2 * v[t]->array() + (1.0 - beta2) * g[t]->array().square();
    p[t]->array() -= cfg.learning_rate * (m[t]->array() / bc1) /
                     ((v[t]->array() / bc2).sqrt() + eps);
  }
}

DropoutMasks sample_masks(const LearnerConfig& cfg, int batch,
                          std::mt19937_64& rng) {
  DropoutMasks masks;
  if (cfg.dropout_site == DropoutSite::kNone || cfg.dropout_rate == 0.0)
    return masks;
  const double keep = 1.0 - cfg.dropout_rate;
  const int rows = cfg.dropout_site == DropoutSite::kRecurrentLastHidden
                       ? cfg.hidden
                       : cfg.fc1;
  Eigen::MatrixXd mask(rows, batch);
  for (int c = 0; c < batch; ++c)
    for (int r = 0; r < rows; ++r)
      mask(r, c) = uniform01(rng) < keep ? 1.0 / keep : 0.0;
  if (cfg.dropout_site == DropoutSite::kRecurrentLastHidden)
    masks.hidden = std::move(mask);
  else
    masks.fc1 = std::move(mask);
  return masks;
}

double validation_mae(const WeakLearner& learner, const Dataset& val) {
  const std::vector<double> preds = learner.predict_all(val);
  double sum = 0;
  for (std::size_t i = 0; i < val.size(); ++i)
    sum += std::abs(preds[i] - val[i].y);
  return sum / static_cast<double>(val.size());
}

}  // namespace

WeakLearner train_learner(const Dataset& train, const Dataset& val,
                          const LearnerConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw TrainError("train_learner: empty training set");
  for (const auto& s : train)
    if (s.X.rows() != cfg.window || s.X.cols() != cfg.input_dim)
      throw TrainError("train_learner: sample dimension mismatch");

  LstmParams params = init_params(cfg);
  AdamState adam{LstmParams::zeros(cfg), LstmParams::zeros(cfg), 0};
  LstmParams grads = LstmParams::zeros(cfg);
  TrainingLog log;

  auto shuffle_rng = make_rng(cfg.seed, SeedStream::kLearnerShuffle);
  auto dropout_rng = make_rng(cfg.seed, SeedStream::kLearnerDropout);

  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  Eigen::VectorXd targets;
  std::vector<const Eigen::MatrixXd*> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own uniform draws, for stable determinism
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(uniform01(shuffle_rng) * static_cast<double>(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }

    double epoch_loss = 0;
    std::size_t batches = 0;
    for (std::size_t base = 0; base < n; base += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t k = std::min(static_cast<std::size_t>(cfg.batch_size), n - base);
      batch.resize(k);
      targets.resize(static_cast<int>(k));
      for (std::size_t idx = 0; idx < k; ++idx) {
        batch[idx] = &train[order[base + idx]].X;
        targets(static_cast<int>(idx)) = train[order[base + idx]].y;
      }
      const DropoutMasks masks = sample_masks(cfg, static_cast<int>(k), dropout_rng);
      const double loss = batch_loss(cfg, params, batch, targets, &masks, &grads);
      if (!std::isfinite(loss) || !grads.all_finite())
        throw TrainError("non-finite loss at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batches));
      adam_update(cfg, params, grads, adam);
      epoch_loss += loss;
      ++batches;
    }
    log.train_loss.push_back(epoch_loss / static_cast<double>(batches));

    if (!val.empty() && (epoch + 1) % 10 == 0) {
      const WeakLearner probe(cfg, params);
      log.val_mae.emplace_back(epoch + 1, validation_mae(probe, val));
    }
  }
  return WeakLearner(cfg, std::move(params), std::move(log));
}

}  // namespace coincast
