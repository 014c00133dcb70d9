#pragma once

// Sigmoid classification head over frozen embeddings: class-weighted binary
// cross-entropy, Adam, early stopping, restarts and two-stage transfer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/detail/random.hpp"
#include "triage/detail/text_io.hpp"
#include "triage/embed.hpp"
#include "triage/error.hpp"
#include "triage/features.hpp"

namespace triage {

inline constexpr double kProbClamp = 1e-12;

struct HeadModel {
  std::vector<double> weights;
  double bias = 0.0;

  std::size_t dim() const { return weights.size(); }
  friend bool operator==(const HeadModel&, const HeadModel&) = default;
};

// Row-major embeddings with one binary label per row.
struct EmbeddingSet {
  std::size_t dim = 0;
  std::vector<double> data;
  std::vector<Severity> labels;
  std::vector<std::string> ids;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }

  void add(std::span<const double> x, Severity y, std::string id = {}) {
    if (empty() && data.empty()) dim = x.size();
    if (x.size() != dim) throw DataError("embedding set: inconsistent dimension");
    data.insert(data.end(), x.begin(), x.end());
    labels.push_back(y);
    ids.push_back(std::move(id));
  }

  std::size_t count(Severity s) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), s));
  }
};

// Joins a labeled corpus with its embedding rows by report id.
inline EmbeddingSet embedding_set(const Corpus& corpus, const EmbeddingMatrix& m) {
  EmbeddingSet set;
  set.dim = m.dim();
  for (const auto& r : corpus) set.add(m.row(r.report.id), r.label.binary, r.report.id);
  return set;
}

struct ClassWeights {
  double low = 1.0;
  double high = 1.0;
  double of(Severity s) const { return s == Severity::High ? high : low; }
};

// Inverse-frequency weights w_c = N / (2 N_c).
inline ClassWeights inverse_frequency_weights(const EmbeddingSet& train) {
  const double n = static_cast<double>(train.size());
  const double n_high = static_cast<double>(train.count(Severity::High));
  const double n_low = n - n_high;
  if (n_high == 0.0 || n_low == 0.0) throw DataError("class weights need both classes in the training split");
  return {n / (2.0 * n_low), n / (2.0 * n_high)};
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double head_logit(const HeadModel& m, std::span<const double> x) {
  if (x.size() != m.dim())
    throw DataError("head: embedding dim " + std::to_string(x.size()) + " does not match model dim " +
                    std::to_string(m.dim()));
  double z = m.bias;
  for (std::size_t k = 0; k < x.size(); ++k) z += m.weights[k] * x[k];
  return z;
}

inline double head_forward(const HeadModel& m, std::span<const double> x) { return sigmoid(head_logit(m, x)); }

// Mean over the batch of -w_y [y ln p + (1-y) ln(1-p)], p clamped to [1e-12, 1-1e-12].
inline double weighted_bce_loss(const HeadModel& m, const EmbeddingSet& set, std::span<const std::size_t> batch,
                                const ClassWeights& w) {
  if (batch.empty()) throw DataError("loss: empty batch");
  double total = 0.0;
  for (auto i : batch) {
    const double p = std::clamp(head_forward(m, set.row(i)), kProbClamp, 1.0 - kProbClamp);
    const bool high = set.labels[i] == Severity::High;
    total += -w.of(set.labels[i]) * (high ? std::log(p) : std::log(1.0 - p));
  }
  return total / static_cast<double>(batch.size());
}

inline double weighted_bce_loss(const HeadModel& m, const EmbeddingSet& set, const ClassWeights& w) {
  std::vector<std::size_t> all(set.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return weighted_bce_loss(m, set, all, w);
}

struct HeadGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

// Analytic gradient of weighted_bce_loss: mean of w_y (p - y) x.
inline HeadGradient bce_gradient(const HeadModel& m, const EmbeddingSet& set, std::span<const std::size_t> batch,
                                 const ClassWeights& w) {
  if (batch.empty()) throw DataError("gradient: empty batch");
  HeadGradient g{std::vector<double>(m.dim(), 0.0), 0.0};
  for (auto i : batch) {
    const auto x = set.row(i);
    const double p = head_forward(m, x);
    const double y = set.labels[i] == Severity::High ? 1.0 : 0.0;
    const double r = w.of(set.labels[i]) * (p - y);
    for (std::size_t k = 0; k < x.size(); ++k) g.weights[k] += r * x[k];
    g.bias += r;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : g.weights) v *= inv;
  g.bias *= inv;
  return g;
}

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<double> m;  // first moment; the bias occupies the last slot
  std::vector<double> v;  // second moment
  std::uint64_t step = 0;

  static AdamState zeros(std::size_t dim) { return {std::vector<double>(dim + 1, 0.0), std::vector<double>(dim + 1, 0.0), 0}; }
};

// Bias-corrected Adam update, in place.
inline void adam_update(AdamState& s, HeadModel& model, const HeadGradient& g, double lr) {
  const std::size_t d = model.dim();
  if (g.weights.size() != d || s.m.size() != d + 1 || s.v.size() != d + 1) throw DataError("adam: shape mismatch");
  ++s.step;
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(s.step));
  auto update = [&](std::size_t k, double grad, double& param) {
    s.m[k] = AdamState::kBeta1 * s.m[k] + (1.0 - AdamState::kBeta1) * grad;
    s.v[k] = AdamState::kBeta2 * s.v[k] + (1.0 - AdamState::kBeta2) * grad * grad;
    const double m_hat = s.m[k] / c1;
    const double v_hat = s.v[k] / c2;
    param -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
  };
  for (std::size_t k = 0; k < d; ++k) update(k, g.weights[k], model.weights[k]);
  update(d, g.bias, model.bias);
}

inline std::pair<AdamState, HeadModel> adam_step(AdamState state, HeadModel model, const HeadGradient& g, double lr) {
  adam_update(state, model, g, lr);
  return {std::move(state), std::move(model)};
}

struct TrainConfig {
  static constexpr double kSourceLearningRate = 1e-6;
  static constexpr double kTargetLearningRate = 1e-8;

  double learning_rate = kSourceLearningRate;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be >= 0");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
  }
};

struct TrainLog {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<std::optional<double>> val_f1;
  std::size_t selected_epoch = 0;
  std::size_t restart_index = 0;

  std::size_t epochs() const { return train_loss.size(); }
  friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

struct HeadTrainResult {
  HeadModel model;
  TrainLog log;
};

inline std::optional<double> head_f1(const HeadModel& m, const EmbeddingSet& set) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const bool p = head_logit(m, set.row(i)) > 0.0;
    const bool a = set.labels[i] == Severity::High;
    tp += p && a;
    fp += p && !a;
    fn += !p && a;
  }
  if (2 * tp + fp + fn == 0) return std::nullopt;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

inline HeadModel random_head(std::size_t dim, std::uint64_t seed) {
  detail::Rng rng(detail::derive_seed(seed, 0x1A17));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  HeadModel m{std::vector<double>(dim), 0.0};
  for (auto& w : m.weights) w = detail::uniform(rng, -scale, scale);
  return m;
}

// Mini-batch Adam with a seeded shuffle each epoch; stops after `patience`
// epochs without a strict validation-loss improvement and returns the
// parameters of the best-validation-loss epoch.
inline HeadTrainResult train_head(const EmbeddingSet& train, const EmbeddingSet& val, const TrainConfig& cfg,
                                  const std::optional<HeadModel>& init = std::nullopt,
                                  std::size_t restart_index = 0) {
  cfg.validate();
  if (train.empty()) throw DataError("train_head: empty training set");
  if (val.empty()) throw DataError("train_head: empty validation set");
  if (train.count(Severity::High) == 0 || train.count(Severity::Low) == 0)
    throw DataError("train_head: training set must contain both classes");
  if (val.dim != train.dim) throw DataError("train_head: train/val embedding dims differ");
  if (init && init->dim() != train.dim) throw DataError("train_head: initial model dim differs from embeddings");
  for (double v : train.data)
    if (!std::isfinite(v)) throw NumericError("train_head: non-finite embedding value");

  const ClassWeights weights = inverse_frequency_weights(train);
  HeadModel model = init ? *init : random_head(train.dim, cfg.seed);
  AdamState adam = AdamState::zeros(train.dim);
  detail::Rng rng(detail::derive_seed(cfg.seed, 0x5F1E));

  HeadTrainResult best{model, {}};
  best.log.restart_index = restart_index;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    detail::shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      adam_update(adam, model, bce_gradient(model, train, batch, weights), cfg.learning_rate);
    }
    for (double w : model.weights)
      if (!std::isfinite(w)) throw NumericError("train_head: parameters diverged");

    const double tl = weighted_bce_loss(model, train, weights);
    const double vl = weighted_bce_loss(model, val, weights);
    best.log.train_loss.push_back(tl);
    best.log.val_loss.push_back(vl);
    best.log.val_f1.push_back(head_f1(model, val));
    if (vl < best_val) {
      best_val = vl;
      best.model = model;
      best.log.selected_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return best;
}

// Highest validation positive-class F1; ties go to the lowest index.
inline std::size_t select_best_restart(std::span<const HeadTrainResult> results, const EmbeddingSet& val) {
  if (results.empty()) throw DataError("select_best_restart: no results");
  std::size_t best = 0;
  double best_f1 = -1.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double f1 = head_f1(results[i].model, val).value_or(0.0);
    if (f1 > best_f1) {
      best_f1 = f1;
      best = i;
    }
  }
  return best;
}

inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  return restart == 0 ? seed : detail::derive_seed(seed, 0xBE57 + restart);
}

struct RestartResult {
  std::vector<HeadTrainResult> runs;
  std::size_t best = 0;
  const HeadTrainResult& selected() const { return runs[best]; }
};

// cfg.restarts independent random initializations, best chosen on val F1.
inline RestartResult train_head_restarts(const EmbeddingSet& train, const EmbeddingSet& val, const TrainConfig& cfg) {
  cfg.validate();
  RestartResult out;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    TrainConfig c = cfg;
    c.seed = restart_seed(cfg.seed, r);
    out.runs.push_back(train_head(train, val, c, std::nullopt, r));
  }
  out.best = select_best_restart(out.runs, val);
  return out;
}

struct TransferResult {
  HeadModel model;
  TrainLog source_log;
  TrainLog target_log;
};

// Stage 1 trains on the source split; stage 2 continues from the stage-1
// model on the target split. Class weights are recomputed per stage.
inline TransferResult transfer_train(const EmbeddingSet& source_train, const EmbeddingSet& source_val,
                                     const EmbeddingSet& target_train, const EmbeddingSet& target_val,
                                     const TrainConfig& cfg_source, const TrainConfig& cfg_target,
                                     std::size_t restart_index = 0) {
  if (source_train.dim != target_train.dim || source_val.dim != source_train.dim ||
      target_val.dim != target_train.dim)
    throw DataError("transfer: source and target embedding dims differ");
  HeadTrainResult stage1;
  try {
    stage1 = train_head(source_train, source_val, cfg_source, std::nullopt, restart_index);
  } catch (const DataError& e) {
    throw DataError(std::string("transfer source stage: ") + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string("transfer source stage: ") + e.what());
  }
  HeadTrainResult stage2;
  try {
    stage2 = train_head(target_train, target_val, cfg_target, stage1.model, restart_index);
  } catch (const DataError& e) {
    throw DataError(std::string("transfer target stage: ") + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string("transfer target stage: ") + e.what());
  }
  return {std::move(stage2.model), std::move(stage1.log), std::move(stage2.log)};
}

struct TransferRestartResult {
  std::vector<TransferResult> runs;
  std::size_t best = 0;
  const TransferResult& selected() const { return runs[best]; }
};

// Restarts re-run both stages with a fresh head initialization; selection
// uses target validation F1.
inline TransferRestartResult transfer_train_restarts(const EmbeddingSet& source_train, const EmbeddingSet& source_val,
                                                     const EmbeddingSet& target_train, const EmbeddingSet& target_val,
                                                     const TrainConfig& cfg_source, const TrainConfig& cfg_target) {
  cfg_source.validate();
  TransferRestartResult out;
  std::vector<HeadTrainResult> as_heads;
  for (std::size_t r = 0; r < cfg_source.restarts; ++r) {
    TrainConfig s = cfg_source, t = cfg_target;
    s.seed = restart_seed(cfg_source.seed, r);
    t.seed = restart_seed(cfg_target.seed, r);
    out.runs.push_back(transfer_train(source_train, source_val, target_train, target_val, s, t, r));
    as_heads.push_back({out.runs.back().model, out.runs.back().target_log});
  }
  out.best = select_best_restart(as_heads, target_val);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
//
//   headv1
//   dim <d>
//   bias <b>
//   seed <s>
//   provenance <free text>
//   weights <w1> <w2> ... <wd>

inline std::string head_to_text(const HeadModel& m, std::string_view provenance, std::uint64_t seed) {
  std::string out = "headv1\n";
  out += "dim " + std::to_string(m.dim()) + "\n";
  out += "bias " + detail::format_double(m.bias) + "\n";
  out += "seed " + std::to_string(seed) + "\n";
  out += "provenance " + std::string(provenance.empty() ? "-" : provenance) + "\n";
  out += "weights";
  for (double w : m.weights) out += " " + detail::format_double(w);
  out += '\n';
  return out;
}

struct StoredHead {
  HeadModel model;
  std::string provenance;
  std::uint64_t seed = 0;
};

inline StoredHead read_head(detail::LineReader& in) {
  in.expect_literal("headv1");
  StoredHead h;
  const std::size_t dim = in.keyed_size("dim");
  h.model.bias = in.keyed_double("bias");
  h.seed = in.keyed_size("seed");
  h.provenance = std::string(in.keyed("provenance"));
  const std::string& line = in.next();
  const auto fields = detail::split_ws(line);
  if (fields.empty() || fields[0] != "weights" || fields.size() != dim + 1) in.fail("expected 'weights' with dim values");
  for (std::size_t k = 1; k < fields.size(); ++k) {
    double v = 0;
    if (!detail::parse_double(fields[k], v) || !std::isfinite(v)) in.fail("invalid weight");
    h.model.weights.push_back(v);
  }
  return h;
}

inline void save_head(const HeadModel& m, const std::filesystem::path& path, std::string_view provenance,
                      std::uint64_t seed) {
  detail::write_file_atomic(path, head_to_text(m, provenance, seed));
}

inline StoredHead load_head(const std::filesystem::path& path) {
  detail::LineReader in(detail::read_lines(path), path.string());
  return read_head(in);
}

inline std::string train_log_to_text(const TrainLog& log, std::string_view stage) {
  std::string out = "trainlog v1\n";
  out += "stage " + std::string(stage) + "\n";
  out += "restart " + std::to_string(log.restart_index) + "\n";
  out += "selected_epoch " + std::to_string(log.selected_epoch) + "\n";
  out += "epoch\ttrain_loss\tval_loss\tval_f1\n";
  for (std::size_t e = 0; e < log.epochs(); ++e) {
    out += std::to_string(e) + "\t" + detail::format_double(log.train_loss[e]) + "\t" +
           detail::format_double(log.val_loss[e]) + "\t" +
           (log.val_f1[e] ? detail::format_double(*log.val_f1[e]) : std::string("undefined")) + "\n";
  }
  return out;
}

}  // namespace triage
