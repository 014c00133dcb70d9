#pragma once

// Desk-scale two-institution experiment on synthetic corpora: an in-domain
// TF-IDF SVM, a source-trained head, a target-only head and a transfer head,
// each scored by AUROC on both institutions' test splits.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/embed.hpp"
#include "triage/eval.hpp"
#include "triage/features.hpp"
#include "triage/head.hpp"
#include "triage/svm.hpp"
#include "triage/textprep.hpp"

namespace triage {

struct ExperimentConfig {
  std::size_t seeds = 10;
  std::uint64_t base_seed = 0;

  SyntheticSpec source{1500, 0.20, 0.0, 0.05, 44, 0};
  SyntheticSpec target{250, 0.34, 0.5, 0.05, 71, 0};
  SplitSpec source_split{0.70, 0.15, 0.15, 0, true};
  SplitSpec target_split{0.20, 0.20, 0.60, 0, true};  // 50 target training reports at n=250

  std::size_t token_cap = kDefaultTokenCap;
  std::size_t svm_min_df = 10;
  std::vector<double> c_grid = default_c_grid();

  std::size_t embed_dim = 256;
  std::size_t embed_min_df = 2;

  // Rates sized for a linear head on frozen unit-scale embeddings.
  double source_lr = 1e-2;
  double target_lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::size_t restarts = 3;

  void validate() const {
    if (seeds < 1) throw ConfigError("experiment needs at least one seed");
    source.validate();
    target.validate();
    source_split.validate();
    target_split.validate();
  }
};

inline const std::vector<std::string>& experiment_arms() {
  static const std::vector<std::string> arms = {"svm-source", "head-source", "head-target-only", "head-transfer"};
  return arms;
}

struct ExperimentRun {
  std::uint64_t seed = 0;
  // arm -> {AUROC on source test, AUROC on target test}
  std::map<std::string, std::pair<double, double>> auroc;
  double svm_c = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRun> runs;

  double mean(const std::string& arm, bool target_test) const {
    double s = 0.0;
    for (const auto& r : runs) {
      const auto& p = r.auroc.at(arm);
      s += target_test ? p.second : p.first;
    }
    return s / static_cast<double>(runs.size());
  }
};

namespace detail {

inline std::vector<double> head_scores(const HeadModel& m, const EmbeddingSet& set) {
  std::vector<double> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(head_logit(m, set.row(i)));
  return out;
}

inline std::vector<double> svm_scores(const SvmModel& m, std::span<const SparseVector> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(decision_score(m, x));
  return out;
}

inline std::vector<Severity> labels_of(const Corpus& c) {
  std::vector<Severity> out;
  out.reserve(c.size());
  for (const auto& r : c) out.push_back(r.label.binary);
  return out;
}

}  // namespace detail

inline ExperimentRun run_experiment_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  ExperimentRun run;
  run.seed = seed;

  SyntheticSpec a_spec = cfg.source, b_spec = cfg.target;
  a_spec.seed = detail::derive_seed(seed, 1);
  b_spec.seed = detail::derive_seed(seed, 2);
  const Corpus a = generate_synthetic_corpus(a_spec, Institution::A);
  const Corpus b = generate_synthetic_corpus(b_spec, Institution::B);
  SplitSpec a_split = cfg.source_split, b_split = cfg.target_split;
  a_split.seed = detail::derive_seed(seed, 3);
  b_split.seed = detail::derive_seed(seed, 4);
  const CorpusSplit as = split_corpus(a, a_split);
  const CorpusSplit bs = split_corpus(b, b_split);

  const auto dict = AcronymDictionary::builtin();
  auto prep = [&](const Corpus& c) { return preprocess_all(c, dict, cfg.token_cap); };
  const auto a_train = prep(as.train), a_val = prep(as.val), a_test = prep(as.test);
  const auto b_train = prep(bs.train), b_val = prep(bs.val), b_test = prep(bs.test);
  const auto ya_train = detail::labels_of(as.train), ya_val = detail::labels_of(as.val),
             ya_test = detail::labels_of(as.test), yb_test = detail::labels_of(bs.test);

  // In-domain SVM on source TF-IDF.
  {
    const TfidfModel tfidf = fit_tfidf(a_train, cfg.svm_min_df);
    const auto xtr = transform_tfidf(tfidf, std::span<const TokenSequence>(a_train));
    const auto xva = transform_tfidf(tfidf, std::span<const TokenSequence>(a_val));
    const auto xa = transform_tfidf(tfidf, std::span<const TokenSequence>(a_test));
    const auto xb = transform_tfidf(tfidf, std::span<const TokenSequence>(b_test));
    SvmConfig svm_cfg;
    svm_cfg.seed = detail::derive_seed(seed, 5);
    const auto tuned = tune_c(xtr, ya_train, xva, ya_val, cfg.c_grid, svm_cfg);
    run.svm_c = tuned.best_c;
    run.auroc["svm-source"] = {auroc_rank(detail::svm_scores(tuned.best_model, xa), ya_test),
                               auroc_rank(detail::svm_scores(tuned.best_model, xb), yb_test)};
  }

  // Frozen fallback embeddings shared by every head arm.
  std::vector<TokenSequence> fit_docs = a_train;
  fit_docs.insert(fit_docs.end(), b_train.begin(), b_train.end());
  const TfidfModel emb_vocab = fit_tfidf(fit_docs, cfg.embed_min_df);
  const FallbackEncoder enc(emb_vocab, cfg.embed_dim, detail::derive_seed(seed, 6));
  auto embed_set = [&](const Corpus& c, const std::vector<TokenSequence>& docs) {
    EmbeddingSet s;
    s.dim = cfg.embed_dim;
    for (std::size_t i = 0; i < c.size(); ++i) s.add(enc.embed(docs[i]), c[i].label.binary, c[i].report.id);
    return s;
  };
  const auto ea_train = embed_set(as.train, a_train), ea_val = embed_set(as.val, a_val),
             ea_test = embed_set(as.test, a_test);
  const auto eb_train = embed_set(bs.train, b_train), eb_val = embed_set(bs.val, b_val),
             eb_test = embed_set(bs.test, b_test);

  TrainConfig src;
  src.learning_rate = cfg.source_lr;
  src.batch_size = cfg.batch_size;
  src.max_epochs = cfg.max_epochs;
  src.patience = cfg.patience;
  src.restarts = cfg.restarts;
  src.seed = detail::derive_seed(seed, 7);
  TrainConfig tgt = src;
  tgt.learning_rate = cfg.target_lr;
  tgt.seed = detail::derive_seed(seed, 8);

  auto both = [&](const HeadModel& m) {
    return std::pair{auroc_rank(detail::head_scores(m, ea_test), ea_test.labels),
                     auroc_rank(detail::head_scores(m, eb_test), eb_test.labels)};
  };
  run.auroc["head-source"] = both(train_head_restarts(ea_train, ea_val, src).selected().model);

  TrainConfig tonly = src;
  tonly.seed = detail::derive_seed(seed, 9);
  run.auroc["head-target-only"] = both(train_head_restarts(eb_train, eb_val, tonly).selected().model);

  run.auroc["head-transfer"] =
      both(transfer_train_restarts(ea_train, ea_val, eb_train, eb_val, src, tgt).selected().model);
  return run;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult out;
  for (std::size_t s = 0; s < cfg.seeds; ++s) out.runs.push_back(run_experiment_seed(cfg, cfg.base_seed + s));
  return out;
}

inline std::string experiment_to_text(const ExperimentResult& r) {
  using detail::format_double;
  std::string out = "experiment v1\nseeds " + std::to_string(r.runs.size()) + "\n";
  out += "arm\tauroc_source_test\tauroc_target_test\n";
  for (const auto& arm : experiment_arms())
    out += arm + "\t" + format_double(r.mean(arm, false)) + "\t" + format_double(r.mean(arm, true)) + "\n";
  out += "per_seed\n";
  out += "seed\tarm\tauroc_source_test\tauroc_target_test\n";
  for (const auto& run : r.runs)
    for (const auto& arm : experiment_arms()) {
      const auto& p = run.auroc.at(arm);
      out += std::to_string(run.seed) + "\t" + arm + "\t" + format_double(p.first) + "\t" + format_double(p.second) +
             "\n";
    }
  return out;
}

}  // namespace triage
