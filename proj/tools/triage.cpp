// triage: command-line front end for the severity-triage library.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triage/triage.hpp"

namespace fs = std::filesystem;
using namespace triage;

namespace {

constexpr std::string_view kSvmBundleMagic = "triagesvm v1";

struct Globals {
  std::uint64_t seed = 0;
  std::string dict_path;  // empty: built-in glossary
  std::size_t cap = kDefaultTokenCap;
  bool quiet = false;
};

AcronymDictionary dictionary(const Globals& g) {
  return g.dict_path.empty() ? AcronymDictionary::builtin() : AcronymDictionary::load(g.dict_path);
}

void say(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cout << line << '\n';
}

Corpus load_labeled(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("corpus file not found: " + path.string());
  auto r = load_corpus(path);
  if (!r.unlabeled.empty())
    warn(path.string() + ": " + std::to_string(r.unlabeled.size()) + " unlabeled reports ignored");
  return std::move(r.labeled);
}

std::vector<Report> load_any_reports(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("report file not found: " + path.string());
  auto r = load_corpus(path);
  std::vector<Report> out;
  for (auto& l : r.labeled) out.push_back(std::move(l.report));
  for (auto& u : r.unlabeled) out.push_back(std::move(u));
  return out;
}

std::vector<Severity> labels_of(const Corpus& c) {
  std::vector<Severity> out;
  for (const auto& r : c) out.push_back(r.label.binary);
  return out;
}

// Concatenates embedding files; every file must share one dimension.
EmbeddingMatrix load_embeddings(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ConfigError("at least one --embeddings file is required");
  EmbeddingMatrix merged;
  bool first = true;
  for (const auto& p : paths) {
    const EmbeddingMatrix m = read_embeddings(p);
    if (first) {
      merged = EmbeddingMatrix(m.dim(), m.provenance());
      first = false;
    } else if (m.dim() != merged.dim()) {
      throw DataError(p + ": embedding dim " + std::to_string(m.dim()) + " differs from " +
                      std::to_string(merged.dim()));
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      merged.add_row(m.ids()[i], std::vector<double>(r.begin(), r.end()));
    }
  }
  return merged;
}

// ---------------------------------------------------------------------------
// SVM bundle: token cap, acronym table, TF-IDF model and SVM in one file.

struct SvmBundle {
  std::size_t cap = kDefaultTokenCap;
  AcronymDictionary dict;
  TfidfModel tfidf;
  SvmModel svm;
};

std::string bundle_to_text(const SvmBundle& b) {
  std::string out(kSvmBundleMagic);
  out += "\ncap " + std::to_string(b.cap) + "\n";
  out += "acronyms " + std::to_string(b.dict.size()) + "\n";
  for (const auto& e : b.dict.entries()) out += e.key + "\t" + e.expansion + "\n";
  out += tfidf_to_text(b.tfidf);
  out += svm_to_text(b.svm);
  return out;
}

SvmBundle load_bundle(const fs::path& path) {
  detail::LineReader in(detail::read_lines(path), path.string());
  in.expect_literal(kSvmBundleMagic);
  SvmBundle b;
  b.cap = in.keyed_size("cap");
  const std::size_t n = in.keyed_size("acronyms");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& line = in.next();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) in.fail("expected '<key>\\t<expansion>'");
    b.dict.add(line.substr(0, tab), line.substr(tab + 1));
  }
  b.tfidf = read_tfidf(in);
  b.svm = read_svm(in);
  if (b.svm.dim != b.tfidf.dim()) in.fail("svm dim does not match the tfidf vocabulary");
  return b;
}

enum class ModelKind { Svm, Head };

ModelKind sniff_model(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("model file not found: " + path.string());
  const auto lines = detail::read_lines(path);
  if (!lines.empty() && lines[0] == kSvmBundleMagic) return ModelKind::Svm;
  if (!lines.empty() && lines[0] == "headv1") return ModelKind::Head;
  throw DataError(path.string() + ": unrecognized model file");
}

// Scores reports with either model kind. Head models need embeddings for
// every report id.
std::vector<double> score_reports(const fs::path& model_path, const std::vector<Report>& reports,
                                  const std::vector<std::string>& embedding_paths) {
  std::vector<double> scores;
  if (sniff_model(model_path) == ModelKind::Svm) {
    const SvmBundle b = load_bundle(model_path);
    for (const auto& r : reports)
      scores.push_back(decision_score(b.svm, transform_tfidf(b.tfidf, preprocess(r, b.dict, b.cap))));
  } else {
    const StoredHead h = load_head(model_path);
    const EmbeddingMatrix m = load_embeddings(embedding_paths);
    if (m.dim() != h.model.dim())
      throw DataError("embedding dim " + std::to_string(m.dim()) + " does not match head dim " +
                      std::to_string(h.model.dim()));
    for (const auto& r : reports) scores.push_back(head_logit(h.model, m.row(r.id)));
  }
  for (double s : scores)
    if (!std::isfinite(s)) throw NumericError("non-finite model score");
  return scores;
}

// ---------------------------------------------------------------------------
// Commands

struct IngestArgs {
  std::string input, out, unlabeled_out, format = "jsonl", scale = "inst";
};

void cmd_ingest(const IngestArgs& a, const Globals& g) {
  const auto fmt = a.format == "csv" ? InputFormat::Csv : InputFormat::Jsonl;
  const Scale scale = *parse_scale(a.scale);
  const auto r = ingest_reports(a.input, fmt, scale);
  write_corpus(r.labeled, a.out);
  if (!a.unlabeled_out.empty()) detail::write_file_atomic(a.unlabeled_out, reports_to_jsonl(r.unlabeled));
  say(g, "labeled " + std::to_string(r.labeled.size()) + " unlabeled " + std::to_string(r.unlabeled.size()) +
             " high " + std::to_string(count_high(r.labeled)));
}

struct SplitArgs {
  std::string input, out_dir = ".";
  double train = 0.70, val = 0.15, test = 0.15;
  bool stratified = false;
};

void cmd_split(const SplitArgs& a, const Globals& g) {
  const Corpus c = load_labeled(a.input);
  const auto s = split_corpus(c, {a.train, a.val, a.test, g.seed, a.stratified});
  fs::create_directories(a.out_dir);
  write_corpus(s.train, fs::path(a.out_dir) / "train.jsonl");
  write_corpus(s.val, fs::path(a.out_dir) / "val.jsonl");
  write_corpus(s.test, fs::path(a.out_dir) / "test.jsonl");
  say(g, "train " + std::to_string(s.train.size()) + " val " + std::to_string(s.val.size()) + " test " +
             std::to_string(s.test.size()));
}

void cmd_stats(const std::string& input, const Globals& g) {
  const auto st = corpus_stats(load_labeled(input));
  say(g, "n_reports " + std::to_string(st.n_reports));
  say(g, "median_words " + detail::format_double(st.median_words));
  say(g, "std_words " + detail::format_double(st.std_words));
  say(g, "high_severity_frac " + detail::format_double(st.high_severity_frac));
}

struct SynthArgs {
  std::string out, institution = "A";
  SyntheticSpec spec;
};

void cmd_synth(SynthArgs a, const Globals& g) {
  a.spec.seed = g.seed;
  const Corpus c = generate_synthetic_corpus(a.spec, a.institution == "B" ? Institution::B : Institution::A);
  write_corpus(c, a.out);
  say(g, "generated " + std::to_string(c.size()) + " high " + std::to_string(count_high(c)));
}

struct PreprocessArgs {
  std::string input, export_text;
};

void cmd_preprocess(const PreprocessArgs& a, const Globals& g) {
  const auto reports = load_any_reports(a.input);
  const auto dict = dictionary(g);
  std::string out;
  for (const auto& seq : preprocess_all(reports, dict, g.cap)) {
    if (seq.source_id.find_first_of("\t\r\n") != std::string::npos)
      throw DataError("report id '" + seq.source_id + "' contains a tab or line break");
    out += seq.source_id + "\t";
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) out += (i ? " " : "") + seq.tokens[i];
    out += '\n';
  }
  detail::write_file_atomic(a.export_text, out);
  say(g, "exported " + std::to_string(reports.size()));
}

struct EmbedArgs {
  std::vector<std::string> fit, inputs;
  std::string out;
  std::size_t dim = 256, min_df = 2;
};

void cmd_embed_fallback(const EmbedArgs& a, const Globals& g) {
  const auto dict = dictionary(g);
  std::vector<TokenSequence> fit_docs;
  for (const auto& p : a.fit) {
    const auto docs = preprocess_all(load_any_reports(p), dict, g.cap);
    fit_docs.insert(fit_docs.end(), docs.begin(), docs.end());
  }
  const TfidfModel vocab = fit_tfidf(fit_docs, a.min_df);
  std::vector<TokenSequence> docs;
  for (const auto& p : a.inputs) {
    const auto d = preprocess_all(load_any_reports(p), dict, g.cap);
    docs.insert(docs.end(), d.begin(), d.end());
  }
  const auto m = project_fallback_embeddings(vocab, docs, a.dim, g.seed);
  write_embeddings(m, a.out);
  say(g, "embedded " + std::to_string(m.rows()) + " dim " + std::to_string(m.dim()));
}

struct SvmArgs {
  std::string train, val, out, log, kernel = "rbf";
  std::vector<double> c_grid;
  std::optional<double> gamma;
  std::size_t min_df = 10;
  double weight_high = 1.0;
};

void cmd_train_svm(const SvmArgs& a, const Globals& g) {
  const auto dict = dictionary(g);
  const Corpus train = load_labeled(a.train), val = load_labeled(a.val);
  const auto train_docs = preprocess_all(train, dict, g.cap), val_docs = preprocess_all(val, dict, g.cap);
  const TfidfModel tfidf = fit_tfidf(train_docs, a.min_df);
  const auto xtr = transform_tfidf(tfidf, std::span<const TokenSequence>(train_docs));
  const auto xva = transform_tfidf(tfidf, std::span<const TokenSequence>(val_docs));
  SvmConfig cfg;
  cfg.kernel = {a.kernel == "linear" ? KernelKind::Linear : KernelKind::Rbf, a.gamma};
  cfg.seed = g.seed;
  cfg.weight_high = a.weight_high;
  cfg.validate();
  const auto tuned = tune_c(xtr, labels_of(train), xva, labels_of(val), a.c_grid.empty() ? default_c_grid() : a.c_grid,
                            cfg);
  detail::write_file_atomic(a.out, bundle_to_text({g.cap, dict, tfidf, tuned.best_model}));
  if (!a.log.empty()) {
    std::string log = "svmlog v1\nvocabulary " + std::to_string(tfidf.dim()) + "\nbest_c " +
                      detail::format_double(tuned.best_c) + "\nC\tval_f1\terror\n";
    for (const auto& row : tuned.table)
      log += detail::format_double(row.C) + "\t" + (row.f1 ? detail::format_double(*row.f1) : "undefined") + "\t" +
             (row.error.empty() ? "-" : row.error) + "\n";
    detail::write_file_atomic(a.log, log);
  }
  say(g, "best_c " + detail::format_double(tuned.best_c) + " support_vectors " +
             std::to_string(tuned.best_model.support_vectors.size()));
}

struct HeadArgs {
  std::string train, val, out, log;
  std::vector<std::string> embeddings;
  TrainConfig cfg;
};

std::string restart_table(const std::vector<HeadTrainResult>& runs, const EmbeddingSet& val, std::size_t best) {
  std::string out = "restarts " + std::to_string(runs.size()) + "\nselected " + std::to_string(best) +
                    "\nrestart\tval_f1\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto f = head_f1(runs[r].model, val);
    out += std::to_string(r) + "\t" + (f ? detail::format_double(*f) : "undefined") + "\n";
  }
  return out;
}

void cmd_train_head(HeadArgs a, const Globals& g) {
  const EmbeddingMatrix emb = load_embeddings(a.embeddings);
  const auto train = embedding_set(load_labeled(a.train), emb);
  const auto val = embedding_set(load_labeled(a.val), emb);
  a.cfg.seed = g.seed;
  const auto res = train_head_restarts(train, val, a.cfg);
  save_head(res.selected().model, a.out, emb.provenance(), g.seed);
  if (!a.log.empty())
    detail::write_file_atomic(a.log, restart_table(res.runs, val, res.best) +
                                         train_log_to_text(res.selected().log, "single"));
  say(g, "selected restart " + std::to_string(res.best) + " epoch " +
             std::to_string(res.selected().log.selected_epoch));
}

struct TransferArgs {
  std::string source_train, source_val, target_train, target_val, out, log;
  std::vector<std::string> embeddings;
  TrainConfig source, target;
};

void cmd_transfer(TransferArgs a, const Globals& g) {
  const EmbeddingMatrix emb = load_embeddings(a.embeddings);
  const auto st = embedding_set(load_labeled(a.source_train), emb);
  const auto sv = embedding_set(load_labeled(a.source_val), emb);
  const auto tt = embedding_set(load_labeled(a.target_train), emb);
  const auto tv = embedding_set(load_labeled(a.target_val), emb);
  a.source.seed = g.seed;
  a.target.seed = detail::derive_seed(g.seed, 0x7A26);
  a.target.batch_size = a.source.batch_size;
  a.target.max_epochs = a.source.max_epochs;
  a.target.patience = a.source.patience;
  a.target.restarts = a.source.restarts;
  const auto res = transfer_train_restarts(st, sv, tt, tv, a.source, a.target);
  save_head(res.selected().model, a.out, emb.provenance(), g.seed);
  if (!a.log.empty()) {
    std::vector<HeadTrainResult> as_heads;
    for (const auto& r : res.runs) as_heads.push_back({r.model, r.target_log});
    detail::write_file_atomic(a.log, restart_table(as_heads, tv, res.best) +
                                         train_log_to_text(res.selected().source_log, "source") +
                                         train_log_to_text(res.selected().target_log, "target"));
  }
  say(g, "selected restart " + std::to_string(res.best));
}

struct EvalArgs {
  std::string model, test, out, roc_csv;
  std::vector<std::string> embeddings;
  std::vector<double> alert_rates;
};

void cmd_evaluate(const EvalArgs& a, const Globals& g) {
  const Corpus test = load_labeled(a.test);
  std::vector<Report> reports;
  std::vector<std::string> ids;
  for (const auto& r : test) {
    reports.push_back(r.report);
    ids.push_back(r.report.id);
  }
  const auto scores = score_reports(a.model, reports, a.embeddings);
  const auto labels = labels_of(test);
  const std::vector<double> rates = a.alert_rates.empty() ? std::vector<double>{0.20, 0.50} : a.alert_rates;
  const auto report = evaluate_scores(scores, labels, rates, 0.0, ids);
  detail::write_file_atomic(a.out, metric_report_to_text(report));
  if (!a.roc_csv.empty()) detail::write_file_atomic(a.roc_csv, roc_to_csv(roc_curve(scores, labels)));
  say(g, "auroc " + detail::format_double(report.auroc));
}

struct TriageArgs {
  std::string model, input, out;
  std::vector<std::string> embeddings;
  double alert_rate = 0.20;
};

void cmd_triage(const TriageArgs& a, const Globals& g) {
  const auto reports = load_any_reports(a.input);
  if (reports.empty()) {
    detail::write_file_atomic(a.out, "");
    say(g, "flagged 0 of 0");
    return;
  }
  const auto scores = score_reports(a.model, reports, a.embeddings);
  std::vector<std::string> ids;
  for (const auto& r : reports) ids.push_back(r.id);
  const auto sel = threshold_for_alert_rate(scores, a.alert_rate, ids);
  std::vector<char> flagged(reports.size(), 0);
  for (auto i : sel.flagged) flagged[i] = 1;
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return ids[x] < ids[y];
  });
  std::string out = "id,score,flag\n";
  for (auto i : order) {
    const bool quote = ids[i].find_first_of(",\"\r\n") != std::string::npos;
    std::string id = ids[i];
    if (quote) {
      std::string q = "\"";
      for (char c : id) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      id = q + "\"";
    }
    out += id + "," + detail::format_double(scores[i]) + "," + (flagged[i] ? "1" : "0") + "\n";
  }
  detail::write_file_atomic(a.out, out);
  say(g, "flagged " + std::to_string(sel.k) + " of " + std::to_string(reports.size()));
}

struct ReproArgs {
  std::string out;
  ExperimentConfig cfg;
};

void cmd_repro(ReproArgs a, const Globals& g) {
  a.cfg.base_seed = g.seed;
  const std::string text = experiment_to_text(run_experiment(a.cfg));
  if (!a.out.empty()) detail::write_file_atomic(a.out, text);
  if (!g.quiet) std::cout << text;
}

int run(int argc, char** argv) {
  CLI::App app{"Incident-report severity triage"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key = value config file (flags override it)");

  Globals g;
  app.add_option("--seed", g.seed, "Global seed")->envname("TRIAGE_SEED");
  app.add_option("--dict", g.dict_path, "Acronym dictionary TSV (default: built-in glossary)")->check(CLI::ExistingFile);
  app.add_option("--cap", g.cap, "Token cap per report")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress output");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse raw reports into a labeled corpus");
  c_ingest->add_option("input", ingest.input)->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--format", ingest.format)->check(CLI::IsMember({"jsonl", "csv"}));
  c_ingest->add_option("--scale", ingest.scale)->check(CLI::IsMember({"inst", "safron"}));
  c_ingest->add_option("--out", ingest.out)->required();
  c_ingest->add_option("--unlabeled-out", ingest.unlabeled_out);

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Seeded train/val/test split");
  c_split->add_option("input", split.input)->required();
  c_split->add_option("--train", split.train);
  c_split->add_option("--val", split.val);
  c_split->add_option("--test", split.test);
  c_split->add_flag("--stratified", split.stratified);
  c_split->add_option("--out-dir", split.out_dir);

  std::string stats_input;
  auto* c_stats = app.add_subcommand("stats", "Corpus summary statistics");
  c_stats->add_option("input", stats_input)->required();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic institution corpus");
  c_synth->add_option("--institution", synth.institution)->check(CLI::IsMember({"A", "B"}));
  c_synth->add_option("--n", synth.spec.n_reports);
  c_synth->add_option("--prevalence", synth.spec.prevalence);
  c_synth->add_option("--vocab-shift", synth.spec.vocab_shift);
  c_synth->add_option("--label-noise", synth.spec.label_noise);
  c_synth->add_option("--length-median", synth.spec.length_median);
  c_synth->add_option("--out", synth.out)->required();

  PreprocessArgs prep;
  auto* c_prep = app.add_subcommand("preprocess", "Expand, normalize and tokenize reports");
  c_prep->add_option("input", prep.input)->required();
  c_prep->add_option("--export-text", prep.export_text, "Write id<TAB>text TSV")->required();

  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed-fallback", "Random-projection embeddings of TF-IDF vectors");
  c_embed->add_option("--fit", embed.fit, "Corpora used to fit the vocabulary")->required();
  c_embed->add_option("--input", embed.inputs, "Corpora to embed")->required();
  c_embed->add_option("--dim", embed.dim)->check(CLI::PositiveNumber);
  c_embed->add_option("--min-df", embed.min_df);
  c_embed->add_option("--out", embed.out)->required();

  SvmArgs svm;
  auto* c_svm = app.add_subcommand("train-svm", "TF-IDF SVM with C tuned on validation F1");
  c_svm->add_option("--train", svm.train)->required();
  c_svm->add_option("--val", svm.val)->required();
  c_svm->add_option("--C", svm.c_grid, "C grid (repeatable)");
  c_svm->add_option("--kernel", svm.kernel)->check(CLI::IsMember({"rbf", "linear"}));
  c_svm->add_option("--gamma", svm.gamma, "RBF gamma (default: scale)");
  c_svm->add_option("--min-df", svm.min_df);
  c_svm->add_option("--weight-high", svm.weight_high);
  c_svm->add_option("--out", svm.out)->required();
  c_svm->add_option("--log", svm.log);

  auto add_train_opts = [](CLI::App* c, TrainConfig& cfg) {
    c->add_option("--batch", cfg.batch_size);
    c->add_option("--epochs", cfg.max_epochs);
    c->add_option("--patience", cfg.patience);
    c->add_option("--restarts", cfg.restarts);
  };

  HeadArgs head;
  auto* c_head = app.add_subcommand("train-head", "Classification head on frozen embeddings");
  c_head->add_option("--train", head.train)->required();
  c_head->add_option("--val", head.val)->required();
  c_head->add_option("--embeddings", head.embeddings)->required();
  c_head->add_option("--lr", head.cfg.learning_rate);
  add_train_opts(c_head, head.cfg);
  c_head->add_option("--out", head.out)->required();
  c_head->add_option("--log", head.log);

  TransferArgs tr;
  tr.target.learning_rate = TrainConfig::kTargetLearningRate;
  auto* c_tr = app.add_subcommand("transfer", "Two-stage source then target head training");
  c_tr->add_option("--source-train", tr.source_train)->required();
  c_tr->add_option("--source-val", tr.source_val)->required();
  c_tr->add_option("--target-train", tr.target_train)->required();
  c_tr->add_option("--target-val", tr.target_val)->required();
  c_tr->add_option("--embeddings", tr.embeddings)->required();
  c_tr->add_option("--source-lr", tr.source.learning_rate);
  c_tr->add_option("--target-lr", tr.target.learning_rate);
  add_train_opts(c_tr, tr.source);
  c_tr->add_option("--out", tr.out)->required();
  c_tr->add_option("--log", tr.log);

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "AUROC, F1 and alert-rate operating points");
  c_ev->add_option("--model", ev.model)->required();
  c_ev->add_option("--test", ev.test)->required();
  c_ev->add_option("--embeddings", ev.embeddings, "Required for head models");
  c_ev->add_option("--alert-rate", ev.alert_rates, "Repeatable; default 0.2 and 0.5")->check(CLI::Range(0.0, 1.0));
  c_ev->add_option("--out", ev.out)->required();
  c_ev->add_option("--roc-csv", ev.roc_csv);

  TriageArgs tg;
  auto* c_tg = app.add_subcommand("triage", "Rank reports and flag the top alert-rate fraction");
  c_tg->add_option("--model", tg.model)->required();
  c_tg->add_option("--input", tg.input)->required();
  c_tg->add_option("--embeddings", tg.embeddings, "Required for head models");
  c_tg->add_option("--alert-rate", tg.alert_rate)->check(CLI::Range(0.0, 1.0));
  c_tg->add_option("--out", tg.out)->required();

  ReproArgs repro;
  auto* c_repro = app.add_subcommand("repro-synthetic", "Synthetic two-institution transfer experiment");
  c_repro->add_option("--seeds", repro.cfg.seeds)->check(CLI::PositiveNumber);
  c_repro->add_option("--restarts", repro.cfg.restarts)->check(CLI::PositiveNumber);
  c_repro->add_option("--source-lr", repro.cfg.source_lr);
  c_repro->add_option("--target-lr", repro.cfg.target_lr);
  c_repro->add_option("--out", repro.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (c_ingest->parsed()) cmd_ingest(ingest, g);
  else if (c_split->parsed()) cmd_split(split, g);
  else if (c_stats->parsed()) cmd_stats(stats_input, g);
  else if (c_synth->parsed()) cmd_synth(synth, g);
  else if (c_prep->parsed()) cmd_preprocess(prep, g);
  else if (c_embed->parsed()) cmd_embed_fallback(embed, g);
  else if (c_svm->parsed()) cmd_train_svm(svm, g);
  else if (c_head->parsed()) cmd_train_head(head, g);
  else if (c_tr->parsed()) cmd_transfer(tr, g);
  else if (c_ev->parsed()) cmd_evaluate(ev, g);
  else if (c_tg->parsed()) cmd_triage(tg, g);
  else if (c_repro->parsed()) cmd_repro(repro, g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
