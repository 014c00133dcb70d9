#pragma once

// ROC / AUROC, alert-rate operating points, confusion-derived metrics,
// micro/macro F1, Krippendorff's alpha and pooled rater AUROC.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/detail/text_io.hpp"
#include "triage/error.hpp"

namespace triage {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // scores >= threshold are flagged at this point
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auroc = 0.5;
};

namespace detail {

inline void check_scored(std::span<const double> scores, std::span<const Severity> labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  bool pos = false, neg = false;
  for (auto l : labels) (l == Severity::High ? pos : neg) = true;
  if (!pos || !neg) throw DataError("ROC analysis needs both classes present");
  for (double s : scores)
    if (std::isnan(s)) throw NumericError("NaN score");
}

}  // namespace detail

// Tie-aware Mann-Whitney AUROC from mid-ranks: a positive outranking a
// negative counts 1, a tie counts 1/2.
inline double auroc_rank(std::span<const double> scores, std::span<const Severity> labels) {
  detail::check_scored(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;  // doubled mid-ranks, kept integral
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double twice_mid = static_cast<double>(i + 1 + j);  // 2 * mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == Severity::High) {
        pos_rank_sum += twice_mid;
        ++n_pos;
      }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n - n_pos);
  const double u = 0.5 * pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

// Curve over descending unique thresholds. `auroc` is the rank statistic;
// the trapezoidal area under `points` agrees with it.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const Severity> labels) {
  detail::check_scored(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::size_t n_pos = 0;
  for (auto l : labels) n_pos += l == Severity::High;
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n - n_pos);

  RocCurve c;
  c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == Severity::High ? tp : fp) += 1;
      ++j;
    }
    c.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np, scores[order[i]]});
    i = j;
  }
  c.auroc = auroc_rank(scores, labels);
  return c;
}

inline double trapezoid_area(const RocCurve& c) {
  double area = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    area += (c.points[i].fpr - c.points[i - 1].fpr) * (c.points[i].tpr + c.points[i - 1].tpr) / 2.0;
  return area;
}

inline std::string roc_to_csv(const RocCurve& c) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : c.points) out += detail::format_double(p.fpr) + "," + detail::format_double(p.tpr) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Alert-rate operating points

struct AlertSelection {
  std::size_t k = 0;               // number flagged
  double threshold = 0.0;          // k-th highest score; +inf when k == 0
  std::vector<std::size_t> flagged;  // indices, ascending
};

inline std::size_t alert_count(double alert_rate, std::size_t n) {
  return static_cast<std::size_t>(std::floor(alert_rate * static_cast<double>(n) + 0.5));
}

// Flags the top k = floor(rate * N + 0.5) scores. Ties at the boundary are
// broken by ascending id (ids default to the index order).
inline AlertSelection threshold_for_alert_rate(std::span<const double> scores, double alert_rate,
                                               std::span<const std::string> ids = {}) {
  if (scores.empty()) throw DataError("alert rate: no scores");
  if (!(alert_rate >= 0.0 && alert_rate <= 1.0)) throw ConfigError("alert rate must lie in [0, 1]");
  if (!ids.empty() && ids.size() != scores.size()) throw DataError("alert rate: ids and scores differ in length");
  for (double s : scores)
    if (std::isnan(s)) throw NumericError("NaN score");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids.empty() ? a < b : ids[a] < ids[b];
  });
  AlertSelection sel;
  sel.k = std::min(alert_count(alert_rate, n), n);
  sel.threshold = sel.k ? scores[order[sel.k - 1]] : std::numeric_limits<double>::infinity();
  sel.flagged.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sel.k));
  std::sort(sel.flagged.begin(), sel.flagged.end());
  return sel;
}

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion_at_threshold(std::span<const Severity> labels, std::span<const std::size_t> flagged) {
  std::vector<char> is_flagged(labels.size(), 0);
  for (auto i : flagged) {
    if (i >= labels.size()) throw DataError("flagged index " + std::to_string(i) + " has no label");
    is_flagged[i] = 1;
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool high = labels[i] == Severity::High;
    if (is_flagged[i]) (high ? c.tp : c.fp) += 1;
    else (high ? c.fn : c.tn) += 1;
  }
  return c;
}

// Unset optionals mark undefined metrics (zero denominators).
struct ConfusionMetrics {
  std::optional<double> sensitivity, specificity, ppv, npv;
};

namespace detail {
inline std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

inline ConfusionMetrics confusion_metrics(const ConfusionCounts& c) {
  return {detail::ratio(c.tp, c.tp + c.fn), detail::ratio(c.tn, c.tn + c.fp), detail::ratio(c.tp, c.tp + c.fp),
          detail::ratio(c.tn, c.tn + c.fn)};
}

struct F1Scores {
  std::optional<double> binary;  // positive (HIGH) class
  std::optional<double> micro;   // equals accuracy for single-label binary data
  std::optional<double> macro;   // mean of the HIGH and LOW per-class F1
};

inline F1Scores f1_scores(const ConfusionCounts& c) {
  F1Scores f;
  f.binary = detail::ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  const auto low = detail::ratio(2 * c.tn, 2 * c.tn + c.fn + c.fp);
  f.micro = detail::ratio(c.tp + c.tn, c.total());
  if (f.binary && low) f.macro = (*f.binary + *low) / 2.0;
  return f;
}

// ---------------------------------------------------------------------------
// Metric report

struct OperatingPoint {
  double alert_rate = 0.0;
  double threshold = 0.0;
  ConfusionCounts counts;
  ConfusionMetrics metrics;
  F1Scores f1;
};

struct MetricReport {
  std::size_t n = 0;
  std::size_t n_high = 0;
  double auroc = 0.5;
  double decision_threshold = 0.0;  // native classifier cut used for f1_*
  ConfusionCounts decision_counts;
  F1Scores f1;
  std::vector<OperatingPoint> operating_points;
};

inline MetricReport evaluate_scores(std::span<const double> scores, std::span<const Severity> labels,
                                    std::span<const double> alert_rates, double decision_threshold,
                                    std::span<const std::string> ids = {}) {
  MetricReport r;
  r.n = scores.size();
  for (auto l : labels) r.n_high += l == Severity::High;
  r.auroc = roc_curve(scores, labels).auroc;
  r.decision_threshold = decision_threshold;
  std::vector<std::size_t> native;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] > decision_threshold) native.push_back(i);
  r.decision_counts = confusion_at_threshold(labels, native);
  r.f1 = f1_scores(r.decision_counts);
  for (double rate : alert_rates) {
    const auto sel = threshold_for_alert_rate(scores, rate, ids);
    OperatingPoint op;
    op.alert_rate = rate;
    op.threshold = sel.threshold;
    op.counts = confusion_at_threshold(labels, sel.flagged);
    op.metrics = confusion_metrics(op.counts);
    op.f1 = f1_scores(op.counts);
    r.operating_points.push_back(op);
  }
  return r;
}

namespace detail {
inline std::string fmt_opt(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }
}  // namespace detail

inline std::string metric_report_to_text(const MetricReport& r) {
  using detail::fmt_opt;
  using detail::format_double;
  std::string out = "metricreport v1\n";
  out += "n " + std::to_string(r.n) + "\n";
  out += "n_high " + std::to_string(r.n_high) + "\n";
  out += "auroc " + format_double(r.auroc) + "\n";
  out += "decision_threshold " + format_double(r.decision_threshold) + "\n";
  out += "decision_counts " + std::to_string(r.decision_counts.tp) + " " + std::to_string(r.decision_counts.fp) +
         " " + std::to_string(r.decision_counts.fn) + " " + std::to_string(r.decision_counts.tn) + "\n";
  out += "f1_binary " + fmt_opt(r.f1.binary) + "\n";
  out += "f1_micro " + fmt_opt(r.f1.micro) + "\n";
  out += "f1_macro " + fmt_opt(r.f1.macro) + "\n";
  out += "operating_points " + std::to_string(r.operating_points.size()) + "\n";
  out += "alert_rate\tthreshold\ttp\tfp\tfn\ttn\tsensitivity\tspecificity\tppv\tnpv\tf1_binary\tf1_macro\n";
  for (const auto& op : r.operating_points) {
    out += format_double(op.alert_rate) + "\t" + format_double(op.threshold) + "\t" + std::to_string(op.counts.tp) +
           "\t" + std::to_string(op.counts.fp) + "\t" + std::to_string(op.counts.fn) + "\t" +
           std::to_string(op.counts.tn) + "\t" + fmt_opt(op.metrics.sensitivity) + "\t" +
           fmt_opt(op.metrics.specificity) + "\t" + fmt_opt(op.metrics.ppv) + "\t" + fmt_opt(op.metrics.npv) + "\t" +
           fmt_opt(op.f1.binary) + "\t" + fmt_opt(op.f1.macro) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inter-rater analysis

struct RaterEntry {
  Severity consensus = Severity::Low;
  std::vector<int> scores;  // individual rater scores (0-4 scale)
};

using RaterTable = std::map<std::string, RaterEntry>;

enum class AlphaMetric { Nominal, Ordinal };

// Krippendorff's alpha from the coincidence matrix. Units with fewer than two
// values are not pairable and contribute nothing. The ordinal difference is
// the squared distance between cumulative-frequency mid-ranks.
inline double krippendorff_alpha(const RaterTable& table, AlphaMetric metric) {
  std::map<int, std::size_t> value_index;
  for (const auto& [id, e] : table)
    if (e.scores.size() >= 2)
      for (int v : e.scores) value_index.emplace(v, 0);
  std::size_t k = 0;
  for (auto& [v, idx] : value_index) idx = k++;
  if (k == 0) throw DataError("krippendorff_alpha: no pairable values");

  std::vector<double> o(k * k, 0.0);
  for (const auto& [id, e] : table) {
    const std::size_t m = e.scores.size();
    if (m < 2) continue;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (a != b) o[value_index[e.scores[a]] * k + value_index[e.scores[b]]] += w;
  }
  std::vector<double> marg(k, 0.0);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) marg[c] += o[c * k + d];
  const double n = std::accumulate(marg.begin(), marg.end(), 0.0);

  auto delta2 = [&](std::size_t c, std::size_t d) -> double {
    if (c == d) return 0.0;
    if (metric == AlphaMetric::Nominal) return 1.0;
    const std::size_t lo = std::min(c, d), hi = std::max(c, d);
    double s = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) s += marg[g];
    s -= (marg[lo] + marg[hi]) / 2.0;
    return s * s;
  };

  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d) {
      const double dd = delta2(c, d);
      observed += o[c * k + d] * dd;
      expected += marg[c] * marg[d] * dd;
    }
  if (expected == 0.0) return 1.0;  // a single value overall: perfect agreement
  return 1.0 - (n - 1.0) * observed / expected;
}

// Each rater score is one prediction against the consensus label.
inline double pooled_rater_auroc(const RaterTable& table) {
  std::vector<double> scores;
  std::vector<Severity> labels;
  for (const auto& [id, e] : table) {
    if (e.scores.empty()) throw DataError("rater table: report '" + id + "' has no scores");
    for (int s : e.scores) {
      scores.push_back(static_cast<double>(s));
      labels.push_back(e.consensus);
    }
  }
  if (scores.empty()) throw DataError("rater table is empty");
  return auroc_rank(scores, labels);
}

}  // namespace triage
