#pragma once

// Soft-margin binary SVM trained on the dual by Platt's sequential minimal
// optimization, plus validation-F1 tuning of C.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/detail/log.hpp"
#include "triage/detail/random.hpp"
#include "triage/detail/text_io.hpp"
#include "triage/error.hpp"
#include "triage/features.hpp"

namespace triage {

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  // Unset means "scale": 1 / (n_features * variance of all feature entries).
  std::optional<double> gamma;
};

struct SvmConfig {
  double C = 1.0;
  KernelSpec kernel;
  double tol = 1e-3;
  std::size_t max_passes = 100000;  // outer-loop sweeps before giving up
  std::uint64_t seed = 0;
  double weight_low = 1.0;   // per-class C multipliers
  double weight_high = 1.0;

  void validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("SVM C must be positive");
    if (!(tol > 0.0)) throw ConfigError("SVM tol must be positive");
    if (!(weight_low > 0.0) || !(weight_high > 0.0)) throw ConfigError("SVM class weights must be positive");
    if (kernel.gamma && !(*kernel.gamma > 0.0)) throw ConfigError("RBF gamma must be positive");
    if (max_passes == 0) throw ConfigError("max_passes must be >= 1");
  }
};

struct SvmModel {
  KernelKind kernel = KernelKind::Rbf;
  double gamma = 1.0;  // resolved; unused for the linear kernel
  double C = 1.0;
  double bias = 0.0;
  std::size_t dim = 0;
  std::vector<SparseVector> support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
};

inline double kernel_value(KernelKind kind, double gamma, const SparseVector& a, const SparseVector& b) {
  if (kind == KernelKind::Linear) return dot(a, b);
  const double d2 = std::max(0.0, a.squared_norm() + b.squared_norm() - 2.0 * dot(a, b));
  return std::exp(-gamma * d2);
}

// "scale" heuristic over the dense n x dim design matrix (zeros included).
inline double scale_gamma(std::span<const SparseVector> xs) {
  if (xs.empty() || xs.front().dim == 0) return 1.0;
  const double count = static_cast<double>(xs.size()) * static_cast<double>(xs.front().dim);
  double sum = 0.0, sq = 0.0;
  for (const auto& x : xs)
    for (const auto& [i, v] : x.entries) {
      sum += v;
      sq += v * v;
    }
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  if (!(var > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(xs.front().dim) * var);
}

// Solution of the dual for every training point, in input order.
struct DualSolution {
  std::vector<double> alpha;
  std::vector<double> box;  // per-point upper bound (C times class weight)
  double bias = 0.0;
  double gamma = 1.0;
  std::size_t passes = 0;
  std::size_t steps = 0;
  bool converged = false;
};

namespace detail {

// Gram matrix: precomputed when it fits, otherwise rows are computed on demand.
class KernelCache {
 public:
  static constexpr std::size_t kDenseLimit = 3000;

  KernelCache(std::span<const SparseVector> xs, KernelKind kind, double gamma)
      : xs_(xs), kind_(kind), gamma_(gamma), n_(xs.size()), diag_(n_) {
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_value(kind_, gamma_, xs_[i], xs_[i]);
    if (n_ <= kDenseLimit) {
      dense_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) {
          const double k = i == j ? diag_[i] : kernel_value(kind_, gamma_, xs_[i], xs_[j]);
          dense_[i * n_ + j] = k;
          dense_[j * n_ + i] = k;
        }
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  std::span<const double> row(std::size_t i) {
    if (!dense_.empty()) return {dense_.data() + i * n_, n_};
    for (auto& slot : slots_)
      if (slot.index == i) return slot.values;
    auto& slot = slots_[next_slot_];
    next_slot_ = (next_slot_ + 1) % slots_.size();
    slot.index = i;
    slot.values.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) slot.values[j] = kernel_value(kind_, gamma_, xs_[i], xs_[j]);
    return slot.values;
  }

  double at(std::size_t i, std::size_t j) {
    if (!dense_.empty()) return dense_[i * n_ + j];
    return kernel_value(kind_, gamma_, xs_[i], xs_[j]);
  }

 private:
  struct Slot {
    std::size_t index = static_cast<std::size_t>(-1);
    std::vector<double> values;
  };
  std::span<const SparseVector> xs_;
  KernelKind kind_;
  double gamma_;
  std::size_t n_;
  std::vector<double> diag_;
  std::vector<double> dense_;
  std::array<Slot, 4> slots_{};
  std::size_t next_slot_ = 0;
};

class SmoSolver {
 public:
  SmoSolver(std::span<const SparseVector> xs, std::span<const double> y, const SvmConfig& cfg, double gamma)
      : y_(y), n_(xs.size()), tol_(cfg.tol), kernel_(xs, cfg.kernel.kind, gamma),
        alpha_(n_, 0.0), box_(n_), f_(n_, 0.0), rng_(derive_seed(cfg.seed, 0x5A0)), max_passes_(cfg.max_passes) {
    for (std::size_t i = 0; i < n_; ++i) box_[i] = cfg.C * (y_[i] > 0 ? cfg.weight_high : cfg.weight_low);
  }

  DualSolution solve() {
    std::size_t changed = 0;
    bool examine_all = true;
    std::size_t passes = 0;
    bool converged = false;
    while (passes < max_passes_) {
      ++passes;
      changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_; ++i) changed += examine(i);
      } else {
        for (std::size_t i = 0; i < n_; ++i)
          if (is_free(i)) changed += examine(i);
      }
      if (examine_all) {
        if (changed == 0) {
          converged = true;
          break;
        }
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    DualSolution out;
    out.alpha = alpha_;
    out.box = box_;
    out.bias = final_bias();
    out.passes = passes;
    out.steps = steps_;
    out.converged = converged;
    return out;
  }

 private:
  static constexpr double kEps = 1e-12;
  static constexpr double kMinStep = 1e-10;  // relative progress below which a pair is rejected
  static constexpr double kSnap = 1e-12;     // relative distance at which an alpha joins its bound

  bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < box_[i]; }

  // Bias consistent with the final alphas: mean of y - f over free points,
  // else the midpoint of the interval the bound points allow.
  double final_bias() const {
    double sum = 0.0;
    std::size_t n_free = 0;
    double lower = -std::numeric_limits<double>::infinity(), upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      const double r = y_[i] - f_[i];
      if (is_free(i)) {
        sum += r;
        ++n_free;
      } else if ((alpha_[i] <= 0.0) == (y_[i] > 0)) {
        lower = std::max(lower, r);
      } else {
        upper = std::min(upper, r);
      }
    }
    if (n_free > 0) return sum / static_cast<double>(n_free);
    if (std::isinf(lower)) return upper;
    if (std::isinf(upper)) return lower;
    return 0.5 * (lower + upper);
  }
  double error(std::size_t i) const { return f_[i] + b_ - y_[i]; }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error(i2);
    const double r2 = e2 * y2;
    if (!((r2 < -tol_ && a2 < box_[i2]) || (r2 > tol_ && a2 > 0.0))) return 0;

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < n_; ++i)
      if (is_free(i)) free_idx.push_back(i);

    // Second-choice heuristic: maximize |E1 - E2| among free points.
    if (free_idx.size() > 1) {
      std::size_t best = free_idx.front();
      double gap = -1.0;
      for (auto i : free_idx) {
        const double g = std::abs(error(i) - e2);
        if (g > gap) {
          gap = g;
          best = i;
        }
      }
      if (take_step(best, i2)) return 1;
    }
    // Then every free point, then every point, each from a random start.
    if (!free_idx.empty()) {
      const auto start = static_cast<std::size_t>(bounded(rng_, free_idx.size()));
      for (std::size_t k = 0; k < free_idx.size(); ++k)
        if (take_step(free_idx[(start + k) % free_idx.size()], i2)) return 1;
    }
    const auto start = static_cast<std::size_t>(bounded(rng_, n_));
    for (std::size_t k = 0; k < n_; ++k)
      if (take_step((start + k) % n_, i2)) return 1;
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double c1 = box_[i1], c2 = box_[i2];
    const double e1 = error(i1), e2 = error(i2);
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c2, c1 + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c1);
      hi = std::min(c2, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = kernel_.diag(i1), k22 = kernel_.diag(i2), k12 = kernel_.at(i1, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double new_a2;
    if (eta > kEps) {
      new_a2 = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective along the constraint line is linear (or convex): take the better end.
      const double g = y2 * (e1 - e2);
      auto gain = [&](double t) { return g * t - 0.5 * eta * t * t; };
      const double g_lo = gain(lo - a2), g_hi = gain(hi - a2);
      if (g_lo > g_hi + kEps) new_a2 = lo;
      else if (g_hi > g_lo + kEps) new_a2 = hi;
      else new_a2 = a2;
    }
    if (std::abs(new_a2 - a2) < kMinStep * (new_a2 + a2 + kMinStep)) return false;

    double new_a1 = a1 + s * (a2 - new_a2);
    // Round-off can push alpha1 marginally outside its box.
    if (new_a1 < 0.0) {
      new_a2 += s * new_a1;
      new_a1 = 0.0;
    } else if (new_a1 > c1) {
      new_a2 += s * (new_a1 - c1);
      new_a1 = c1;
    }
    new_a2 = std::clamp(new_a2, 0.0, c2);
    // Values within round-off of a bound sit on it, so bound status is exact.
    auto snap = [](double a, double c) { return a <= kSnap * c ? 0.0 : a >= c - kSnap * c ? c : a; };
    new_a1 = snap(new_a1, c1);
    new_a2 = snap(new_a2, c2);

    const double d1 = y1 * (new_a1 - a1);
    const double d2 = y2 * (new_a2 - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    const bool free1 = new_a1 > 0.0 && new_a1 < c1;
    const bool free2 = new_a2 > 0.0 && new_a2 < c2;
    if (free1) b_ = b1;
    else if (free2) b_ = b2;
    else b_ = 0.5 * (b1 + b2);

    const auto row1 = kernel_.row(i1);
    const auto row2 = kernel_.row(i2);  // distinct slot, row1 stays valid
    for (std::size_t i = 0; i < n_; ++i) f_[i] += d1 * row1[i] + d2 * row2[i];

    alpha_[i1] = new_a1;
    alpha_[i2] = new_a2;
    ++steps_;
    return true;
  }

  std::span<const double> y_;
  std::size_t n_;
  double tol_;
  KernelCache kernel_;
  std::vector<double> alpha_;
  std::vector<double> box_;
  std::vector<double> f_;  // sum_j alpha_j y_j K(i, j), bias excluded
  double b_ = 0.0;
  Rng rng_;
  std::size_t max_passes_;
  std::size_t steps_ = 0;
};

inline std::vector<double> signed_labels(std::span<const Severity> labels) {
  std::vector<double> y;
  y.reserve(labels.size());
  for (auto l : labels) y.push_back(l == Severity::High ? 1.0 : -1.0);
  return y;
}

inline void check_training_set(std::span<const SparseVector> xs, std::span<const Severity> labels) {
  if (xs.size() != labels.size()) throw DataError("SVM: features and labels differ in length");
  if (xs.empty()) throw DataError("SVM: empty training set");
  bool has_high = false, has_low = false;
  for (auto l : labels) (l == Severity::High ? has_high : has_low) = true;
  if (!has_high || !has_low) throw DataError("SVM: training set must contain both classes");
  const std::size_t dim = xs.front().dim;
  for (const auto& x : xs) {
    if (x.dim != dim) throw DataError("SVM: inconsistent feature dimensions");
    for (const auto& [i, v] : x.entries)
      if (!std::isfinite(v)) throw NumericError("SVM: non-finite feature value");
  }
}

}  // namespace detail

inline double resolve_gamma(const KernelSpec& kernel, std::span<const SparseVector> xs) {
  if (kernel.kind == KernelKind::Linear) return 1.0;
  return kernel.gamma ? *kernel.gamma : scale_gamma(xs);
}

// Runs SMO and returns the full dual solution (all alphas, in input order).
inline DualSolution solve_svm_dual(std::span<const SparseVector> xs, std::span<const Severity> labels,
                                   const SvmConfig& cfg) {
  cfg.validate();
  detail::check_training_set(xs, labels);
  const double gamma = resolve_gamma(cfg.kernel, xs);
  const auto y = detail::signed_labels(labels);
  detail::SmoSolver solver(xs, y, cfg, gamma);
  DualSolution sol = solver.solve();
  sol.gamma = gamma;
  if (!sol.converged)
    warn("SVM: SMO stopped after " + std::to_string(sol.passes) + " passes without meeting tol");
  return sol;
}

inline SvmModel model_from_dual(const DualSolution& sol, std::span<const SparseVector> xs,
                                std::span<const Severity> labels, const SvmConfig& cfg) {
  SvmModel m;
  m.kernel = cfg.kernel.kind;
  m.gamma = sol.gamma;
  m.C = cfg.C;
  m.bias = sol.bias;
  m.dim = xs.front().dim;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (sol.alpha[i] <= 0.0) continue;
    m.support_vectors.push_back(xs[i]);
    m.dual_coefs.push_back(sol.alpha[i] * (labels[i] == Severity::High ? 1.0 : -1.0));
  }
  return m;
}

inline SvmModel train_svm(std::span<const SparseVector> xs, std::span<const Severity> labels,
                          const SvmConfig& cfg) {
  const auto sol = solve_svm_dual(xs, labels, cfg);
  return model_from_dual(sol, xs, labels, cfg);
}

inline double decision_score(const SvmModel& m, const SparseVector& x) {
  if (x.dim != m.dim)
    throw DataError("SVM: feature dimension " + std::to_string(x.dim) + " does not match model dimension " +
                    std::to_string(m.dim));
  double s = m.bias;
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i)
    s += m.dual_coefs[i] * kernel_value(m.kernel, m.gamma, m.support_vectors[i], x);
  return s;
}

// Positive scores are HIGH; ties at zero go to LOW.
inline Severity classify_score(double score) { return score > 0.0 ? Severity::High : Severity::Low; }

inline std::optional<double> positive_f1(std::span<const Severity> predicted, std::span<const Severity> actual) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Severity::High, a = actual[i] == Severity::High;
    tp += p && a;
    fp += p && !a;
    fn += !p && a;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return std::nullopt;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

struct CGridRow {
  double C = 0.0;
  std::optional<double> f1;  // unset when training failed or F1 undefined
  std::string error;
};

struct CTuningResult {
  double best_c = 0.0;
  std::vector<CGridRow> table;
  SvmModel best_model;
};

inline const std::vector<double>& default_c_grid() {
  static const std::vector<double> grid = {0.01, 0.1, 1.0, 10.0, 100.0};
  return grid;
}

// One model per C; the winner maximizes validation positive-class F1, ties
// going to the smaller C. Grid points that fail are recorded and skipped.
inline CTuningResult tune_c(std::span<const SparseVector> train_x, std::span<const Severity> train_y,
                            std::span<const SparseVector> val_x, std::span<const Severity> val_y,
                            std::vector<double> grid, const SvmConfig& base) {
  if (grid.empty()) throw ConfigError("tune_c: empty C grid");
  if (val_x.size() != val_y.size() || val_x.empty()) throw DataError("tune_c: invalid validation set");
  std::sort(grid.begin(), grid.end());
  CTuningResult out;
  std::optional<double> best_f1;
  bool have_model = false;
  for (double c : grid) {
    CGridRow row{c, std::nullopt, {}};
    try {
      SvmConfig cfg = base;
      cfg.C = c;
      SvmModel m = train_svm(train_x, train_y, cfg);
      std::vector<Severity> pred;
      pred.reserve(val_x.size());
      for (const auto& x : val_x) pred.push_back(classify_score(decision_score(m, x)));
      row.f1 = positive_f1(pred, val_y);
      const double score = row.f1.value_or(0.0);
      if (!have_model || score > best_f1.value_or(0.0)) {
        best_f1 = score;
        out.best_c = c;
        out.best_model = std::move(m);
        have_model = true;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    out.table.push_back(std::move(row));
  }
  if (!have_model) throw DataError("tune_c: every grid point failed (" + out.table.front().error + ")");
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
//
//   svmv1
//   kernel linear|rbf
//   gamma <g>
//   C <c>
//   bias <b>
//   dim <d>
//   n_sv <n>
//   <coef>\t<idx>:<val> <idx>:<val> ...   (one line per support vector)

inline std::string svm_to_text(const SvmModel& m) {
  std::string out = "svmv1\n";
  out += std::string("kernel ") + (m.kernel == KernelKind::Linear ? "linear" : "rbf") + "\n";
  out += "gamma " + detail::format_double(m.gamma) + "\n";
  out += "C " + detail::format_double(m.C) + "\n";
  out += "bias " + detail::format_double(m.bias) + "\n";
  out += "dim " + std::to_string(m.dim) + "\n";
  out += "n_sv " + std::to_string(m.support_vectors.size()) + "\n";
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
    out += detail::format_double(m.dual_coefs[i]);
    out += '\t';
    bool first = true;
    for (const auto& [idx, v] : m.support_vectors[i].entries) {
      if (!first) out += ' ';
      first = false;
      out += std::to_string(idx);
      out += ':';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline SvmModel read_svm(detail::LineReader& in) {
  in.expect_literal("svmv1");
  SvmModel m;
  const auto kind = in.keyed("kernel");
  if (kind == "linear") m.kernel = KernelKind::Linear;
  else if (kind == "rbf") m.kernel = KernelKind::Rbf;
  else in.fail("unknown kernel '" + std::string(kind) + "'");
  m.gamma = in.keyed_double("gamma");
  m.C = in.keyed_double("C");
  m.bias = in.keyed_double("bias");
  m.dim = in.keyed_size("dim");
  const std::size_t n = in.keyed_size("n_sv");
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& line = in.next();
    const auto tab = line.find('\t');
    double coef = 0;
    if (tab == std::string::npos || !detail::parse_double(std::string_view(line).substr(0, tab), coef))
      in.fail("malformed support vector row");
    SparseVector sv;
    sv.dim = m.dim;
    for (auto tok : detail::split_ws(std::string_view(line).substr(tab + 1))) {
      const auto colon = tok.find(':');
      std::uint32_t idx = 0;
      double v = 0;
      if (colon == std::string_view::npos || !detail::parse_int(tok.substr(0, colon), idx) ||
          !detail::parse_double(tok.substr(colon + 1), v) || idx >= m.dim ||
          (!sv.entries.empty() && idx <= sv.entries.back().first))
        in.fail("malformed sparse entry '" + std::string(tok) + "'");
      sv.entries.emplace_back(idx, v);
    }
    m.support_vectors.push_back(std::move(sv));
    m.dual_coefs.push_back(coef);
  }
  return m;
}

inline void save_svm(const SvmModel& m, const std::filesystem::path& path) {
  detail::write_file_atomic(path, svm_to_text(m));
}

inline SvmModel load_svm(const std::filesystem::path& path) {
  detail::LineReader in(detail::read_lines(path), path.string());
  return read_svm(in);
}

}  // namespace triage
