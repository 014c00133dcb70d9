#pragma once

// Bag-of-words TF-IDF featurization: smoothed IDF, raw counts, L2 norm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "triage/detail/text_io.hpp"
#include "triage/error.hpp"
#include "triage/stop_words.hpp"
#include "triage/textprep.hpp"

namespace triage {

// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += v * v;
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }
  bool is_zero() const { return entries.empty(); }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (const auto& [i, v] : entries) out[i] = v;
    return out;
  }

  static SparseVector from_dense(std::span<const double> dense) {
    SparseVector v;
    v.dim = dense.size();
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] != 0.0) v.entries.emplace_back(static_cast<std::uint32_t>(i), dense[i]);
    return v;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

using StopWordSet = std::unordered_set<std::string>;

inline StopWordSet english_stop_words() {
  StopWordSet out;
  for (auto w : kEnglishStopWords) out.emplace(w);
  return out;
}

inline StopWordSet load_stop_words(const std::filesystem::path& path) {
  StopWordSet out;
  for (const auto& line : detail::read_lines(path)) {
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace(t);
  }
  return out;
}

struct Vocabulary {
  std::map<std::string, std::uint32_t, std::less<>> index;  // term -> column
  std::vector<std::string> terms;                           // column -> term
  std::vector<std::size_t> document_frequency;              // per column
  std::size_t n_docs_fit = 0;

  std::size_t size() const { return terms.size(); }
};

struct TfidfModel {
  Vocabulary vocabulary;
  std::vector<double> idf;  // per column
  std::size_t min_df = 10;

  std::size_t dim() const { return vocabulary.size(); }
};

// Smoothed IDF: ln((1 + n) / (1 + df)) + 1.
inline double smoothed_idf(std::size_t n_docs, std::size_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

// Keeps terms with document frequency >= min_df that are not stop words;
// columns are assigned in lexicographic term order.
inline TfidfModel fit_tfidf(std::span<const TokenSequence> docs, std::size_t min_df = 10,
                            const StopWordSet& stop_words = english_stop_words()) {
  if (docs.empty()) throw DataError("fit_tfidf: no documents");
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (auto t : seen) {
      auto it = df.find(t);
      if (it == df.end()) df.emplace(std::string(t), 1);
      else ++it->second;
    }
  }
  TfidfModel model;
  model.min_df = min_df;
  model.vocabulary.n_docs_fit = docs.size();
  for (const auto& [term, count] : df) {
    if (count < min_df || stop_words.contains(term)) continue;
    const auto col = static_cast<std::uint32_t>(model.vocabulary.terms.size());
    model.vocabulary.index.emplace(term, col);
    model.vocabulary.terms.push_back(term);
    model.vocabulary.document_frequency.push_back(count);
    model.idf.push_back(smoothed_idf(docs.size(), count));
  }
  if (model.vocabulary.terms.empty())
    throw DataError("fit_tfidf: vocabulary is empty after pruning with min_df=" + std::to_string(min_df));
  return model;
}

inline SparseVector transform_tfidf(const TfidfModel& model, const TokenSequence& doc) {
  std::map<std::uint32_t, double> counts;
  for (const auto& t : doc.tokens) {
    auto it = model.vocabulary.index.find(t);
    if (it != model.vocabulary.index.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  v.dim = model.dim();
  v.entries.reserve(counts.size());
  for (const auto& [col, c] : counts) v.entries.emplace_back(col, c * model.idf[col]);
  const double n = v.norm();
  if (n > 0.0)
    for (auto& e : v.entries) e.second /= n;
  return v;
}

inline std::vector<SparseVector> transform_tfidf(const TfidfModel& model, std::span<const TokenSequence> docs) {
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(transform_tfidf(model, d));
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
//
//   tfidfv1
//   min_df <int>
//   n_docs_fit <int>
//   n_terms <int>
//   <term>\t<df>\t<idf>      (one line per column, in column order)

inline std::string tfidf_to_text(const TfidfModel& m) {
  std::string out = "tfidfv1\n";
  out += "min_df " + std::to_string(m.min_df) + "\n";
  out += "n_docs_fit " + std::to_string(m.vocabulary.n_docs_fit) + "\n";
  out += "n_terms " + std::to_string(m.dim()) + "\n";
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out += m.vocabulary.terms[i];
    out += '\t';
    out += std::to_string(m.vocabulary.document_frequency[i]);
    out += '\t';
    out += detail::format_double(m.idf[i]);
    out += '\n';
  }
  return out;
}

namespace detail {

// Line cursor used by the model readers.
class LineReader {
 public:
  LineReader(std::vector<std::string> lines, std::string name, std::size_t pos = 0)
      : lines_(std::move(lines)), name_(std::move(name)), pos_(pos) {}

  bool done() const { return pos_ >= lines_.size(); }
  std::size_t line_no() const { return pos_ + 1; }
  std::size_t position() const { return pos_; }

  const std::string& next() {
    if (done()) fail("unexpected end of file");
    return lines_[pos_++];
  }
  const std::string& peek() const { return lines_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(name_ + ": line " + std::to_string(std::min(pos_ + 1, lines_.size() + 1)) + ": " + msg);
  }

  void expect_literal(std::string_view literal) {
    if (next() != literal) {
      --pos_;
      fail("expected '" + std::string(literal) + "'");
    }
  }

  // Reads `key value` and returns value.
  std::string_view keyed(std::string_view key) {
    const std::string& line = next();
    const auto fields = split_ws(line);
    if (fields.size() < 2 || fields[0] != key) {
      --pos_;
      fail("expected '" + std::string(key) + " <value>'");
    }
    return std::string_view(line).substr(static_cast<std::size_t>(fields[1].data() - line.data()));
  }

  std::size_t keyed_size(std::string_view key) {
    std::size_t v = 0;
    if (!parse_int(keyed(key), v)) {
      --pos_;
      fail("invalid integer for '" + std::string(key) + "'");
    }
    return v;
  }

  double keyed_double(std::string_view key) {
    double v = 0;
    if (!parse_double(keyed(key), v) || !std::isfinite(v)) {
      --pos_;
      fail("invalid number for '" + std::string(key) + "'");
    }
    return v;
  }

 private:
  std::vector<std::string> lines_;
  std::string name_;
  std::size_t pos_;
};

}  // namespace detail

inline TfidfModel read_tfidf(detail::LineReader& in) {
  in.expect_literal("tfidfv1");
  TfidfModel m;
  m.min_df = in.keyed_size("min_df");
  m.vocabulary.n_docs_fit = in.keyed_size("n_docs_fit");
  const std::size_t n = in.keyed_size("n_terms");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& line = in.next();
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    std::size_t df = 0;
    double idf = 0;
    if (t2 == std::string::npos || !detail::parse_int(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), df) ||
        !detail::parse_double(std::string_view(line).substr(t2 + 1), idf)) {
      in.fail("malformed term row");
    }
    std::string term = line.substr(0, t1);
    if (!m.vocabulary.terms.empty() && term <= m.vocabulary.terms.back()) in.fail("terms out of order");
    m.vocabulary.index.emplace(term, static_cast<std::uint32_t>(i));
    m.vocabulary.terms.push_back(std::move(term));
    m.vocabulary.document_frequency.push_back(df);
    m.idf.push_back(idf);
  }
  return m;
}

inline void save_tfidf(const TfidfModel& m, const std::filesystem::path& path) {
  detail::write_file_atomic(path, tfidf_to_text(m));
}

inline TfidfModel load_tfidf(const std::filesystem::path& path) {
  detail::LineReader in(detail::read_lines(path), path.string());
  return read_tfidf(in);
}

}  // namespace triage
