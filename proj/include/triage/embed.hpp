#pragma once

// Embedding-matrix interchange (`embedv1` text files) and the seeded
// random-projection fallback encoder.
//
// File layout, LF line endings:
//   embedv1 <dim> <n_rows>[ <provenance>]
//   <report_id>\t<v1> <v2> ... <v_dim>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "triage/detail/random.hpp"
#include "triage/detail/text_io.hpp"
#include "triage/error.hpp"
#include "triage/features.hpp"
#include "triage/textprep.hpp"

namespace triage {

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t dim, std::string provenance = {})
      : dim_(dim), provenance_(std::move(provenance)) {
    if (dim_ < 1) throw ConfigError("embedding dim must be >= 1");
  }

  void add_row(std::string id, std::vector<double> values) {
    if (values.size() != dim_)
      throw DataError("embedding row '" + id + "' has " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(dim_));
    for (double v : values)
      if (!std::isfinite(v)) throw NumericError("embedding row '" + id + "' has a non-finite value");
    if (!index_.emplace(id, ids_.size()).second) throw DataError("duplicate embedding id '" + id + "'");
    ids_.push_back(std::move(id));
    data_.insert(data_.end(), values.begin(), values.end());
  }

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return ids_.size(); }
  const std::string& provenance() const { return provenance_; }
  const std::vector<std::string>& ids() const { return ids_; }

  bool contains(std::string_view id) const { return index_.contains(std::string(id)); }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  std::span<const double> row(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw DataError("no embedding for report '" + std::string(id) + "'");
    return row(it->second);
  }

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    return a.dim_ == b.dim_ && a.provenance_ == b.provenance_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  std::size_t dim_ = 1;
  std::string provenance_;
  std::vector<std::string> ids_;
  std::vector<double> data_;  // row-major
  std::unordered_map<std::string, std::size_t> index_;
};

enum class EmbeddingErrorKind { BadHeader, BadMagic, DimMismatch, DuplicateId, NonFinite, RowCountMismatch, BadValue };

class EmbeddingFormatError : public DataError {
 public:
  EmbeddingFormatError(EmbeddingErrorKind kind, std::size_t line, const std::string& msg)
      : DataError("line " + std::to_string(line) + ": " + msg), kind_(kind), line_(line) {}
  EmbeddingErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  EmbeddingErrorKind kind_;
  std::size_t line_;
};

inline std::string embeddings_to_text(const EmbeddingMatrix& m) {
  std::string out = "embedv1 " + std::to_string(m.dim()) + " " + std::to_string(m.rows());
  if (!m.provenance().empty()) out += " " + m.provenance();
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += m.ids()[i];
    out += '\t';
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ' ';
      out += detail::format_double(r[k]);
    }
    out += '\n';
  }
  return out;
}

inline void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  for (const auto& id : m.ids())
    if (id.find_first_of("\t\n\r") != std::string::npos)
      throw DataError("embedding id '" + id + "' contains a tab or line break");
  if (m.provenance().find_first_of("\n\r") != std::string::npos)
    throw DataError("embedding provenance contains a line break");
  detail::write_file_atomic(path, embeddings_to_text(m));
}

inline EmbeddingMatrix parse_embeddings(std::string_view text) {
  using K = EmbeddingErrorKind;
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty()) throw EmbeddingFormatError(K::BadHeader, 1, "missing embedv1 header");
  const auto header = detail::split_ws(lines[0]);
  if (header.empty() || header[0] != "embedv1") throw EmbeddingFormatError(K::BadMagic, 1, "bad magic, expected 'embedv1'");
  std::size_t dim = 0, n_rows = 0;
  if (header.size() < 3 || !detail::parse_int(header[1], dim) || !detail::parse_int(header[2], n_rows) || dim < 1)
    throw EmbeddingFormatError(K::BadHeader, 1, "header must be 'embedv1 <dim> <n_rows>' with dim >= 1");
  std::string provenance;
  if (header.size() > 3) {
    const auto off = static_cast<std::size_t>(header[3].data() - lines[0].data());
    provenance = std::string(lines[0].substr(off));
  }

  EmbeddingMatrix m(dim, std::move(provenance));
  std::vector<double> values;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const auto line = lines[li];
    if (line.empty() && li + 1 == lines.size()) break;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw EmbeddingFormatError(K::BadValue, line_no, "expected '<id>\\t<values>'");
    std::string id(line.substr(0, tab));
    const auto fields = detail::split_ws(line.substr(tab + 1));
    if (fields.size() != dim)
      throw EmbeddingFormatError(K::DimMismatch, line_no,
                                 "row '" + id + "' has " + std::to_string(fields.size()) + " values, expected " +
                                     std::to_string(dim));
    values.clear();
    for (auto f : fields) {
      double v = 0;
      if (!detail::parse_double(f, v)) {
        if (f == "nan" || f == "-nan" || f == "inf" || f == "-inf" || f == "NaN" || f == "Inf" || f == "-Inf")
          throw EmbeddingFormatError(K::NonFinite, line_no, "non-finite value in row '" + id + "'");
        throw EmbeddingFormatError(K::BadValue, line_no, "invalid number '" + std::string(f) + "'");
      }
      if (!std::isfinite(v)) throw EmbeddingFormatError(K::NonFinite, line_no, "non-finite value in row '" + id + "'");
      values.push_back(v);
    }
    if (m.contains(id)) throw EmbeddingFormatError(K::DuplicateId, line_no, "duplicate report id '" + id + "'");
    m.add_row(std::move(id), values);
  }
  if (m.rows() != n_rows)
    throw EmbeddingFormatError(K::RowCountMismatch, 1,
                               "header declares " + std::to_string(n_rows) + " rows, file has " +
                                   std::to_string(m.rows()));
  return m;
}

inline EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("embedding file not found: " + path.string());
  try {
    return parse_embeddings(detail::read_file(path));
  } catch (const EmbeddingFormatError& e) {
    throw EmbeddingFormatError(e.kind(), e.line(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Fallback encoder: x -> R * tfidf(x), R a dim x V matrix with entries
// +-1/sqrt(dim). Each column is seeded from (seed, term), so a term projects
// identically under any vocabulary that contains it.

class FallbackEncoder {
 public:
  FallbackEncoder(TfidfModel model, std::size_t dim, std::uint64_t seed)
      : model_(std::move(model)), dim_(dim), seed_(seed) {
    if (dim_ < 1) throw ConfigError("embedding dim must be >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    columns_.resize(model_.dim() * dim_);
    for (std::size_t t = 0; t < model_.dim(); ++t) {
      detail::Rng rng(detail::derive_seed(seed_, detail::fnv1a(model_.vocabulary.terms[t])));
      std::uint64_t bits = 0;
      for (std::size_t k = 0; k < dim_; ++k) {
        if (k % 64 == 0) bits = rng();
        columns_[t * dim_ + k] = (bits >> (k % 64)) & 1 ? scale : -scale;
      }
    }
  }

  std::size_t dim() const { return dim_; }
  const TfidfModel& tfidf() const { return model_; }

  std::vector<double> project(const SparseVector& x) const {
    if (x.dim != model_.dim()) throw DataError("fallback encoder: feature dimension mismatch");
    std::vector<double> out(dim_, 0.0);
    for (const auto& [t, v] : x.entries) {
      const double* col = columns_.data() + static_cast<std::size_t>(t) * dim_;
      for (std::size_t k = 0; k < dim_; ++k) out[k] += v * col[k];
    }
    return out;
  }

  std::vector<double> embed(const TokenSequence& doc) const { return project(transform_tfidf(model_, doc)); }

  std::string provenance() const {
    return "fallback-random-projection dim=" + std::to_string(dim_) + " seed=" + std::to_string(seed_) +
           " vocab=" + std::to_string(model_.dim());
  }

 private:
  TfidfModel model_;
  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<double> columns_;  // column-major: term t occupies [t*dim, (t+1)*dim)
};

inline EmbeddingMatrix project_fallback_embeddings(const TfidfModel& model, std::span<const TokenSequence> docs,
                                                   std::size_t dim, std::uint64_t seed) {
  FallbackEncoder enc(model, dim, seed);
  EmbeddingMatrix m(dim, enc.provenance());
  for (const auto& d : docs) m.add_row(d.source_id, enc.embed(d));
  return m;
}

}  // namespace triage
