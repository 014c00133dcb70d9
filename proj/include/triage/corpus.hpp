#pragma once

// Report data model, ingestion, severity binarization, seeded splitting,
// corpus statistics and the synthetic two-institution generator.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "triage/detail/log.hpp"
#include "triage/detail/random.hpp"
#include "triage/detail/text_io.hpp"
#include "triage/error.hpp"

namespace triage {

enum class Source { Inst, Safron, Synthetic, Other };
enum class Scale { Inst, Safron };
enum class Severity { Low, High };
enum class InputFormat { Jsonl, Csv };

// SAFRON categorical scale, in increasing order of severity.
enum class SafronCategory { Minor, PotentialSerious, Serious, PotentialMajor, Major, Critical };

inline constexpr std::array<std::string_view, 6> kSafronNames = {
    "minor", "potential-serious", "serious", "potential-major", "major", "critical"};

using RawSeverity = std::variant<int, SafronCategory>;

struct Report {
  std::string id;
  std::string text;
  Source source = Source::Other;
};

struct SeverityLabel {
  RawSeverity raw;
  Severity binary = Severity::Low;
};

struct LabeledReport {
  Report report;
  SeverityLabel label;
};

using Corpus = std::vector<LabeledReport>;

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::Inst: return "inst";
    case Source::Safron: return "safron";
    case Source::Synthetic: return "synthetic";
    case Source::Other: return "other";
  }
  return "other";
}

inline std::string_view to_string(Scale s) { return s == Scale::Inst ? "inst" : "safron"; }
inline std::string_view to_string(Severity s) { return s == Severity::High ? "high" : "low"; }
inline std::string_view to_string(SafronCategory c) { return kSafronNames[static_cast<int>(c)]; }

namespace detail {
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}
}  // namespace detail

inline std::optional<Source> parse_source(std::string_view s) {
  const auto v = detail::ascii_lower(detail::trim(s));
  if (v == "inst") return Source::Inst;
  if (v == "safron" || v == "sf") return Source::Safron;
  if (v == "synthetic") return Source::Synthetic;
  if (v == "other") return Source::Other;
  return std::nullopt;
}

inline std::optional<Scale> parse_scale(std::string_view s) {
  const auto v = detail::ascii_lower(detail::trim(s));
  if (v == "inst") return Scale::Inst;
  if (v == "safron" || v == "sf") return Scale::Safron;
  return std::nullopt;
}

// Case-insensitive; runs of spaces, hyphens and underscores are equivalent
// ("Potential  Serious" == "potential-serious").
inline std::optional<SafronCategory> parse_safron_category(std::string_view s) {
  std::string norm;
  bool pending_sep = false;
  for (char c : detail::trim(s)) {
    if (c == ' ' || c == '-' || c == '_' || c == '\t') {
      pending_sep = true;
      continue;
    }
    if (pending_sep && !norm.empty()) norm.push_back('-');
    pending_sep = false;
    norm.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  for (std::size_t i = 0; i < kSafronNames.size(); ++i)
    if (norm == kSafronNames[i]) return static_cast<SafronCategory>(i);
  return std::nullopt;
}

inline std::string raw_to_string(const RawSeverity& raw) {
  if (const int* v = std::get_if<int>(&raw)) return std::to_string(*v);
  return std::string(to_string(std::get<SafronCategory>(raw)));
}

// INST: 0-2 low, 3-4 high. SAFRON: "minor" low, every other category high.
inline Severity binarize_severity(const RawSeverity& raw, Scale scale) {
  if (scale == Scale::Inst) {
    const int* v = std::get_if<int>(&raw);
    if (!v) throw DataError("categorical severity '" + raw_to_string(raw) + "' on the inst scale");
    if (*v < 0 || *v > 4) throw DataError("inst severity out of range 0..4: " + std::to_string(*v));
    return *v >= 3 ? Severity::High : Severity::Low;
  }
  const auto* c = std::get_if<SafronCategory>(&raw);
  if (!c) throw DataError("integer severity '" + raw_to_string(raw) + "' on the safron scale");
  return *c == SafronCategory::Minor ? Severity::Low : Severity::High;
}

// Parses a textual raw label for the given scale. INST accepts integer text.
inline RawSeverity parse_raw_severity(std::string_view text, Scale scale) {
  const auto t = detail::trim(text);
  if (scale == Scale::Inst) {
    int v = 0;
    if (!detail::parse_int(t, v)) throw DataError("unknown inst severity label '" + std::string(t) + "'");
    if (v < 0 || v > 4) throw DataError("unknown inst severity label '" + std::string(t) + "'");
    return v;
  }
  auto c = parse_safron_category(t);
  if (!c) throw DataError("unknown safron severity label '" + std::string(t) + "'");
  return *c;
}

inline SeverityLabel make_label(const RawSeverity& raw, Scale scale) {
  return SeverityLabel{raw, binarize_severity(raw, scale)};
}

inline std::size_t count_high(const Corpus& corpus) {
  return static_cast<std::size_t>(std::count_if(corpus.begin(), corpus.end(), [](const auto& r) {
    return r.label.binary == Severity::High;
  }));
}

// ---------------------------------------------------------------------------
// Ingestion

struct IngestResult {
  Corpus labeled;
  std::vector<Report> unlabeled;
  std::vector<std::string> warnings;
};

namespace detail {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// RFC-4180: quoted fields may contain commas, doubled quotes and line breaks.
inline std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        if (in_quotes) throw DataError("line " + std::to_string(rec.line) + ": unterminated quoted field");
        rec.fields.push_back(std::move(field));
        done = true;
        break;
      }
      const char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        continue;
      }
      if (c == '"' && field.empty() && !field_was_quoted) {
        in_quotes = true;
        field_was_quoted = true;
        ++i;
      } else if (c == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        ++i;
      } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
        ++i;
      } else if (c == '\n') {
        rec.fields.push_back(std::move(field));
        ++i;
        ++line;
        done = true;
      } else {
        if (field_was_quoted)
          throw DataError("line " + std::to_string(line) + ": characters after closing quote");
        field.push_back(c);
        ++i;
      }
    }
    const bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

struct RecordSink {
  Scale scale;
  IngestResult result;
  std::unordered_set<std::string> seen;

  void add(std::size_t line, std::string id, std::string text, std::optional<RawSeverity> raw,
           Source source) {
    if (id.empty()) throw DataError("line " + std::to_string(line) + ": missing id");
    if (!seen.insert(id).second)
      throw DataError("line " + std::to_string(line) + ": duplicate report id '" + id + "'");
    if (detail::trim(text).empty())
      result.warnings.push_back("line " + std::to_string(line) + ": report '" + id + "' has empty text");
    Report report{std::move(id), std::move(text), source};
    if (!raw) {
      result.unlabeled.push_back(std::move(report));
      return;
    }
    SeverityLabel label;
    try {
      label = make_label(*raw, scale);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line) + ": " + e.what());
    }
    result.labeled.push_back({std::move(report), std::move(label)});
  }
};

inline Source default_source(Scale scale) {
  return scale == Scale::Inst ? Source::Inst : Source::Safron;
}

inline IngestResult ingest_jsonl(std::string_view text, Scale scale, bool per_record_scale) {
  RecordSink sink{scale, {}, {}};
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + "malformed JSON record (" + e.what() + ")");
    }
    if (!j.is_object()) throw DataError(where + "record is not a JSON object");
    if (!j.contains("id") || !(j["id"].is_string() || j["id"].is_number_integer()))
      throw DataError(where + "missing or non-string 'id'");
    std::string id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    if (!j.contains("text") || !(j["text"].is_string() || j["text"].is_null()))
      throw DataError(where + "missing or non-string 'text'");
    std::string body = j["text"].is_null() ? std::string() : j["text"].get<std::string>();

    Scale rec_scale = scale;
    if (per_record_scale && j.contains("scale")) {
      auto s = j["scale"].is_string() ? parse_scale(j["scale"].get<std::string>()) : std::nullopt;
      if (!s) throw DataError(where + "unknown scale");
      rec_scale = *s;
    }

    Source source = default_source(rec_scale);
    if (j.contains("source") && !j["source"].is_null()) {
      auto s = j["source"].is_string() ? parse_source(j["source"].get<std::string>()) : std::nullopt;
      if (!s) throw DataError(where + "unknown source '" + j["source"].dump() + "'");
      source = *s;
    }

    std::optional<RawSeverity> raw;
    if (j.contains("severity")) {
      const auto& sv = j["severity"];
      try {
        if (sv.is_null()) {
        } else if (sv.is_number_integer()) {
          if (rec_scale != Scale::Inst)
            throw DataError("unknown safron severity label '" + sv.dump() + "'");
          raw = sv.get<int>();
        } else if (sv.is_string()) {
          const auto s = sv.get<std::string>();
          if (!detail::trim(s).empty()) raw = parse_raw_severity(s, rec_scale);
        } else {
          throw DataError("unknown severity label '" + sv.dump() + "'");
        }
      } catch (const DataError& e) {
        throw DataError(where + e.what());
      }
    }
    if (per_record_scale) {
      sink.scale = rec_scale;
    }
    sink.add(line_no, std::move(id), std::move(body), std::move(raw), source);
  }
  return std::move(sink.result);
}

inline IngestResult ingest_csv(std::string_view text, Scale scale) {
  RecordSink sink{scale, {}, {}};
  auto records = parse_csv(text);
  if (records.empty()) return {};
  const auto& header = records.front().fields;
  auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (ascii_lower(trim(header[i])) == name) return i;
    return std::nullopt;
  };
  const auto id_col = col("id");
  const auto text_col = col("text");
  const auto sev_col = col("severity");
  const auto src_col = col("source");
  if (!id_col || !text_col || !sev_col)
    throw DataError("line 1: CSV header must contain id,text,severity");
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const auto where = "line " + std::to_string(rec.line) + ": ";
    if (rec.fields.size() != header.size())
      throw DataError(where + "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(rec.fields.size()));
    std::optional<RawSeverity> raw;
    const auto sev = trim(rec.fields[*sev_col]);
    if (!sev.empty()) {
      try {
        raw = parse_raw_severity(sev, scale);
      } catch (const DataError& e) {
        throw DataError(where + e.what());
      }
    }
    Source source = default_source(scale);
    if (src_col && !trim(rec.fields[*src_col]).empty()) {
      auto s = parse_source(rec.fields[*src_col]);
      if (!s) throw DataError(where + "unknown source '" + rec.fields[*src_col] + "'");
      source = *s;
    }
    sink.add(rec.line, rec.fields[*id_col], rec.fields[*text_col], std::move(raw), source);
  }
  return std::move(sink.result);
}

}  // namespace detail

// Reads reports from a JSONL or CSV file. Records without a severity land in
// `unlabeled`; empty texts are accepted with a warning.
inline IngestResult ingest_reports(const std::filesystem::path& path, InputFormat format,
                                   Scale scale) {
  const std::string text = detail::read_file(path);
  IngestResult result = format == InputFormat::Jsonl ? detail::ingest_jsonl(text, scale, false)
                                                     : detail::ingest_csv(text, scale);
  for (const auto& w : result.warnings) warn(path.string() + ": " + w);
  return result;
}

// Persisted corpus: JSONL with an explicit per-record scale so that corpora
// mixing both scales survive a round trip.
inline std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus) {
    nlohmann::ordered_json j;
    j["id"] = r.report.id;
    j["text"] = r.report.text;
    if (const int* v = std::get_if<int>(&r.label.raw)) {
      j["severity"] = *v;
      j["scale"] = "inst";
    } else {
      j["severity"] = std::string(to_string(std::get<SafronCategory>(r.label.raw)));
      j["scale"] = "safron";
    }
    j["source"] = std::string(to_string(r.report.source));
    j["label"] = std::string(to_string(r.label.binary));
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  detail::write_file_atomic(path, corpus_to_jsonl(corpus));
}

inline std::string reports_to_jsonl(const std::vector<Report>& reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["text"] = r.text;
    j["source"] = std::string(to_string(r.source));
    out += j.dump();
    out += '\n';
  }
  return out;
}

// Loads a corpus written by write_corpus (or any JSONL with a scale field;
// records lacking one default to `fallback`).
inline IngestResult load_corpus(const std::filesystem::path& path, Scale fallback = Scale::Inst) {
  return detail::ingest_jsonl(detail::read_file(path), fallback, true);
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
  double train_frac = 0.70;
  double val_frac = 0.15;
  double test_frac = 0.15;
  std::uint64_t seed = 0;
  bool stratified = false;

  void validate() const {
    for (double f : {train_frac, val_frac, test_frac})
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0, 1]");
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
      throw ConfigError("split fractions must sum to 1");
  }
};

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
};

namespace detail {

struct PartSizes {
  std::size_t train, val, test;
};

// val and test get round(frac * n); the remainder goes to train.
inline PartSizes part_sizes(std::size_t n, double val_frac, double test_frac) {
  auto val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(n)));
  auto test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(n)));
  val = std::min(val, n);
  test = std::min(test, n - val);
  return {n - val - test, val, test};
}

}  // namespace detail

// Seeded partition into train/val/test. Part sizes follow round(frac * N)
// for val and test with the remainder assigned to train. When stratified,
// the HIGH count of each part is allocated by the same rule.
inline CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.empty()) throw DataError("cannot split an empty corpus");
  const std::size_t n = corpus.size();
  const auto sizes = detail::part_sizes(n, spec.val_frac, spec.test_frac);
  detail::Rng rng(detail::derive_seed(spec.seed, 0x51117));

  std::vector<std::size_t> train_idx, val_idx, test_idx;
  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    detail::shuffle(order, rng);
    val_idx.assign(order.begin(), order.begin() + sizes.val);
    test_idx.assign(order.begin() + sizes.val, order.begin() + sizes.val + sizes.test);
    train_idx.assign(order.begin() + sizes.val + sizes.test, order.end());
  } else {
    std::vector<std::size_t> high, low;
    for (std::size_t i = 0; i < n; ++i)
      (corpus[i].label.binary == Severity::High ? high : low).push_back(i);
    if (high.empty()) throw DataError("stratified split requires at least one HIGH report");
    detail::shuffle(high, rng);
    detail::shuffle(low, rng);
    const double p = static_cast<double>(high.size()) / static_cast<double>(n);
    auto alloc = [&](std::size_t part) {
      return static_cast<std::size_t>(std::llround(p * static_cast<double>(part)));
    };
    std::size_t h_val = std::min(alloc(sizes.val), high.size());
    std::size_t h_test = std::min(alloc(sizes.test), high.size() - h_val);
    // Keep every part's LOW demand satisfiable.
    auto fix = [&](std::size_t& h, std::size_t part) {
      if (part - std::min(h, part) > low.size()) h = part - low.size();
      h = std::min(h, part);
    };
    fix(h_val, sizes.val);
    fix(h_test, sizes.test);
    std::size_t h_train = high.size() - h_val - h_test;
    if (h_train > sizes.train) {
      const std::size_t excess = h_train - sizes.train;
      const std::size_t to_val = std::min(excess, sizes.val - h_val);
      h_val += to_val;
      h_test += excess - to_val;
      h_train = sizes.train;
    }
    std::size_t hi = 0, lo = 0;
    auto take = [&](std::vector<std::size_t>& dst, std::size_t part, std::size_t h) {
      for (std::size_t k = 0; k < h; ++k) dst.push_back(high[hi++]);
      for (std::size_t k = h; k < part; ++k) dst.push_back(low[lo++]);
      detail::shuffle(dst, rng);
    };
    take(val_idx, sizes.val, h_val);
    take(test_idx, sizes.test, h_test);
    take(train_idx, sizes.train, h_train);
  }

  CorpusSplit out;
  auto gather = [&](const std::vector<std::size_t>& idx, Corpus& dst) {
    dst.reserve(idx.size());
    for (auto i : idx) dst.push_back(corpus[i]);
  };
  gather(train_idx, out.train);
  gather(val_idx, out.val);
  gather(test_idx, out.test);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
  std::size_t n_reports = 0;
  double median_words = 0.0;
  double std_words = 0.0;  // population standard deviation
  double high_severity_frac = 0.0;
};

inline std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

inline CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("corpus statistics need at least one report");
  std::vector<double> counts;
  counts.reserve(corpus.size());
  for (const auto& r : corpus) counts.push_back(static_cast<double>(word_count(r.report.text)));
  CorpusStats s;
  s.n_reports = corpus.size();
  std::vector<double> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  s.median_words = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= static_cast<double>(counts.size());
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  s.std_words = std::sqrt(var / static_cast<double>(counts.size()));
  s.high_severity_frac = static_cast<double>(count_high(corpus)) / static_cast<double>(corpus.size());
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic two-institution corpus

enum class Institution { A, B };

struct SyntheticSpec {
  std::size_t n_reports = 1000;
  double prevalence = 0.2;
  double vocab_shift = 0.0;
  double label_noise = 0.0;
  std::size_t length_median = 44;
  std::uint64_t seed = 0;

  void validate() const {
    for (double f : {prevalence, vocab_shift, label_noise})
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("synthetic spec fractions must lie in [0, 1]");
    if (length_median < 1) throw ConfigError("length_median must be >= 1");
  }
};

namespace synthetic {

// Fixture lexicons. They are generator inputs, not claims about real corpora.
inline constexpr std::array<std::string_view, 32> kHazard = {
    "overdose",   "underdose",  "misadministration", "wrong",       "incorrect",   "collision",
    "exceeded",   "unplanned",  "injury",            "mistreatment", "mislabeled", "misaligned",
    "omitted",    "duplicate",  "overexposure",      "miscalculated", "shifted",   "interlock",
    "failure",    "bypassed",   "unverified",        "mismatch",    "erroneous",   "laterality",
    "geographic", "miss",       "isocenter",         "fraction",    "dose",        "override",
    "reversed",   "contraindicated"};

inline constexpr std::array<std::string_view, 32> kRoutine = {
    "rescheduled", "reminder",  "paperwork",  "signature",  "printer",    "parking",
    "voicemail",   "fax",       "billing",    "insurance",  "courtesy",   "typo",
    "spelling",    "formatting", "meeting",   "calendar",   "login",      "password",
    "badge",       "supply",    "linen",      "transport",  "lobby",      "waiting",
    "consent",     "form",      "scanner",    "email",      "cosmetic",   "label",
    "template",    "training"};

inline constexpr std::array<std::string_view, 48> kFiller = {
    "patient", "pt",      "treatment", "tx",        "plan",      "therapist", "physicist",
    "machine", "sim",     "was",       "the",       "for",       "during",    "noted",
    "called",  "checked", "day",       "before",    "after",     "team",      "room",
    "chart",   "field",   "linac",     "ct",        "imaging",   "setup",     "nurse",
    "md",      "reviewed", "process",  "schedule",  "report",    "time",      "found",
    "prior",   "session", "department", "clinic",   "system",    "workflow",  "request",
    "order",   "sbrt",    "imrt",      "dosi",      "mq",        "qcl"};

inline constexpr std::array<std::string_view, 12> kOnsets = {"b", "d", "f", "g", "k", "l",
                                                              "m", "n", "p", "r", "t", "v"};
inline constexpr std::array<std::string_view, 5> kVowels = {"a", "e", "i", "o", "u"};

// Deterministic pseudo-word used as the institution-B synonym of lexicon
// entry `index` in lexicon `lexicon` (0 hazard, 1 routine).
inline std::string synonym(int lexicon, std::size_t index) {
  std::uint64_t h = detail::splitmix64(static_cast<std::uint64_t>(lexicon) * 1000003ULL + index);
  std::string w = lexicon == 0 ? "zh" : "qu";
  for (int s = 0; s < 3; ++s) {
    w += kOnsets[h % kOnsets.size()];
    h /= kOnsets.size();
    w += kVowels[h % kVowels.size()];
    h /= kVowels.size();
  }
  w += std::to_string(index);
  return w;
}

inline std::vector<std::string> lexicon(int which, Institution inst, double vocab_shift) {
  const auto src = which == 0 ? std::vector<std::string_view>(kHazard.begin(), kHazard.end())
                              : std::vector<std::string_view>(kRoutine.begin(), kRoutine.end());
  const auto shifted = inst == Institution::B
                           ? static_cast<std::size_t>(std::llround(vocab_shift * static_cast<double>(src.size())))
                           : 0;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < src.size(); ++i)
    out.push_back(i < shifted ? synonym(which, i) : std::string(src[i]));
  return out;
}

// Per-word generation knobs.
inline constexpr double kInformativeRate = 0.15;  // chance a word comes from a class lexicon
inline constexpr double kConsistentRate = 0.70;   // chance that lexicon matches the true class
inline constexpr double kLengthSigma = 0.6;       // log-normal shape of report length

}  // namespace synthetic

// Generates labeled reports for one synthetic institution. Institution A
// reports carry INST-scale raw labels, institution B reports SAFRON-scale.
inline Corpus generate_synthetic_corpus(const SyntheticSpec& spec, Institution inst) {
  spec.validate();
  if (spec.prevalence == 0.0 || spec.prevalence == 1.0)
    warn("synthetic prevalence is 0 or 1; stratified splitting of this corpus will fail");
  const auto hazard = synthetic::lexicon(0, inst, spec.vocab_shift);
  const auto routine = synthetic::lexicon(1, inst, spec.vocab_shift);
  const std::string prefix = inst == Institution::A ? "A-" : "B-";
  detail::Rng rng(detail::derive_seed(spec.seed, inst == Institution::A ? 0xA : 0xB));

  Corpus out;
  out.reserve(spec.n_reports);
  for (std::size_t r = 0; r < spec.n_reports; ++r) {
    const bool high = detail::bernoulli(rng, spec.prevalence);
    const double len_draw = static_cast<double>(spec.length_median) *
                            std::exp(synthetic::kLengthSigma * detail::standard_normal(rng));
    const auto len = static_cast<std::size_t>(std::clamp(std::llround(len_draw), 3LL, 1000LL));
    std::string text;
    for (std::size_t w = 0; w < len; ++w) {
      std::string_view word;
      if (detail::bernoulli(rng, synthetic::kInformativeRate)) {
        const bool consistent = detail::bernoulli(rng, synthetic::kConsistentRate);
        const auto& lex = (high == consistent) ? hazard : routine;
        word = lex[detail::bounded(rng, lex.size())];
      } else {
        word = synthetic::kFiller[detail::bounded(rng, synthetic::kFiller.size())];
      }
      if (w) text += (w % 11 == 0) ? ". " : " ";
      text += word;
    }
    text += '.';
    bool label_high = high;
    if (detail::bernoulli(rng, spec.label_noise)) label_high = !label_high;

    RawSeverity raw;
    if (inst == Institution::A) {
      raw = label_high ? 3 + static_cast<int>(detail::bernoulli(rng, 0.2))
                       : static_cast<int>(detail::bounded(rng, 3));
    } else {
      raw = label_high ? static_cast<SafronCategory>(1 + detail::bounded(rng, 5))
                       : SafronCategory::Minor;
    }
    char id[32];
    std::snprintf(id, sizeof id, "%06zu", r);
    const Scale scale = inst == Institution::A ? Scale::Inst : Scale::Safron;
    out.push_back({Report{prefix + id, std::move(text), Source::Synthetic}, make_label(raw, scale)});
  }
  return out;
}

}  // namespace triage
