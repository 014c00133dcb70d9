#pragma once

// Deterministic text preprocessing: acronym expansion, lower-casing,
// tokenization and truncation.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/detail/text_io.hpp"
#include "triage/detail/utf8.hpp"
#include "triage/error.hpp"

namespace triage {

inline constexpr std::size_t kDefaultTokenCap = 150;

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string source_id;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

namespace detail {

// Alternating runs of word and non-word code points over a UTF-8 string.
struct Run {
  std::size_t begin = 0;  // byte offsets
  std::size_t end = 0;
  std::size_t code_points = 0;
  bool word = false;
};

inline std::vector<Run> segment(std::string_view text) {
  const auto& uni = UnicodeTables::instance();
  std::vector<Run> runs;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t at = i;
    const bool word = uni.is_word(decode_utf8(text, i));
    if (runs.empty() || runs.back().word != word) runs.push_back({at, at, 0, word});
    runs.back().end = i;
    ++runs.back().code_points;
  }
  return runs;
}

inline std::string lower_utf8(std::string_view text) {
  const auto& uni = UnicodeTables::instance();
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t at = i;
    const char32_t cp = decode_utf8(text, i);
    if (cp == kInvalidCodePoint) {
      out.append(text.substr(at, i - at));  // pass malformed bytes through
    } else {
      encode_utf8(uni.to_lower(cp), out);
    }
  }
  return out;
}

}  // namespace detail

// Unicode-aware lower-casing; no other change to the text.
inline std::string normalize(std::string_view text) { return detail::lower_utf8(text); }

// ---------------------------------------------------------------------------
// Acronym dictionary

class AcronymDictionary {
 public:
  struct Entry {
    std::string key;                       // e.g. "pt" or "h p"
    std::string expansion;                 // e.g. "patient"
    std::vector<std::string> key_tokens;   // word runs of the key
  };

  AcronymDictionary() = default;

  // Entries must be lowercase with unique keys and non-empty expansions.
  explicit AcronymDictionary(const std::vector<std::pair<std::string, std::string>>& entries) {
    for (const auto& [key, expansion] : entries) add(key, expansion);
  }

  void add(std::string_view key_in, std::string_view expansion_in) {
    const std::string key(detail::trim(key_in));
    const std::string expansion(detail::trim(expansion_in));
    if (key.empty()) throw DataError("acronym dictionary: empty key");
    if (expansion.empty()) throw DataError("acronym dictionary: empty expansion for '" + key + "'");
    if (normalize(key) != key || normalize(expansion) != expansion)
      throw DataError("acronym dictionary: entry '" + key + "' is not lowercase");
    Entry e{key, expansion, {}};
    for (const auto& run : detail::segment(key))
      if (run.word) e.key_tokens.emplace_back(key.substr(run.begin, run.end - run.begin));
    if (e.key_tokens.empty()) throw DataError("acronym dictionary: key '" + key + "' has no word characters");
    for (const auto& other : entries_)
      if (other.key_tokens == e.key_tokens) throw DataError("acronym dictionary: duplicate key '" + key + "'");
    entries_.push_back(std::move(e));
    // Longest key first: more tokens, then more characters, then lexicographic.
    std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      if (a.key_tokens.size() != b.key_tokens.size()) return a.key_tokens.size() > b.key_tokens.size();
      if (a.key.size() != b.key.size()) return a.key.size() > b.key.size();
      return a.key < b.key;
    });
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Two-column TSV `abbreviation<TAB>expansion`; `#` starts a comment line.
  static AcronymDictionary load(const std::filesystem::path& path) {
    AcronymDictionary dict;
    const auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
      const std::string_view line = lines[n];
      if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw DataError(path.string() + ": line " + std::to_string(n + 1) + ": expected two tab-separated columns");
      try {
        dict.add(line.substr(0, tab), line.substr(tab + 1));
      } catch (const DataError& e) {
        throw DataError(path.string() + ": line " + std::to_string(n + 1) + ": " + e.what());
      }
    }
    return dict;
  }

  // The 17-entry radiation-oncology glossary shipped with the library.
  static AcronymDictionary builtin() {
    return AcronymDictionary({
        {"pt", "patient"},
        {"pts", "patients"},
        {"sim", "simulation"},
        {"sbrt", "stereotactic body radiation therapy"},
        {"ssd", "source to surface distance"},
        {"rx", "prescription"},
        {"tx", "treatment"},
        {"imrt", "intensity-modulated radiation therapy"},
        {"appt", "appointment"},
        {"rtp", "radiation treatment planning"},
        {"ro", "radiation oncology"},
        {"qcl", "quality check lists"},
        {"h p", "history and physical"},
        {"mq", "mosaiq"},
        {"dosi", "dosimetry"},
        {"tbi", "total body irradiation"},
        {"drr", "digitally reconstructed radiograph"},
    });
  }

  // True when no expansion contains a key, which makes expansion idempotent.
  bool expansions_key_free() const;

 private:
  std::vector<Entry> entries_;
};

struct ExpansionResult {
  std::string text;
  std::size_t expansions = 0;
};

// Single left-to-right pass replacing whole-token, case-insensitive key
// occurrences. Multi-token keys match consecutive word runs separated by
// non-word characters on the same line. Inserted text is never rescanned.
inline ExpansionResult expand_acronyms_counted(std::string_view text, const AcronymDictionary& dict) {
  ExpansionResult out;
  const auto runs = detail::segment(text);
  std::vector<std::size_t> word_runs;
  for (std::size_t r = 0; r < runs.size(); ++r)
    if (runs[r].word) word_runs.push_back(r);
  std::vector<std::string> lowered(runs.size());
  for (auto r : word_runs) lowered[r] = normalize(text.substr(runs[r].begin, runs[r].end - runs[r].begin));

  std::size_t r = 0;
  std::size_t w = 0;  // index into word_runs of the next word run at or after r
  while (r < runs.size()) {
    if (!runs[r].word) {
      out.text.append(text.substr(runs[r].begin, runs[r].end - runs[r].begin));
      ++r;
      continue;
    }
    const AcronymDictionary::Entry* hit = nullptr;
    for (const auto& e : dict.entries()) {
      const std::size_t k = e.key_tokens.size();
      if (w + k > word_runs.size()) continue;
      bool ok = true;
      for (std::size_t t = 0; t < k && ok; ++t) {
        const std::size_t run = word_runs[w + t];
        ok = lowered[run] == e.key_tokens[t];
        if (ok && t > 0) {
          const std::size_t sep = run - 1;  // runs alternate, so this is the separator
          const auto sep_text = text.substr(runs[sep].begin, runs[sep].end - runs[sep].begin);
          ok = sep_text.find('\n') == std::string_view::npos && sep_text.find('\r') == std::string_view::npos;
        }
      }
      if (ok) {
        hit = &e;
        break;
      }
    }
    if (hit) {
      out.text += hit->expansion;
      ++out.expansions;
      const std::size_t k = hit->key_tokens.size();
      r = word_runs[w + k - 1] + 1;
      w += k;
    } else {
      out.text.append(text.substr(runs[r].begin, runs[r].end - runs[r].begin));
      ++r;
      ++w;
    }
  }
  return out;
}

inline std::string expand_acronyms(std::string_view text, const AcronymDictionary& dict) {
  return expand_acronyms_counted(text, dict).text;
}

inline bool AcronymDictionary::expansions_key_free() const {
  for (const auto& e : entries_)
    if (expand_acronyms_counted(e.expansion, *this).expansions != 0) return false;
  return true;
}

// Maximal runs of at least two word characters (letters, digits, underscore).
inline TokenSequence tokenize(std::string_view text, std::string source_id = {}) {
  TokenSequence seq;
  seq.source_id = std::move(source_id);
  for (const auto& run : detail::segment(text))
    if (run.word && run.code_points >= 2) seq.tokens.emplace_back(text.substr(run.begin, run.end - run.begin));
  return seq;
}

inline TokenSequence truncate_tokens(TokenSequence seq, std::size_t cap = kDefaultTokenCap) {
  if (cap < 1) throw ConfigError("token cap must be >= 1");
  if (seq.tokens.size() > cap) seq.tokens.resize(cap);
  return seq;
}

inline TokenSequence preprocess(const Report& report, const AcronymDictionary& dict,
                                std::size_t cap = kDefaultTokenCap) {
  return truncate_tokens(tokenize(normalize(expand_acronyms(report.text, dict)), report.id), cap);
}

inline std::vector<TokenSequence> preprocess_all(const Corpus& corpus, const AcronymDictionary& dict,
                                                 std::size_t cap = kDefaultTokenCap) {
  std::vector<TokenSequence> out;
  out.reserve(corpus.size());
  for (const auto& r : corpus) out.push_back(preprocess(r.report, dict, cap));
  return out;
}

inline std::vector<TokenSequence> preprocess_all(const std::vector<Report>& reports,
                                                 const AcronymDictionary& dict,
                                                 std::size_t cap = kDefaultTokenCap) {
  std::vector<TokenSequence> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(preprocess(r, dict, cap));
  return out;
}

}  // namespace triage
