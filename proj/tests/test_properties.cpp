// Seeded randomized properties. Each case draws kTrials inputs from a fixed
// seed so failures reproduce; the trial index is captured on failure.

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"

using namespace triage;

namespace {

constexpr int kTrials = 200;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::uint64_t bits() { return rng_(); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[size(0, v.size() - 1)];
  }

  // Free text mixing ASCII words, punctuation, acronyms and non-ASCII letters.
  std::string text(std::size_t max_words) {
    static const std::vector<std::string> pieces = {
        "Pt",    "pt",    "RX",     "tx",     "H&P",   "fall",  "Wrong",  "DOSE",  "Ärzt", "ÉCHEC", "naïve",
        "ΣΟΦΙΑ", "straße", "(iv)",  "o.r.",  "---",   ",",     ".",      "42",    "mg/kg", "Ω",    "İstanbul",
        "ICU",   "NPO",   "patient", "monitor", "alarm", "\t",  "  ",     "x-ray", "O2",   "CT"};
    std::string out;
    const std::size_t n = size(0, max_words);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += coin(0.8) ? " " : "";
      out += pick(pieces);
    }
    return out;
  }

  std::vector<double> scores(std::size_t n, bool ties) {
    std::vector<double> s(n);
    for (auto& v : s) v = ties ? static_cast<double>(size(0, 5)) : real(-5.0, 5.0);
    return s;
  }

  std::vector<Severity> labels(std::size_t n) {
    std::vector<Severity> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i == 0 ? Severity::High : i == 1 ? Severity::Low : coin(0.3) ? Severity::High : Severity::Low;
    std::shuffle(y.begin(), y.end(), rng_);
    return y;
  }

 private:
  std::mt19937_64 rng_;
};

Corpus random_corpus(Gen& g, std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i)
    c.push_back(testing::labeled("r" + std::to_string(i), g.text(8) + " word", static_cast<int>(g.size(0, 4))));
  return c;
}

std::set<std::string> ids_of(const Corpus& c) {
  std::set<std::string> s;
  for (const auto& r : c) s.insert(r.report.id);
  return s;
}

}  // namespace

TEST_CASE("split is a partition of the corpus", "[property]") {
  Gen g(1);
  for (int t = 0; t < kTrials; ++t) {
    CAPTURE(t);
    const auto corpus = random_corpus(g, g.size(4, 60));
    const double tr = g.real(0.1, 0.8);
    const double va = g.real(0.0, 1.0 - tr);
    SplitSpec spec{tr, va, 1.0 - tr - va, g.bits(), false};
    const auto s = split_corpus(corpus, spec);
    CHECK(s.train.size() + s.val.size() + s.test.size() == corpus.size());
    std::set<std::string> all;
    for (const auto* part : {&s.train, &s.val, &s.test})
      for (const auto& id : ids_of(*part)) CHECK(all.insert(id).second);
    CHECK(all == ids_of(corpus));
  }
}

TEST_CASE("normalization is idempotent", "[property]") {
  Gen g(2);
  for (int t = 0; t < kTrials; ++t) {
    const auto s = g.text(20);
    CAPTURE(s);
    const auto once = normalize(s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("preprocessing respects the token cap", "[property]") {
  Gen g(3);
  const auto dict = AcronymDictionary::builtin();
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t cap = g.size(1, 30);
    const Report r{"id", g.text(60), Source::Other};
    CAPTURE(r.text, cap);
    const auto seq = preprocess(r, dict, cap);
    CHECK(seq.size() <= cap);
    CHECK(seq.source_id == "id");
    for (const auto& tok : seq.tokens) {
      CHECK_FALSE(tok.empty());
      CHECK(normalize(tok) == tok);
    }
  }
}

TEST_CASE("an empty acronym dictionary leaves text unchanged", "[property]") {
  Gen g(4);
  const AcronymDictionary empty(std::vector<std::pair<std::string, std::string>>{});
  for (int t = 0; t < kTrials; ++t) {
    const auto s = g.text(15);
    CHECK(expand_acronyms(s, empty) == s);
  }
}

TEST_CASE("tf-idf rows are unit length or zero and ignore token order", "[property]") {
  Gen g(5);
  const auto dict = AcronymDictionary::builtin();
  const auto docs = preprocess_all(random_corpus(g, 80), dict);
  const auto model = fit_tfidf(docs, 2);
  for (int t = 0; t < kTrials; ++t) {
    auto doc = docs[g.size(0, docs.size() - 1)];
    const auto x = transform_tfidf(model, doc);
    const double n2 = dot(x, x);
    if (x.entries.empty()) CHECK(n2 == 0.0);
    else CHECK(std::abs(n2 - 1.0) <= 1e-12);
    for (std::size_t i = 1; i < x.entries.size(); ++i) CHECK(x.entries[i - 1].first < x.entries[i].first);
    std::shuffle(doc.tokens.begin(), doc.tokens.end(), std::mt19937_64(g.bits()));
    const auto y = transform_tfidf(model, doc);
    REQUIRE(y.entries.size() == x.entries.size());
    for (std::size_t i = 0; i < x.entries.size(); ++i) {
      CHECK(y.entries[i].first == x.entries[i].first);
      CHECK(std::abs(y.entries[i].second - x.entries[i].second) <= 1e-15);
    }
  }
}

TEST_CASE("AUROC is invariant to monotone transforms and flips under negation", "[property]") {
  Gen g(6);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = g.size(2, 40);
    const auto y = g.labels(n);
    const auto s = g.scores(n, g.coin());
    const double a = auroc_rank(s, y);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    std::vector<double> mono(n), neg(n);
    for (std::size_t i = 0; i < n; ++i) {
      mono[i] = std::exp(0.3 * s[i]) + 7.0;
      neg[i] = -s[i];
    }
    CHECK(std::abs(auroc_rank(mono, y) - a) <= 1e-12);
    CHECK(std::abs(auroc_rank(neg, y) - (1.0 - a)) <= 1e-12);
  }
}

TEST_CASE("alert-rate selection flags exactly k reports", "[property]") {
  Gen g(7);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = g.size(1, 80);
    const auto s = g.scores(n, g.coin());
    const double rate = g.real(0.0, 1.0);
    CAPTURE(n, rate);
    const auto sel = threshold_for_alert_rate(s, rate);
    const auto k = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5));
    CHECK(sel.k == k);
    CHECK(sel.flagged.size() == k);
    CHECK(std::is_sorted(sel.flagged.begin(), sel.flagged.end()));
    for (auto i : sel.flagged) CHECK(s[i] >= sel.threshold);
    std::size_t above = 0;
    for (double v : s) above += v > sel.threshold;
    CHECK(above <= k);
  }
}

TEST_CASE("sensitivity does not decrease with the alert rate", "[property]") {
  Gen g(8);
  for (int t = 0; t < kTrials / 4; ++t) {
    const std::size_t n = g.size(2, 60);
    const auto y = g.labels(n);
    const auto s = g.scores(n, g.coin());
    double prev = -1.0;
    for (double rate = 0.0; rate <= 1.0 + 1e-12; rate += 0.05) {
      const auto c = confusion_at_threshold(y, threshold_for_alert_rate(s, std::min(rate, 1.0)).flagged);
      const double sens = *confusion_metrics(c).sensitivity;
      CHECK(sens >= prev);
      prev = sens;
    }
    CHECK(prev == 1.0);
  }
}

TEST_CASE("alpha is 1 exactly when every unit is unanimous", "[property]") {
  Gen g(9);
  for (int t = 0; t < kTrials; ++t) {
    RaterTable table;
    const std::size_t units = g.size(2, 8);
    bool unanimous = true;
    std::set<int> values;
    for (std::size_t u = 0; u < units; ++u) {
      const int base = static_cast<int>(g.size(0, 4));
      std::vector<int> r(g.size(2, 4), base);
      if (g.coin(0.3)) {
        r.back() = static_cast<int>((base + g.size(1, 4)) % 5);
        unanimous = false;
      }
      values.insert(r.begin(), r.end());
      table["u" + std::to_string(u)] = {Severity::Low, r};
    }
    if (values.size() < 2) continue;
    for (auto metric : {AlphaMetric::Nominal, AlphaMetric::Ordinal}) {
      const double a = krippendorff_alpha(table, metric);
      if (unanimous) CHECK(a == 1.0);
      else CHECK(a < 1.0);
    }
  }
}

TEST_CASE("embedding text round-trips", "[property]") {
  Gen g(10);
  for (int t = 0; t < kTrials / 4; ++t) {
    const std::size_t dim = g.size(1, 8);
    EmbeddingMatrix m(dim, g.coin() ? "" : "p " + std::to_string(t));
    const std::size_t rows = g.size(0, 10);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> v(dim);
      for (auto& x : v) x = g.real(-1.0, 1.0) * std::pow(10.0, g.real(-300.0, 300.0));
      m.add_row("row" + std::to_string(r), v);
    }
    CHECK(parse_embeddings(embeddings_to_text(m)) == m);
  }
}

TEST_CASE("head output lies in the open unit interval", "[property]") {
  Gen g(11);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t dim = g.size(1, 10);
    HeadModel m{std::vector<double>(dim), g.real(-3.0, 3.0)};
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      m.weights[k] = g.real(-1.0, 1.0);
      x[k] = g.real(-1.0, 1.0);
    }
    const double p = head_forward(m, x);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}
