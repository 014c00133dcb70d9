#include <random>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace triage;

namespace {

const auto H = Severity::High;
const auto L = Severity::Low;

std::vector<int> as_int(const std::vector<Severity>& y) {
  std::vector<int> out;
  for (auto s : y) out.push_back(s == H ? 1 : 0);
  return out;
}

// 115 reports laid out so that flagging the top 23 yields (18, 5, 21, 71).
struct AlertFixture {
  std::vector<double> scores;
  std::vector<Severity> labels;
  std::vector<std::string> ids;
};

AlertFixture alert_fixture() {
  AlertFixture f;
  auto add = [&](double s, Severity y) {
    f.ids.push_back("r" + std::to_string(1000 + f.scores.size()));
    f.scores.push_back(s);
    f.labels.push_back(y);
  };
  for (int i = 0; i < 18; ++i) add(10.0 + i, H);
  for (int i = 0; i < 5; ++i) add(9.5 - 0.01 * i, L);
  for (int i = 0; i < 21; ++i) add(5.0 - 0.1 * i, H);
  for (int i = 0; i < 71; ++i) add(4.0 - 0.05 * i, L);
  return f;
}

}  // namespace

TEST_CASE("ROC basics", "[eval]") {
  CHECK(auroc_rank(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<Severity>{L, L, H, H}) == 1.0);
  CHECK(auroc_rank(std::vector<double>{1, 1, 1, 1}, std::vector<Severity>{L, H, L, H}) == 0.5);
  CHECK(auroc_rank(std::vector<double>{0.9, 0.8, 0.2}, std::vector<Severity>{L, L, H}) == 0.0);

  const auto c = roc_curve(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<Severity>{L, L, H, H});
  CHECK(c.points.front().fpr == 0.0);
  CHECK(c.points.front().tpr == 0.0);
  CHECK(c.points.back().fpr == 1.0);
  CHECK(c.points.back().tpr == 1.0);
  CHECK(c.auroc == 0.75);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
    CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
  }
  CHECK(roc_to_csv(c).rfind("fpr,tpr\n0,0\n", 0) == 0);
}

TEST_CASE("ROC errors", "[eval]") {
  CHECK_THROWS_AS(roc_curve(std::vector<double>{1, 2}, std::vector<Severity>{H, H}), DataError);
  CHECK_THROWS_AS(roc_curve(std::vector<double>{1, 2}, std::vector<Severity>{H}), DataError);
  CHECK_THROWS_AS(auroc_rank(std::vector<double>{std::nan(""), 2}, std::vector<Severity>{H, L}), NumericError);
}

TEST_CASE("rank AUROC equals the pairwise oracle on random tied data", "[eval]") {
  std::mt19937_64 rng(123);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> s;
    std::vector<Severity> y;
    for (int i = 0; i < 20; ++i) {
      s.push_back(static_cast<double>(rng() % 7));
      y.push_back(i == 0 ? H : i == 1 ? L : (rng() % 2 ? H : L));
    }
    const auto c = roc_curve(s, y);
    const double expect = oracle::pairwise_auroc(s, as_int(y));
    CHECK(std::abs(c.auroc - expect) <= 1e-12);
    CHECK(std::abs(trapezoid_area(c) - expect) <= 1e-12);
  }
}

TEST_CASE("alert-rate thresholds", "[eval]") {
  std::vector<double> s(115);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i % 13);
  CHECK(threshold_for_alert_rate(s, 0.20).k == 23);
  CHECK(threshold_for_alert_rate(s, 0.50).k == 58);
  CHECK(threshold_for_alert_rate(s, 1.0).flagged.size() == 115);
  CHECK(threshold_for_alert_rate(s, 0.0).flagged.empty());
  CHECK(std::isinf(threshold_for_alert_rate(s, 0.0).threshold));
  CHECK_THROWS_AS(threshold_for_alert_rate(std::vector<double>{}, 0.2), DataError);
  CHECK_THROWS_AS(threshold_for_alert_rate(s, 1.5), ConfigError);

  // Boundary ties go to the smaller ids.
  const std::vector<double> t = {5, 3, 3, 3, 1};
  const std::vector<std::string> ids = {"e", "d", "b", "c", "a"};
  const auto sel = threshold_for_alert_rate(t, 0.4, ids);
  CHECK(sel.k == 2);
  CHECK(sel.threshold == 3.0);
  CHECK(sel.flagged == std::vector<std::size_t>{0, 2});
}

TEST_CASE("confusion counts and reference operating points", "[eval]") {
  const auto f = alert_fixture();
  const auto sel = threshold_for_alert_rate(f.scores, 0.20, f.ids);
  const auto c = confusion_at_threshold(f.labels, sel.flagged);
  CHECK(c == ConfusionCounts{18, 5, 21, 71});
  const auto m = confusion_metrics(c);
  CHECK(std::abs(*m.sensitivity - 0.46) <= 0.005);
  CHECK(std::abs(*m.specificity - 0.93) <= 0.005);
  CHECK(std::abs(*m.ppv - 0.78) <= 0.005);
  CHECK(std::abs(*m.npv - 0.77) <= 0.005);

  const auto m3 = confusion_metrics({31, 27, 8, 49});
  CHECK(std::abs(*m3.sensitivity - 0.79) <= 0.005);
  CHECK(std::abs(*m3.specificity - 0.64) <= 0.005);
  CHECK(std::abs(*m3.ppv - 0.53) <= 0.005);
  CHECK(std::abs(*m3.npv - 0.86) <= 0.005);

  const auto perfect = confusion_metrics({7, 0, 0, 7});
  CHECK(perfect.sensitivity == 1.0);
  CHECK(perfect.specificity == 1.0);
  CHECK(perfect.ppv == 1.0);
  CHECK(perfect.npv == 1.0);

  const std::vector<Severity> all_high(4, H);
  CHECK(confusion_at_threshold(all_high, std::vector<std::size_t>{0, 1, 2, 3}) == ConfusionCounts{4, 0, 0, 0});
  const auto none = confusion_at_threshold(std::vector<Severity>{H, L}, std::vector<std::size_t>{});
  CHECK(none.tp == 0);
  CHECK(none.fp == 0);
  CHECK_THROWS_AS(confusion_at_threshold(all_high, std::vector<std::size_t>{9}), DataError);
}

TEST_CASE("undefined metrics are flagged, not zero", "[eval]") {
  const auto m = confusion_metrics({0, 0, 5, 5});
  CHECK_FALSE(m.ppv.has_value());
  CHECK(m.sensitivity == 0.0);
  const auto f = f1_scores({0, 0, 0, 5});
  CHECK_FALSE(f.binary.has_value());
  CHECK_FALSE(f.macro.has_value());
  CHECK(f.micro == 1.0);
}

TEST_CASE("F1 variants", "[eval]") {
  const auto t2 = f1_scores({18, 5, 21, 71});
  CHECK(*t2.binary == Catch::Approx(36.0 / 62.0).epsilon(1e-15));
  CHECK(*t2.micro == Catch::Approx(89.0 / 115.0).epsilon(1e-15));
  const double low = 142.0 / (142.0 + 21.0 + 5.0);
  CHECK(*t2.macro == Catch::Approx((36.0 / 62.0 + low) / 2.0).epsilon(1e-15));

  const auto perfect = f1_scores({3, 0, 0, 9});
  CHECK(perfect.binary == 1.0);
  CHECK(perfect.micro == 1.0);
  CHECK(perfect.macro == 1.0);

  // All-negative predictions with rare positives.
  const auto degenerate = f1_scores({0, 0, 5, 95});
  CHECK(degenerate.binary == 0.0);
  CHECK(*degenerate.macro < *degenerate.micro);
}

TEST_CASE("metric report", "[eval]") {
  const auto f = alert_fixture();
  const std::vector<double> rates = {0.2, 0.5, 1.0};
  const auto r = evaluate_scores(f.scores, f.labels, rates, 7.0, f.ids);
  REQUIRE(r.operating_points.size() == 3);
  CHECK(r.operating_points[0].counts == ConfusionCounts{18, 5, 21, 71});
  CHECK(r.operating_points[1].counts.tp + r.operating_points[1].counts.fp == 58);
  CHECK(r.operating_points[2].metrics.sensitivity == 1.0);
  CHECK(r.decision_counts == ConfusionCounts{18, 5, 21, 71});
  for (const auto& op : r.operating_points) {
    const double rate = static_cast<double>(op.counts.tp + op.counts.fp) / static_cast<double>(op.counts.total());
    CHECK(std::abs(rate - op.alert_rate) <= 0.5 / 115.0);
  }
  const auto text = metric_report_to_text(r);
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("auroc "));
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("\t18\t5\t21\t71\t"));
  CHECK(text == metric_report_to_text(evaluate_scores(f.scores, f.labels, rates, 7.0, f.ids)));
}

TEST_CASE("Krippendorff alpha", "[eval]") {
  RaterTable agree = {{"r1", {H, {3, 3, 3}}}, {"r2", {L, {1, 1}}}, {"r3", {L, {0, 0, 0, 0}}}};
  CHECK(krippendorff_alpha(agree, AlphaMetric::Nominal) == 1.0);
  CHECK(krippendorff_alpha(agree, AlphaMetric::Ordinal) == 1.0);
  RaterTable constant = {{"r1", {H, {2, 2}}}, {"r2", {L, {2, 2}}}};
  CHECK(krippendorff_alpha(constant, AlphaMetric::Nominal) == 1.0);

  RaterTable swapped = {{"u1", {H, {0, 1}}}, {"u2", {L, {1, 0}}}};
  const std::vector<std::vector<int>> units = {{0, 1}, {1, 0}};
  const double nominal = oracle::krippendorff_pairwise(units, [](int a, int b) { return a == b ? 0.0 : 1.0; });
  CHECK(nominal == Catch::Approx(-0.5).epsilon(1e-15));
  CHECK(std::abs(krippendorff_alpha(swapped, AlphaMetric::Nominal) - nominal) <= 1e-12);

  // Reports with a single rating are not pairable and change nothing.
  RaterTable with_single = swapped;
  with_single["u3"] = {H, {4}};
  CHECK(krippendorff_alpha(with_single, AlphaMetric::Nominal) == krippendorff_alpha(swapped, AlphaMetric::Nominal));

  CHECK_THROWS_AS(krippendorff_alpha(RaterTable{{"x", {H, {1}}}}, AlphaMetric::Nominal), DataError);
}

TEST_CASE("Krippendorff alpha matches the pairwise definition on random ragged tables", "[eval]") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    RaterTable t;
    std::vector<std::vector<int>> units;
    const int n_units = 2 + static_cast<int>(rng() % 6);
    for (int u = 0; u < n_units; ++u) {
      std::vector<int> vals(1 + rng() % 4);
      for (auto& v : vals) v = static_cast<int>(rng() % 5);
      units.push_back(vals);
      t["u" + std::to_string(u)] = {u % 2 ? H : L, vals};
    }
    bool pairable = false, varied = false;
    std::set<int> seen;
    for (const auto& u : units)
      if (u.size() >= 2) {
        pairable = true;
        seen.insert(u.begin(), u.end());
      }
    varied = seen.size() > 1;
    if (!pairable || !varied) continue;
    const double nom = oracle::krippendorff_pairwise(units, [](int a, int b) { return a == b ? 0.0 : 1.0; });
    CHECK(std::abs(krippendorff_alpha(t, AlphaMetric::Nominal) - nom) <= 1e-12);
    const double ord = oracle::krippendorff_pairwise(units, oracle::ordinal_delta(units));
    CHECK(std::abs(krippendorff_alpha(t, AlphaMetric::Ordinal) - ord) <= 1e-12);
  }
}

TEST_CASE("pooled rater AUROC", "[eval]") {
  RaterTable ordered = {{"a", {H, {4, 3}}}, {"b", {L, {1, 0}}}};
  CHECK(pooled_rater_auroc(ordered) == 1.0);
  RaterTable flat = {{"a", {H, {2, 2}}}, {"b", {L, {2, 2}}}};
  CHECK(pooled_rater_auroc(flat) == 0.5);
  RaterTable mixed = {{"a", {H, {3, 1}}}, {"b", {L, {2, 3}}}};
  CHECK(pooled_rater_auroc(mixed) == oracle::pairwise_auroc({3, 1, 2, 3}, {1, 1, 0, 0}));
  RaterTable one_class = {{"a", {H, {3}}}, {"b", {H, {1}}}};
  CHECK_THROWS_AS(pooled_rater_auroc(one_class), DataError);
  RaterTable empty_scores = {{"a", {H, {}}}};
  CHECK_THROWS_AS(pooled_rater_auroc(empty_scores), DataError);
}
