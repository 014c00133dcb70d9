#include <algorithm>

#include "helpers.hpp"
#include "oracles.hpp"
#include "svm_fixtures.hpp"

using namespace triage;
using fixtures::point;

namespace {

std::vector<std::vector<double>> gram(const std::vector<SparseVector>& xs, KernelKind kind, double gamma) {
  std::vector<std::vector<double>> k(xs.size(), std::vector<double>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const auto a = xs[i].to_dense(), b = xs[j].to_dense();
      double s = 0.0;
      for (std::size_t d = 0; d < a.size(); ++d) s += kind == KernelKind::Linear ? a[d] * b[d] : (a[d] - b[d]) * (a[d] - b[d]);
      k[i][j] = kind == KernelKind::Linear ? s : std::exp(-gamma * s);
    }
  return k;
}

std::vector<double> signs(const std::vector<Severity>& ys) {
  std::vector<double> y;
  for (auto s : ys) y.push_back(s == Severity::High ? 1.0 : -1.0);
  return y;
}

}  // namespace

TEST_CASE("two symmetric points give f(x) = x", "[svm]") {
  SvmConfig cfg;
  cfg.kernel = {KernelKind::Linear, std::nullopt};
  cfg.C = 100;
  const std::vector<SparseVector> xs = {point({-1}), point({1})};
  const std::vector<Severity> ys = {Severity::Low, Severity::High};
  const auto m = train_svm(xs, ys, cfg);
  CHECK(decision_score(m, point({2})) == Catch::Approx(2.0).margin(1e-9));
  CHECK(classify_score(decision_score(m, point({2}))) == Severity::High);
  CHECK(m.bias == Catch::Approx(0.0).margin(1e-12));
  // x = 0 scores exactly the bias; a zero score classifies LOW.
  SparseVector zero;
  zero.dim = 1;
  CHECK(decision_score(m, zero) == m.bias);
  CHECK(classify_score(0.0) == Severity::Low);
}

TEST_CASE("xor is separable under an RBF kernel", "[svm]") {
  SvmConfig cfg;
  cfg.kernel = {KernelKind::Rbf, 1.0};
  cfg.C = 100;
  const std::vector<SparseVector> xs = {point({0, 0}), point({1, 1}), point({0, 1}), point({1, 0})};
  const std::vector<Severity> ys = {Severity::Low, Severity::Low, Severity::High, Severity::High};
  const auto m = train_svm(xs, ys, cfg);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(classify_score(decision_score(m, xs[i])) == ys[i]);
}

TEST_CASE("dual solutions match the brute-force optimum and satisfy KKT", "[svm]") {
  for (const auto& inst : fixtures::svm_instances()) {
    CAPTURE(inst.name);
    const auto sol = solve_svm_dual(inst.xs, inst.ys, inst.cfg);
    REQUIRE(sol.converged);
    const auto y = signs(inst.ys);
    const auto k = gram(inst.xs, inst.cfg.kernel.kind, sol.gamma);
    const auto best = oracle::brute_force_dual(y, k, sol.box);
    CHECK(std::abs(oracle::dual_objective(sol.alpha, y, k) - best.objective) <= 1e-4);
    double eq = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      eq += sol.alpha[i] * y[i];
      CHECK(sol.alpha[i] >= 0.0);
      CHECK(sol.alpha[i] <= sol.box[i]);
      double f = sol.bias;
      for (std::size_t j = 0; j < y.size(); ++j) f += sol.alpha[j] * y[j] * k[j][i];
      const double margin = y[i] * f;
      const double tol = inst.cfg.tol;
      if (sol.alpha[i] == 0.0) CHECK(margin >= 1.0 - tol);
      else if (sol.alpha[i] == sol.box[i]) CHECK(margin <= 1.0 + tol);
      else CHECK(std::abs(margin - 1.0) <= tol);
    }
    CHECK(std::abs(eq) <= 1e-9);
  }
}

TEST_CASE("support vectors of a separable problem sit on the margin", "[svm]") {
  SvmConfig cfg;
  cfg.kernel = {KernelKind::Linear, std::nullopt};
  cfg.C = 1000;
  const std::vector<SparseVector> xs = {point({0, 0}), point({0, 1}), point({3, 0}), point({3, 2})};
  const std::vector<Severity> ys = {Severity::Low, Severity::Low, Severity::High, Severity::High};
  const auto m = train_svm(xs, ys, cfg);
  for (const auto& sv : m.support_vectors) {
    const double s = decision_score(m, sv);
    CHECK(std::abs(s) >= 1.0 - cfg.tol);
  }
  CHECK(decision_score(m, point({3, 0})) >= 1.0 - cfg.tol);
}

TEST_CASE("training errors", "[svm]") {
  SvmConfig cfg;
  const std::vector<SparseVector> xs = {point({0, 1}), point({1, 0})};
  CHECK_THROWS_AS(train_svm(xs, std::vector<Severity>{Severity::High, Severity::High}, cfg), DataError);
  CHECK_THROWS_AS(train_svm(xs, std::vector<Severity>{Severity::High}, cfg), DataError);
  CHECK_THROWS_AS(train_svm(std::vector<SparseVector>{point({std::nan("")}), point({1})},
                            std::vector<Severity>{Severity::High, Severity::Low}, cfg),
                  NumericError);
  SvmConfig bad = cfg;
  bad.C = 0;
  CHECK_THROWS_AS(train_svm(xs, std::vector<Severity>{Severity::High, Severity::Low}, bad), ConfigError);
  bad = cfg;
  bad.tol = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.kernel.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  const auto m = train_svm(xs, std::vector<Severity>{Severity::High, Severity::Low}, cfg);
  CHECK_THROWS_AS(decision_score(m, point({1, 2, 3})), DataError);
}

TEST_CASE("gamma scale heuristic", "[svm]") {
  const std::vector<SparseVector> xs = {point({1, 0}), point({0, 3})};
  // Entries {1, 0, 0, 3}: mean 1, variance (0 + 1 + 1 + 4) / 4 = 1.5.
  CHECK(scale_gamma(xs) == Catch::Approx(1.0 / (2 * 1.5)).epsilon(1e-15));
  CHECK(resolve_gamma({KernelKind::Rbf, 0.25}, xs) == 0.25);
}

TEST_CASE("identical input gives an identical model", "[svm]") {
  const auto inst = fixtures::svm_instances()[7];
  CHECK(svm_to_text(train_svm(inst.xs, inst.ys, inst.cfg)) == svm_to_text(train_svm(inst.xs, inst.ys, inst.cfg)));
}

TEST_CASE("decision score ignores support-vector order", "[svm]") {
  const auto inst = fixtures::svm_instances()[1];
  auto m = train_svm(inst.xs, inst.ys, inst.cfg);
  const double before = decision_score(m, point({0.3, 0.6}));
  std::reverse(m.support_vectors.begin(), m.support_vectors.end());
  std::reverse(m.dual_coefs.begin(), m.dual_coefs.end());
  CHECK(decision_score(m, point({0.3, 0.6})) == Catch::Approx(before).margin(1e-12));
}

TEST_CASE("per-class weights scale the box", "[svm]") {
  SvmConfig cfg;
  cfg.C = 2;
  cfg.weight_high = 3;
  const std::vector<SparseVector> xs = {point({0}), point({1})};
  const auto sol = solve_svm_dual(xs, std::vector<Severity>{Severity::Low, Severity::High}, cfg);
  CHECK(sol.box[0] == 2.0);
  CHECK(sol.box[1] == 6.0);
}

namespace {
struct Split {
  std::vector<SparseVector> tx, vx;
  std::vector<Severity> ty, vy;
};

Split separable(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  Split s;
  for (int i = 0; i < 80; ++i) {
    const bool high = i % 3 == 0;
    const double cx = high ? 2.0 : -2.0;
    auto p = point({cx + noise(rng), noise(rng)});
    (i < 60 ? s.tx : s.vx).push_back(p);
    (i < 60 ? s.ty : s.vy).push_back(high ? Severity::High : Severity::Low);
  }
  return s;
}
}  // namespace

TEST_CASE("tune_c picks the best validation F1 with ties toward smaller C", "[svm]") {
  const auto s = separable(3);
  SvmConfig base;
  base.kernel = {KernelKind::Linear, std::nullopt};
  const auto one = tune_c(s.tx, s.ty, s.vx, s.vy, {5.0}, base);
  CHECK(one.best_c == 5.0);
  CHECK(one.table.size() == 1);

  const auto res = tune_c(s.tx, s.ty, s.vx, s.vy, {100, 0.01, 1}, base);
  REQUIRE(res.table.size() == 3);
  CHECK(res.table[0].C == 0.01);  // table is in ascending C order
  double best = -1.0;
  for (const auto& row : res.table) best = std::max(best, row.f1.value_or(0.0));
  double first_best_c = 0.0;
  for (const auto& row : res.table)
    if (row.f1.value_or(0.0) == best) {
      first_best_c = row.C;
      break;
    }
  CHECK(res.best_c == first_best_c);
  // Well-separated data: every C reaches F1 = 1 and the smallest wins.
  for (const auto& row : res.table) CHECK(row.f1 == 1.0);
  CHECK(res.best_c == 0.01);
  CHECK_THROWS_AS(tune_c(s.tx, s.ty, s.vx, s.vy, {}, base), ConfigError);
}

TEST_CASE("tune_c records failing grid points", "[svm]") {
  const auto s = separable(4);
  SvmConfig base;
  base.kernel = {KernelKind::Linear, std::nullopt};
  const auto res = tune_c(s.tx, s.ty, s.vx, s.vy, {-1.0, 1.0}, base);
  REQUIRE(res.table.size() == 2);
  CHECK_FALSE(res.table[0].error.empty());
  CHECK(res.best_c == 1.0);
  CHECK_THROWS_AS(tune_c(s.tx, s.ty, s.vx, s.vy, {-1.0, -2.0}, base), DataError);
}

TEST_CASE("svm model persistence round-trips exactly", "[svm]") {
  const auto inst = fixtures::svm_instances()[1];
  const auto m = train_svm(inst.xs, inst.ys, inst.cfg);
  testing::TempDir dir;
  save_svm(m, dir / "m.svm");
  const auto back = load_svm(dir / "m.svm");
  CHECK(svm_to_text(back) == svm_to_text(m));
  CHECK(back.bias == m.bias);
  CHECK(back.dual_coefs == m.dual_coefs);
  for (const auto& x : inst.xs) CHECK(decision_score(back, x) == decision_score(m, x));
  testing::write_text(dir / "bad.svm", "svmv2\n");
  CHECK_THROWS_WITH(load_svm(dir / "bad.svm"), Catch::Matchers::ContainsSubstring("line 1"));
}
