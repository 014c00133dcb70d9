#pragma once

// Reference computations for tests. Each one follows the textbook definition
// directly and shares no code path with the library beyond plain data types.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// O(n^2) pairwise AUROC: positive above negative counts 1, ties 1/2.
inline double pairwise_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) num += 1.0;
      else if (s[i] == s[j]) num += 0.5;
    }
  }
  return num / pairs;
}

// Dual objective W(a) = sum a - 1/2 sum_ij a_i a_j y_i y_j K_ij.
inline double dual_objective(const std::vector<double>& a, const std::vector<double>& y,
                             const std::vector<std::vector<double>>& k) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < a.size(); ++j) quad += a[i] * a[j] * y[i] * y[j] * k[i][j];
  }
  return lin - 0.5 * quad;
}

struct DualOptimum {
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<double> alpha;
};

// Exhaustive active-set search for max W(a) s.t. 0 <= a_i <= c_i, sum a_i y_i = 0.
// Every point is fixed at 0, fixed at c_i, or free; the free block is solved
// from its equality-constrained stationarity system. Practical up to n ~ 8.
inline DualOptimum brute_force_dual(const std::vector<double>& y, const std::vector<std::vector<double>>& k,
                                    const std::vector<double>& c) {
  const std::size_t n = y.size();
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) states *= 3;
  DualOptimum best;
  std::vector<int> st(n);
  for (std::size_t code = 0; code < states; ++code) {
    std::size_t x = code;
    std::vector<std::size_t> free_idx;
    std::vector<double> a(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      st[i] = static_cast<int>(x % 3);
      x /= 3;
      if (st[i] == 1) a[i] = c[i];
      if (st[i] == 2) free_idx.push_back(i);
    }
    if (!free_idx.empty()) {
      const auto m = free_idx.size();
      Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + 1));
      for (std::size_t p = 0; p < m; ++p) {
        const auto i = free_idx[p];
        double r = 1.0;
        for (std::size_t j = 0; j < n; ++j)
          if (st[j] == 1) r -= y[i] * y[j] * k[i][j] * a[j];
        for (std::size_t q = 0; q < m; ++q) {
          const auto j = free_idx[q];
          sys(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = y[i] * y[j] * k[i][j];
        }
        // Multiplier of the equality constraint.
        sys(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(m)) = y[i];
        sys(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p)) = y[i];
        rhs(static_cast<Eigen::Index>(p)) = r;
      }
      double fixed_sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (st[j] == 1) fixed_sum += a[j] * y[j];
      rhs(static_cast<Eigen::Index>(m)) = -fixed_sum;
      const Eigen::VectorXd sol = sys.completeOrthogonalDecomposition().solve(rhs);
      if ((sys * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
      for (std::size_t p = 0; p < m; ++p) a[free_idx[p]] = sol(static_cast<Eigen::Index>(p));
    }
    bool feasible = true;
    double eq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] < -1e-9 || a[i] > c[i] + 1e-9) feasible = false;
      eq += a[i] * y[i];
    }
    if (!feasible || std::abs(eq) > 1e-9) continue;
    const double w = dual_objective(a, y, k);
    if (w > best.objective) {
      best.objective = w;
      best.alpha = a;
    }
  }
  return best;
}

// Central differences of f at x along every coordinate.
template <class F>
std::vector<double> central_difference(F f, std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Krippendorff's alpha from its pairwise form:
//   D_o = (1/n) sum_u 1/(m_u - 1) sum_{i != j in u} delta(v_i, v_j)
//   D_e = 1/(n (n - 1)) sum_{i != j over all pairable values} delta(v_i, v_j)
// `delta` is the squared difference function.
template <class Delta>
double krippendorff_pairwise(const std::vector<std::vector<int>>& units, Delta delta) {
  std::vector<int> all;
  double d_o = 0.0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j) s += delta(u[i], u[j]);
    d_o += s / static_cast<double>(u.size() - 1);
    all.insert(all.end(), u.begin(), u.end());
  }
  const double n = static_cast<double>(all.size());
  d_o /= n;
  double d_e = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      if (i != j) d_e += delta(all[i], all[j]);
  d_e /= n * (n - 1.0);
  return 1.0 - d_o / d_e;
}

// Ordinal squared difference: (sum of value frequencies between c and k,
// inclusive, minus half of each endpoint frequency) squared.
inline auto ordinal_delta(const std::vector<std::vector<int>>& units) {
  std::map<int, double> freq;
  for (const auto& u : units)
    if (u.size() >= 2)
      for (int v : u) freq[v] += 1.0;
  return [freq](int c, int k) {
    if (c == k) return 0.0;
    const int lo = std::min(c, k), hi = std::max(c, k);
    double s = 0.0;
    for (const auto& [v, f] : freq)
      if (v >= lo && v <= hi) s += f;
    s -= (freq.at(lo) + freq.at(hi)) / 2.0;
    return s * s;
  };
}

}  // namespace oracle
