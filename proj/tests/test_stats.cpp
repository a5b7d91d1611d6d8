#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "netsel/error.hpp"
#include "netsel/rng.hpp"
#include "netsel/stats.hpp"

using namespace netsel;

namespace {

// Sorting-based type-7 quantile.
double q7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct PairCounts {
  long concordant = 0, discordant = 0, tie_a = 0, tie_b = 0, tie_both = 0;
};

PairCounts count_pairs(const std::vector<double>& a, const std::vector<double>& b) {
  PairCounts c;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool ta = a[i] == a[j], tb = b[i] == b[j];
      if (ta && tb) ++c.tie_both;
      if (ta) ++c.tie_a;
      if (tb) ++c.tie_b;
      if (ta || tb) continue;
      ((a[i] < a[j]) == (b[i] < b[j]) ? c.concordant : c.discordant) += 1;
    }
  return c;
}

// Tie-corrected variance of S from group sizes.
double s_variance(const std::vector<double>& a, const std::vector<double>& b) {
  auto groups = [](const std::vector<double>& v) {
    std::map<double, double> g;
    for (double x : v) g[x] += 1.0;
    return g;
  };
  double x0 = 0, x1 = 0, x2 = 0, y0 = 0, y1 = 0, y2 = 0;
  for (auto [_, t] : groups(a)) {
    x0 += t * (t - 1) * (t - 2);
    x1 += t * (t - 1) * (2 * t + 5);
    x2 += t * (t - 1) / 2;
  }
  for (auto [_, t] : groups(b)) {
    y0 += t * (t - 1) * (t - 2);
    y1 += t * (t - 1) * (2 * t + 5);
    y2 += t * (t - 1) / 2;
  }
  const double n = static_cast<double>(a.size());
  const double m = n * (n - 1);
  return (m * (2 * n + 5) - x1 - y1) / 18 + 2 * x2 * y2 / m + x0 * y0 / (9 * m * (n - 2));
}

}  // namespace

TEST(Quantiles, MedianAndType7) {
  EXPECT_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_EQ(quantile(std::vector<double>{1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_EQ(interquartile_range(std::vector<double>{1, 2, 3, 4}), 1.5);
  EXPECT_THROW(median(std::vector<double>{}), InvalidArgument);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + uniform_below(rng, 30));
    for (auto& x : v) x = uniform01(rng);
    for (double q : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) EXPECT_DOUBLE_EQ(quantile(v, q), q7(v, q));
  }
}

TEST(Kendall, PerfectAgreementAndReversal) {
  std::vector<double> a = {1, 2, 3, 4, 5}, rev = {5, 4, 3, 2, 1};
  EXPECT_EQ(kendall_tau(a, a).tau, 1.0);
  EXPECT_EQ(kendall_tau(a, rev).tau, -1.0);
  EXPECT_THROW(kendall_tau(a, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(Kendall, ConstantInputGivesZero) {
  std::vector<double> a = {1, 2, 3}, c = {7, 7, 7};
  auto r = kendall_tau(a, c);
  EXPECT_EQ(r.tau, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Kendall, MatchesPairCountingOracle) {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + uniform_below(rng, 11);
    const std::uint64_t levels = t % 2 ? n : 3;  // odd trials are tie-free permutations
    std::vector<double> a(n), b(n);
    if (levels == n) {
      std::iota(a.begin(), a.end(), 0.0);
      std::iota(b.begin(), b.end(), 0.0);
      shuffle(a, rng);
      shuffle(b, rng);
    } else {
      for (auto& x : a) x = static_cast<double>(uniform_below(rng, levels));
      for (auto& x : b) x = static_cast<double>(uniform_below(rng, levels));
    }
    const auto c = count_pairs(a, b);
    const auto r = kendall_tau(a, b);
    const long n0 = static_cast<long>(n * (n - 1) / 2);
    EXPECT_EQ(r.s, c.concordant - c.discordant);
    EXPECT_EQ(r.n_pairs, n0);
    EXPECT_EQ(r.ties_a, c.tie_a);
    EXPECT_EQ(r.ties_b, c.tie_b);
    EXPECT_EQ(r.ties_both, c.tie_both);
    const double denom = std::sqrt(static_cast<double>(n0 - c.tie_a) * static_cast<double>(n0 - c.tie_b));
    if (denom == 0.0) {
      EXPECT_EQ(r.tau, 0.0);
      continue;
    }
    EXPECT_EQ(r.tau, static_cast<double>(c.concordant - c.discordant) / denom);
    const double var = s_variance(a, b);
    if (n > 2 && var > 0.0) {
      const double z = static_cast<double>(c.concordant - c.discordant) / std::sqrt(var);
      EXPECT_NEAR(r.p_value, std::erfc(std::abs(z) / std::sqrt(2.0)), 1e-12);
    }
  }
}

TEST(Kendall, AgreesWithReferenceValues) {
  // values from a widely used statistics package, asymptotic method
  auto r1 = kendall_tau(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}, std::vector<double>{3, 1, 2, 5, 4, 8, 6, 7});
  EXPECT_NEAR(r1.tau, 0.6428571428571428, 1e-15);
  EXPECT_NEAR(r1.p_value, 0.02595245602237448, 1e-12);
  auto r2 = kendall_tau(std::vector<double>{1, 1, 2, 2, 3, 3, 4, 5, 5, 6},
                        std::vector<double>{2, 1, 2, 2, 4, 3, 3, 6, 5, 5});
  EXPECT_NEAR(r2.tau, 0.8148769172359115, 1e-15);
  EXPECT_NEAR(r2.p_value, 0.002162824165204381, 1e-12);
}

TEST(Variation, ClosedForms) {
  EXPECT_EQ(coefficient_of_variation(std::vector<double>{4, 4, 4}), 0.0);
  EXPECT_NEAR(coefficient_of_variation(std::vector<double>{1, 3}), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_THROW(coefficient_of_variation(std::vector<double>{1, -1}), InvalidArgument);
  EXPECT_THROW(coefficient_of_variation(std::vector<double>{1}), InvalidArgument);
}

TEST(Variation, MatchesTwoPassFormula) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(2 + uniform_below(rng, 40));
    for (auto& x : v) x = 1.0 + 100.0 * uniform01(rng);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double expect = std::sqrt(ss / static_cast<double>(v.size() - 1)) / mean;
    EXPECT_NEAR(coefficient_of_variation(v), expect, 1e-12);
  }
}

TEST(Significance, OutlierIsFlagged) {
  std::vector<double> e = {1.0, 1.1, 0.9, 1.05, 50.0};
  // cohort pairs among {1.0, 1.1, 0.9, 1.05}: 0.1, 0.1, 0.05, 0.2, 0.05, 0.15
  const std::vector<double> cohort = {0.1, 0.1, 0.05, 0.2, 0.05, 0.15};
  const std::vector<double> gaps = {49.0, 48.9, 49.1, 48.95};
  const double expect = (q7(gaps, 0.5) - q7(cohort, 0.5)) / (q7(cohort, 0.75) - q7(cohort, 0.25));
  auto r = significance(e, 4, 1.0);
  EXPECT_DOUBLE_EQ(r.score, expect);
  EXPECT_TRUE(r.significant);
  EXPECT_FALSE(significance(e, 0, 1.0).significant);
}

TEST(Significance, EqualEfficienciesScoreZero) {
  std::vector<double> e(6, 0.25);
  for (std::size_t r = 0; r < 6; ++r) {
    auto s = significance(e, r, 0.0);
    EXPECT_EQ(s.score, 0.0);
    EXPECT_FALSE(s.significant);
  }
}

TEST(Significance, LowOutlierNeverFlags) {
  std::vector<double> e = {1.0, 1.1, 0.9, 1.05, -50.0};
  auto r = significance(e, 4, 1.0);
  EXPECT_GT(r.score, 1.0);
  EXPECT_FALSE(r.significant);
}

TEST(Significance, InvariantToCohortOrder) {
  Rng rng(4);
  std::vector<double> e = {0.3, 0.1, 0.7, 0.2, 0.5, 0.45, 2.0};
  const double base = significance(e, 6, 1.0).score;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> rest(e.begin(), e.end() - 1);
    shuffle(rest, rng);
    rest.push_back(2.0);
    EXPECT_DOUBLE_EQ(significance(rest, 6, 1.0).score, base);
  }
}

TEST(Significance, IncreasesWithOwnEfficiencyAboveCohort) {
  std::vector<double> e = {0.3, 0.1, 0.7, 0.2, 0.5, 1.0};
  double prev = significance(e, 5, 1.0).score;
  for (double x = 1.1; x < 3.0; x += 0.1) {
    e[5] = x;
    const double s = significance(e, 5, 1.0).score;
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Significance, NeedsFourModels) {
  EXPECT_THROW(significance(std::vector<double>{1, 2, 3}, 0, 1.0), InvalidArgument);
  EXPECT_EQ(significance_all(std::vector<double>{1, 2, 3, 9}, 1.0).size(), 4u);
}
