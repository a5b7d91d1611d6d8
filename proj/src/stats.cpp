#include "netsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netsel/error.hpp"

namespace netsel {

namespace {

double sorted_quantile(const std::vector<double>& x, double q) {
  const double h = static_cast<double>(x.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

std::vector<double> sorted_copy(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("statistic of an empty list");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  return x;
}

// pairs tied within runs of equal keys, plus the variance correction sums
struct TieSums {
  std::int64_t pairs = 0;
  double v1 = 0, v2 = 0, v3 = 0;  // sum t(t-1)(2t+5), t(t-1), t(t-1)(t-2)
  void run(std::int64_t t) {
    pairs += t * (t - 1) / 2;
    const auto d = static_cast<double>(t);
    v1 += d * (d - 1) * (2 * d + 5);
    v2 += d * (d - 1);
    v3 += d * (d - 1) * (d - 2);
  }
};

template <typename Eq>
TieSums tie_runs(std::size_t n, Eq same_as_prev) {
  TieSums s;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (same_as_prev(i)) {
      ++run;
    } else {
      s.run(run);
      run = 1;
    }
  }
  if (n > 0) s.run(run);
  return s;
}

std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double median(std::span<const double> values) { return sorted_quantile(sorted_copy(values), 0.5); }

double quantile(std::span<const double> values, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile outside [0, 1]");
  return sorted_quantile(sorted_copy(values), q);
}

double interquartile_range(std::span<const double> values) {
  const auto x = sorted_copy(values);
  return sorted_quantile(x, 0.75) - sorted_quantile(x, 0.25);
}

KendallResult kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("kendall_tau: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidArgument("kendall_tau: need at least two observations");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return a[x] != a[y] ? a[x] < a[y] : b[x] < b[y];
  });

  KendallResult res;
  const auto nn = static_cast<std::int64_t>(n);
  res.n_pairs = nn * (nn - 1) / 2;
  const TieSums ta = tie_runs(n, [&](std::size_t i) { return a[idx[i]] == a[idx[i - 1]]; });
  const TieSums tboth =
      tie_runs(n, [&](std::size_t i) { return a[idx[i]] == a[idx[i - 1]] && b[idx[i]] == b[idx[i - 1]]; });

  std::vector<double> bv(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) bv[i] = b[idx[i]];
  const std::int64_t swaps = merge_count(bv, buf, 0, n);  // bv is now sorted
  const TieSums tb = tie_runs(n, [&](std::size_t i) { return bv[i] == bv[i - 1]; });

  res.ties_a = ta.pairs;
  res.ties_b = tb.pairs;
  res.ties_both = tboth.pairs;
  res.s = res.n_pairs - ta.pairs - tb.pairs + tboth.pairs - 2 * swaps;

  const double denom = std::sqrt(static_cast<double>(res.n_pairs - ta.pairs) *
                                 static_cast<double>(res.n_pairs - tb.pairs));
  if (denom == 0.0) return res;
  res.tau = std::clamp(static_cast<double>(res.s) / denom, -1.0, 1.0);

  const auto d = static_cast<double>(n);
  double var = (d * (d - 1) * (2 * d + 5) - ta.v1 - tb.v1) / 18.0 + ta.v2 * tb.v2 / (2 * d * (d - 1));
  if (n > 2) var += ta.v3 * tb.v3 / (9 * d * (d - 1) * (d - 2));
  if (var > 0.0) {
    const double z = static_cast<double>(res.s) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return res;
}

double coefficient_of_variation(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("coefficient of variation needs two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (mean == 0.0) throw InvalidArgument("coefficient of variation with zero mean");
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1)) / mean;
}

SignificanceResult significance(std::span<const double> e, std::size_t r, double lambda) {
  if (e.size() < 4) throw InvalidArgument("significance needs at least four models");
  if (r >= e.size()) throw InvalidArgument("significance: model index out of range");

  std::vector<double> gaps_r, cohort;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i == r) continue;
    gaps_r.push_back(std::abs(e[r] - e[i]));
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (j != r) cohort.push_back(std::abs(e[i] - e[j]));
  }
  SignificanceResult res;
  res.index = r;
  const double iqr = interquartile_range(cohort);
  if (iqr > 0.0) res.score = (median(gaps_r) - median(cohort)) / iqr;
  // a degenerate cohort never flags, whatever lambda is
  res.significant = iqr > 0.0 && res.score >= lambda && e[r] > median(e);
  return res;
}

std::vector<SignificanceResult> significance_all(std::span<const double> e, double lambda) {
  std::vector<SignificanceResult> out;
  for (std::size_t r = 0; r < e.size(); ++r) out.push_back(significance(e, r, lambda));
  return out;
}

}  // namespace netsel
