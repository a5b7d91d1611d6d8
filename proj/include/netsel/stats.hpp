#pragma once

// Order statistics, rank correlation and the outlier score used for model selection.

#include <cstdint>
#include <span>
#include <vector>

namespace netsel {

/// Average of the two middle values for even sizes. Throws on empty input.
double median(std::span<const double> values);
/// Linear-interpolation quantile (the common "type 7" definition), q in [0, 1].
double quantile(std::span<const double> values, double q);
double interquartile_range(std::span<const double> values);

struct KendallResult {
  double tau = 0.0;
  double p_value = 1.0;
  /// concordant minus discordant pairs
  std::int64_t s = 0;
  std::int64_t n_pairs = 0;
  std::int64_t ties_a = 0;     // pairs tied in a
  std::int64_t ties_b = 0;     // pairs tied in b
  std::int64_t ties_both = 0;  // pairs tied in both
};

/// Kendall tau-b in O(n log n) with a two-sided normal-approximation p-value using the
/// tie-corrected variance. A zero denominator gives tau 0, p 1.
KendallResult kendall_tau(std::span<const double> a, std::span<const double> b);

/// Sample standard deviation over mean. Needs at least two values and a non-zero mean.
double coefficient_of_variation(std::span<const double> values);

struct SignificanceResult {
  std::size_t index = 0;
  double score = 0.0;
  bool significant = false;
};

/// Outlier score of efficiencies[r]:
///   (median_{i != r} |e_r - e_i| - median_{i<j; i,j != r} |e_i - e_j|) / IQR of the same pairs.
/// IQR = 0 scores 0 and never flags. Otherwise flags when score >= lambda and e_r is above
/// the median of all efficiencies. Needs at least four models.
SignificanceResult significance(std::span<const double> efficiencies, std::size_t r, double lambda);

/// significance() for every model.
std::vector<SignificanceResult> significance_all(std::span<const double> efficiencies, double lambda);

}  // namespace netsel
