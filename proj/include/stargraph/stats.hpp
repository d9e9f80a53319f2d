#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stargraph::stats {

/// Pairwise (cascade) summation; result depends only on the input order.
double pairwise_sum(std::span<const double> xs);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(n)
  std::size_t n = 0;
};
MeanStderr mean_stderr(std::span<const double> xs);

double normal_cdf(double z);
double normal_sf(double z);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double stat, double dof);

struct ChiSquareResult {
  double stat = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;  // after merging
};

/// Goodness of fit of counts against cell probabilities summing to 1.  Adjacent cells, in the given
/// order, are merged until each has expected count >= min_expected.
ChiSquareResult chi_square_gof(std::span<const double> counts, std::span<const double> probs,
                               double min_expected = 5.0, std::size_t fitted_params = 0);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic p-value with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t n);

}  // namespace stargraph::stats
