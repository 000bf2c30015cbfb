#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ips {

/// Pairwise (cascade) summation with a fixed reduction order, so sums are
/// reproducible and accurate independent of how the values were produced.
double pairwise_sum(std::span<const double> values);

struct MeanStdErr {
  double mean = 0;
  double std_error = 0;
  std::size_t n = 0;
};

/// Sample mean and standard error of the mean (pairwise reduction).
MeanStdErr mean_stderr(std::span<const double> values);

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
/// Samples need not be sorted.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic p-value for the KS statistic at sample size n.
double ks_pvalue(double statistic, std::size_t n);

struct Chi2Result {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

/// Upper tail of the chi-squared distribution.
double chi2_sf(double x, int dof);

/// Standard normal quantile.
double normal_quantile(double p);

/// Goodness of fit of observed nonnegative-integer counts against a Poisson
/// law. `histogram[k]` holds the number of observations equal to k; bins are
/// merged from the right until every expected count is at least
/// `min_expected`.
Chi2Result chi2_gof_poisson(std::span<const std::size_t> histogram, double mean,
                            double min_expected = 5.0);

/// Two-sample chi-squared homogeneity test over shared categories. Cells are
/// pooled greedily until each pooled expectation reaches `min_expected`.
Chi2Result chi2_two_sample(std::span<const std::size_t> counts_a,
                           std::span<const std::size_t> counts_b,
                           double min_expected = 5.0);

}  // namespace ips
