#pragma once

#include <array>
#include <vector>

namespace cbi {

double mean_of(const std::vector<double>& xs);
double variance_of(const std::vector<double>& xs);  // unbiased

/// Standard normal CDF.
double normal_cdf(double x);

/// One-sample Kolmogorov-Smirnov statistic against N(0, sigma^2).
double ks_statistic_normal(std::vector<double> xs, double sigma);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

/// Linear-interpolation quantile of a sorted-on-demand sample, p in [0,1].
double quantile_of(std::vector<double> xs, double p);

/// Deciles 10%..90%.
std::array<double, 9> deciles_of(const std::vector<double>& xs);

}  // namespace cbi
