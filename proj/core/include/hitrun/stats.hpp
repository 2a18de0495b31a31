#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hitrun/rng.hpp"
#include "hitrun/types.hpp"

namespace hitrun::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
/// Standard error of the mean of independent values.
double standard_error(std::span<const double> xs);

Vector sample_mean(const PointList& points);
/// Unbiased sample covariance.
Matrix sample_covariance(const PointList& points);
double top_eigenvalue(const Matrix& symmetric);

/// Top eigenvalue of the sample covariance with a batch-means standard
/// error (valid for autocorrelated chain output when batches are long
/// compared to the correlation time).
Estimate top_covariance_eigenvalue(const PointList& points, std::size_t n_batches = 20);

/// Batch-means standard error of the mean of a (possibly correlated) series.
double batch_means_se(std::span<const double> series, std::size_t n_batches = 20);

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct EnergyTest {
    double statistic = 0.0;  ///< n m / (n + m) * energy distance
    double p_value = 1.0;    ///< permutation p-value
    std::size_t permutations = 0;
};

/// Two-sample energy-distance test with a permutation null.
EnergyTest energy_test(const PointList& a, const PointList& b, std::size_t permutations, Rng& rng);

/// Regularized lower incomplete gamma CDF of chi-square with `dof` degrees.
double chi_square_cdf(double x, double dof);

/// Pearson chi-square goodness-of-fit p-value of counts against equal cells.
double chi_square_uniform_p_value(std::span<const std::size_t> counts);

/// Least-squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Empirical quantile by the lower order statistic at ceil(q n).
double order_statistic_quantile(std::vector<double> xs, double q);

}  // namespace hitrun::stats
