#pragma once

#include "hitrun/rng.hpp"

namespace hitrun::normal {

inline constexpr double kSqrt2Pi = 2.5066282746310002;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274;

double pdf(double z);
double cdf(double z);
/// Upper tail 1 - cdf(z), accurate for large z.
double sf(double z);
/// log(sf(z)); finite for every real z (asymptotic series beyond erfc range).
double log_sf(double z);
double quantile(double p);

/// Probability that a standard normal lands in [a, b]; infinite bounds allowed.
double interval_mass(double a, double b);
/// log(interval_mass(a, b)), stable when both bounds sit deep in one tail.
double log_interval_mass(double a, double b);

/// Exact draw from the standard normal truncated to [a, b] (a < b, bounds may
/// be infinite). Far-tail intervals use complementary-CDF inversion, and
/// intervals beyond the range of erfc use exponential-proposal rejection,
/// so no probability mass is ever collapsed onto an endpoint.
double sample_truncated(double a, double b, Rng& rng);

}  // namespace hitrun::normal
