#include "hitrun/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "hitrun/errors.hpp"

namespace hitrun::normal {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;
constexpr double kSqrt2 = 1.4142135623730951;
// sf(z) stays a normal double up to z ~ 37.5.
constexpr double kTailInversionLimit = 37.0;
constexpr double kAsymptoticFrom = 30.0;

/// Draw from the standard normal restricted to [a, b] with a >= 0.
double sample_right(double a, double b, Rng& rng) {
    if (a < kTailInversionLimit) {
        const double qa = sf(a);
        const double qb = std::isfinite(b) ? sf(b) : 0.0;
        const double q = qb + rng.uniform_open() * (qa - qb);
        const double z = kSqrt2 * boost::math::erfc_inv(2.0 * q);
        return std::clamp(z, a, b);
    }
    // Exponential proposal with the optimal rate for the tail beyond a.
    const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a - std::log(rng.uniform_open()) / rate;
        if (z > b) continue;
        const double d = z - rate;
        if (rng.uniform() <= std::exp(-0.5 * d * d)) return z;
    }
}

}  // namespace

double pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

double cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double log_sf(double z) {
    if (z < kAsymptoticFrom) return std::log(sf(z));
    // Mills-ratio series: sf(z) = pdf(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...)
    const double w = 1.0 / (z * z);
    const double series = 1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w * (1.0 - 9.0 * w))));
    return -0.5 * z * z - std::log(z) - kLogSqrt2Pi + std::log(series);
}

double quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double interval_mass(double a, double b) {
    if (!(a < b)) return 0.0;
    if (a >= 0.0) return sf(a) - sf(b);
    if (b <= 0.0) return cdf(b) - cdf(a);
    return 1.0 - cdf(a) - sf(b);
}

double log_interval_mass(double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    if (b <= 0.0) {
        std::swap(a, b);
        a = -a;
        b = -b;
    }
    if (a >= 0.0) {
        const double la = log_sf(a);
        if (!std::isfinite(b)) return la;
        const double lb = log_sf(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    return std::log(interval_mass(a, b));
}

double sample_truncated(double a, double b, Rng& rng) {
    if (!(a < b)) throw UsageError("sample_truncated: empty interval");

    if (std::isfinite(a) && std::isfinite(b)) {
        // Narrow intervals: the density varies by at most a factor e, so
        // uniform proposals accept with probability >= 1/e.
        const double lo2 = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(a * a, b * b);
        const double hi2 = std::max(a * a, b * b);
        if (0.5 * (hi2 - lo2) <= 1.0) {
            for (;;) {
                const double z = a + (b - a) * rng.uniform();
                if (rng.uniform() < std::exp(-0.5 * (z * z - lo2))) return z;
            }
        }
    }

    if (a >= 0.0) return sample_right(a, b, rng);
    if (b <= 0.0) return -sample_right(-b, -a, rng);

    // Interval straddles zero: invert whichever tail keeps precision.
    const double lower_tail = cdf(a);
    const double upper_tail = sf(b);
    const double mass = 1.0 - lower_tail - upper_tail;
    const double m = rng.uniform_open() * mass;
    double z;
    if (lower_tail + m <= 0.5) {
        z = quantile(lower_tail + m);
    } else {
        z = -quantile(upper_tail + (mass - m));
    }
    return std::clamp(z, a, b);
}

}  // namespace hitrun::normal
