#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hitrun {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointList = std::vector<Vector>;

/// Monte Carlo estimate with its standard error and sample count.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

/// Binomial proportion estimate from `hits` successes in `n` trials.
inline Estimate proportion(std::size_t hits, std::size_t n) {
    Estimate e;
    e.n = n;
    if (n == 0) return e;
    e.value = static_cast<double>(hits) / static_cast<double>(n);
    e.se = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
    return e;
}

}  // namespace hitrun
