#include "hitrun/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "hitrun/errors.hpp"

namespace hitrun::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

Vector sample_mean(const PointList& points) {
    if (points.empty()) throw UsageError("sample_mean: no points");
    Vector m = Vector::Zero(points.front().size());
    for (const auto& p : points) m += p;
    return m / static_cast<double>(points.size());
}

Matrix sample_covariance(const PointList& points) {
    if (points.size() < 2) throw UsageError("sample_covariance: need at least two points");
    const Vector m = sample_mean(points);
    const auto n = m.size();
    Matrix c = Matrix::Zero(n, n);
    for (const auto& p : points) {
        const Vector d = p - m;
        c.selfadjointView<Eigen::Lower>().rankUpdate(d);
    }
    c = c.selfadjointView<Eigen::Lower>();
    return c / static_cast<double>(points.size() - 1);
}

double top_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

Estimate top_covariance_eigenvalue(const PointList& points, std::size_t n_batches) {
    Estimate e;
    e.n = points.size();
    e.value = top_eigenvalue(sample_covariance(points));
    const std::size_t len = points.size() / n_batches;
    if (n_batches < 2 || len < 2) return e;
    std::vector<double> batch_values;
    batch_values.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        PointList batch(points.begin() + static_cast<std::ptrdiff_t>(b * len),
                        points.begin() + static_cast<std::ptrdiff_t>((b + 1) * len));
        batch_values.push_back(top_eigenvalue(sample_covariance(batch)));
    }
    e.se = standard_error(batch_values);
    return e;
}

double batch_means_se(std::span<const double> series, std::size_t n_batches) {
    const std::size_t len = series.size() / std::max<std::size_t>(n_batches, 1);
    if (n_batches < 2 || len < 1) return standard_error(series);
    std::vector<double> means;
    means.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        means.push_back(mean(series.subspan(b * len, len)));
    }
    return standard_error(means);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace {

// Pooled sample in structure-of-arrays layout for vectorized distance sums.
struct Pooled {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<float> coords;  // dim blocks of n values
};

struct PairSums {
    double within_a = 0.0;
    double within_b = 0.0;
    double total = 0.0;
};

// Sums of pairwise distances over i < j, split by the 0/1 group labels.
PairSums pair_sums(const Pooled& p, const std::vector<float>& in_a) {
    PairSums sums;
    std::vector<float> dist(p.n);
    for (std::size_t i = 0; i + 1 < p.n; ++i) {
        const std::size_t m = p.n - i - 1;
        float* dd = dist.data();
        for (std::size_t j = 0; j < m; ++j) dd[j] = 0.0f;
        for (std::size_t k = 0; k < p.dim; ++k) {
            const float xi = p.coords[k * p.n + i];
            const float* col = p.coords.data() + k * p.n + i + 1;
            for (std::size_t j = 0; j < m; ++j) {
                const float d = col[j] - xi;
                dd[j] += d * d;
            }
        }
        const float* wj = in_a.data() + i + 1;
        float row = 0.0f;
        float row_a = 0.0f;
#pragma omp simd reduction(+ : row, row_a)
        for (std::size_t j = 0; j < m; ++j) {
            const float d = std::sqrt(dd[j]);
            row += d;
            row_a += d * wj[j];
        }
        sums.total += row;
        if (in_a[i] != 0.0f) {
            sums.within_a += row_a;
        } else {
            sums.within_b += row - row_a;
        }
    }
    return sums;
}

}  // namespace

EnergyTest energy_test(const PointList& a, const PointList& b, std::size_t permutations, Rng& rng) {
    if (a.empty() || b.empty()) throw UsageError("energy_test: empty sample");
    const std::size_t dim = static_cast<std::size_t>(a.front().size());
    Pooled pooled;
    pooled.n = a.size() + b.size();
    pooled.dim = dim;
    pooled.coords.resize(dim * pooled.n);
    for (std::size_t i = 0; i < pooled.n; ++i) {
        const Vector& x = i < a.size() ? a[i] : b[i - a.size()];
        if (static_cast<std::size_t>(x.size()) != dim) throw UsageError("energy_test: dimension mismatch");
        for (std::size_t k = 0; k < dim; ++k) {
            pooled.coords[k * pooled.n + i] = static_cast<float>(x[static_cast<Eigen::Index>(k)]);
        }
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    auto statistic = [&](const std::vector<float>& in_a) {
        const PairSums s = pair_sums(pooled, in_a);
        const double cross = s.total - s.within_a - s.within_b;
        const double e = 2.0 * cross / (na * nb) - 2.0 * s.within_a / (na * na) - 2.0 * s.within_b / (nb * nb);
        return na * nb / (na + nb) * e;
    };

    std::vector<float> labels(pooled.n, 0.0f);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(a.size()), 1.0f);

    EnergyTest result;
    result.statistic = statistic(labels);
    result.permutations = permutations;
    std::size_t at_least = 0;
    for (std::size_t p = 0; p < permutations; ++p) {
        for (std::size_t i = pooled.n - 1; i > 0; --i) {
            std::swap(labels[i], labels[rng.below(i + 1)]);
        }
        if (statistic(labels) >= result.statistic) ++at_least;
    }
    result.p_value = static_cast<double>(at_least + 1) / static_cast<double>(permutations + 1);
    return result;
}

double chi_square_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_uniform_p_value(std::span<const std::size_t> counts) {
    if (counts.size() < 2) throw UsageError("chi_square_uniform_p_value: need >= 2 cells");
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    const double expected = total / static_cast<double>(counts.size());
    double chi2 = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return 1.0 - chi_square_cdf(chi2, static_cast<double>(counts.size() - 1));
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw UsageError("ols_slope: need >= 2 paired values");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw UsageError("ols_slope: constant regressor");
    return sxy / sxx;
}

double order_statistic_quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw UsageError("order_statistic_quantile: empty sample");
    const auto n = xs.size();
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n) - 1;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
    return xs[k];
}

}  // namespace hitrun::stats
