#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hitrun/localization.hpp"

namespace hitrun::lc1d {

struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
};

struct Uniform {
    double a = 0.0;
    double b = 1.0;
};

struct Laplace {
    double mean = 0.0;
    double scale = 1.0;
};

struct Logistic {
    double mean = 0.0;
    double scale = 1.0;
};

/// Piecewise-constant density with the cell masses of a Grid1D.
struct GridDensity {
    Grid1D grid;
    std::vector<double> cumulative;  ///< cumulative[i] = mass of cells < i
    std::vector<double> upper;       ///< upper[i] = mass of cells >= i
};

/// A one-dimensional logconcave density.
class Density1D {
  public:
    using Kind = std::variant<Gaussian, Uniform, Laplace, Logistic, GridDensity>;

    static Density1D gaussian(double mean, double sd);
    static Density1D uniform(double a, double b);
    static Density1D laplace(double mean, double scale);
    static Density1D logistic(double mean, double scale);
    static Density1D from_grid(Grid1D grid);

    const Kind& kind() const { return kind_; }
    std::string name() const;

    double pdf(double x) const;
    double cdf(double x) const;
    /// 1 - cdf(x) without cancellation in the upper tail.
    double sf(double x) const;
    double mean() const;
    double variance() const;
    /// Support endpoints (infinite for unbounded kinds).
    double lo() const;
    double hi() const;

    /// True when |mean| and |variance - 1| are below `tol`.
    bool isotropic(double tol = 1e-8) const;

    /// x with cdf(x) = p, by bisection to 1e-10 in probability.
    double quantile(double p) const;

  private:
    explicit Density1D(Kind kind);
    Kind kind_;
};

/// Affine image with mean 0 and variance 1. Throws DegenerateDataError for a
/// zero or non-finite variance.
Density1D standardize(const Density1D& d);

/// Gaussian, Uniform, Laplace and Logistic, each standardized.
std::vector<Density1D> standard_library();

/// Piecewise-constant fit of d on `n_cells` cells spanning its
/// [1e-12, 1 - 1e-12] quantile range.
Density1D fit_grid(const Density1D& d, std::size_t n_cells);

/// Integral of the density over its support.
double total_mass(const Density1D& d);

/// Largest second difference of log p on a grid inside the support.
double max_log_second_difference(const Density1D& d, std::size_t n_points = 4001);

struct CheckResult {
    std::string check;
    double value = 0.0;
    double bound = 0.0;
    double at = 0.0;  ///< location of the witness (argmax, worst t, ...)
    bool pass = false;
};

/// max p <= 1.
CheckResult check_max_density(const Density1D& d);

/// p(0) >= 1/8.
CheckResult check_density_at_zero(const Density1D& d);

/// P(|X| >= t) <= e^{-t+1} for each t; reports the tightest t.
CheckResult check_tail(const Density1D& d, std::span<const double> t_grid);

struct QuantileCheck {
    double a = 0.0;  ///< delta-quantile
    double b = 0.0;  ///< (1 - delta)-quantile
    CheckResult density;     ///< min p on [a, b] >= delta / (8e)
    CheckResult derivative;  ///< max |p'| at a, b <= 2 / delta
};

/// Density and slope bounds at the delta and 1 - delta quantiles. Requires
/// 0 < delta <= 1/e.
QuantileCheck check_quantile_density(const Density1D& d, double delta);

/// inf_c p(c) / min(F(c), 1 - F(c)) over half-line cuts on a fine grid,
/// checked against log(2)/2.
CheckResult cheeger_1d(const Density1D& d);

struct OverlapCheck {
    double tv = 0.0;
    double tv_limit = 0.0;  ///< delta^2 / 1e5
    double a = 0.0;
    double b = 0.0;
    double min_ratio = 0.0;
    bool pass = false;
};

/// TV between p and p_tilde by quadrature, then p_tilde / p > 0.9 on a grid
/// over [a, b], the delta and 1 - delta quantiles of p. Throws
/// PreconditionError when TV >= delta^2 / 1e5.
OverlapCheck interval_overlap_check(const Density1D& p, const Density1D& p_tilde, double delta);

/// TV between two densities by composite Gauss-Legendre quadrature.
double tv_distance(const Density1D& p, const Density1D& q);

inline constexpr double kClosedFormTol = 1e-9;
inline constexpr double kQuadratureTol = 1e-6;

}  // namespace hitrun::lc1d
