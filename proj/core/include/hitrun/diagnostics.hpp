#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hitrun/chains.hpp"
#include "hitrun/geometry.hpp"
#include "hitrun/rng.hpp"
#include "hitrun/targets.hpp"
#include "hitrun/types.hpp"

namespace hitrun {

/// S1 = { x in K : normal . x <= offset }, S2 = K \ S1.
struct PartitionSpec {
    Vector normal;
    double offset = 0.0;

    /// Coordinate halfspace x_axis <= offset.
    static PartitionSpec coordinate(int dim, int axis, double offset);
    void validate(int dim) const;
    bool in_s1(const Vector& x) const { return normal.dot(x) <= offset; }
};

//---------------------------------------------------------------------------//
// Total variation on axis marginals
//---------------------------------------------------------------------------//

/// Reference law of one coordinate: a CDF supported on [lo, hi].
struct Marginal {
    double lo = 0.0;
    double hi = 1.0;
    std::function<double(double)> cdf;

    static Marginal uniform(double lo, double hi);
    /// Coordinate of a uniform point in the n-ball of the given center coordinate and radius.
    static Marginal ball(double center, double radius, int n);
    /// Normal(mean, sd) truncated to [lo, hi].
    static Marginal truncated_normal(double mean, double sd, double lo, double hi);
};

/// Exact axis marginals of `target` (uniform on a box or ball, truncated
/// Gaussian on a box). Throws UsageError for other combinations.
std::vector<Marginal> target_marginals(const Target& target);

struct TvReport {
    double tv = 0.0;              ///< max over axes
    std::vector<double> per_axis;
    double noise_floor = 0.0;     ///< half the binned TV between two halves of the sample
};

/// Binned TV between each empirical axis marginal and its reference, with
/// sample mass outside the reference support counted in full.
TvReport tv_marginal(const PointList& samples, std::span<const Marginal> reference, int n_bins = 20);

//---------------------------------------------------------------------------//
// Warm starts
//---------------------------------------------------------------------------//

/// Uniform law on { x in K : direction . x <= q } of measure 1/M under the
/// uniform law on K, so its density ratio against that law is M.
struct WarmStart {
    std::shared_ptr<const ConvexBody> body;
    Vector direction;
    double q = 0.0;
    double M = 1.0;
    bool exact = false;  ///< q is exact rather than a Monte Carlo quantile

    Vector sample(Rng& rng, std::size_t max_tries = 10'000'000) const;
    bool contains(const Vector& x) const;
};

/// Sub-body cut by a halfspace along `direction` (default e_1). For boxes cut
/// along an axis q is exact; otherwise it is the empirical 1/M quantile of
/// `n_pilot` uniform samples. Throws RangeError when fewer than 16 pilot
/// samples would fall in the sub-body.
WarmStart warm_start(std::shared_ptr<const ConvexBody> body, double M, Rng& rng,
                     std::optional<Vector> direction = std::nullopt, std::size_t n_pilot = 100'000);

//---------------------------------------------------------------------------//
// Conductance and Dirichlet forms
//---------------------------------------------------------------------------//

struct SConductance {
    double phi = 0.0;
    double se = 0.0;
    double nu_s1 = 0.0;
    double numerator = 0.0;
    double numerator_se = 0.0;
    bool approximate = false;  ///< samples came from a long chain, not exact draws
};

/// Phi_s restricted to one halfspace cut: the escape flux
/// int_{S1} P(x, S2) dnu(x) over min(nu(S1), nu(S2)) - s, with nu estimated
/// from the same `n_samples` draws. Exact draws are used up to dimension 8.
/// Throws PreconditionError when the estimated nu(S1) is outside (s, 1 - s).
SConductance s_conductance(const ChainConfig& chain, const Target& target, const PartitionSpec& partition, double s,
                           std::size_t n_samples, Rng& rng);

/// Escape flux int_{S1} P(x, S2) dmu from points `xs` distributed as mu: the
/// Dirichlet form of the indicator of S1. The SE treats `xs` as independent.
Estimate escape_flux(const ChainConfig& chain, const Target& target, const PartitionSpec& partition,
                     const PointList& xs, Rng& rng);

/// M s + M (1 - phi_s^2 / 2)^N evaluated in the log domain.
double ls_bound(double M, double s, double phi_s, double N);

//---------------------------------------------------------------------------//
// Step size and overlap
//---------------------------------------------------------------------------//

/// Empirical 1/8-quantile of |Y - u| over one-step hit-and-run moves, with an
/// order-statistic bootstrap SE.
Estimate estimate_F_u(const Target& target, const Vector& u, std::size_t n_samples, Rng& rng,
                      std::size_t n_bootstrap = 200);

/// (1/128) min{2r, 1/(8 sqrt(n))}.
double F_u_lower_bound(double r, int n);

struct OverlapTv {
    double grid_tv = 0.0;  ///< binned TV of the two quadrature cell-mass vectors (a lower bound)
    double mc_tv = 0.0;    ///< E_{Y~P_u}[(1 - p_v(Y)/p_u(Y))_+]
    double mc_se = 0.0;
};

/// TV between the one-step hit-and-run laws from u and from v (n = 2 or 3).
OverlapTv kernel_overlap_tv(const Target& target, const Vector& u, const Vector& v, std::size_t n_samples, int grid,
                            Rng& rng);

//---------------------------------------------------------------------------//
// Mixing curves
//---------------------------------------------------------------------------//

struct MixingReport {
    std::vector<std::size_t> steps;
    std::vector<double> tv;
    std::vector<double> se;
    std::vector<double> noise_floor;
    std::optional<double> phi_s;
    std::optional<double> dirichlet;
    double epsilon = 0.1;
    std::optional<std::size_t> mixing_step;  ///< first checkpoint with tv <= epsilon

    /// True when each tv is at most the previous one plus `k` combined SEs.
    bool non_increasing(double k = 3.0) const;
};

using InitSampler = std::function<Vector(Rng&)>;

/// Runs `n_replicas` independent chains from `init` and measures marginal TV
/// to the target at each checkpoint. Replica i uses the stream derived from
/// (seed drawn from `rng`, i); the SE is a bootstrap over replicas.
MixingReport mixing_curve(const ChainConfig& chain, const Target& target, const InitSampler& init,
                          std::span<const std::size_t> checkpoints, std::size_t n_replicas, Rng& rng,
                          double epsilon = 0.1, int n_bins = 20, unsigned threads = 1, std::size_t n_bootstrap = 100);

//---------------------------------------------------------------------------//
// K_r
//---------------------------------------------------------------------------//

/// Fraction of uniform points of K classified `in` by in_K_r (undecided
/// counts as out). Requires a body containing a unit ball.
Estimate K_r_mass(const ConvexBody& body, double r, std::size_t n_samples, Rng& rng, std::size_t n_lambda = 4000);

/// 1 - 2 sqrt(n) r.
double K_r_mass_lower_bound(double r, int n);

}  // namespace hitrun
