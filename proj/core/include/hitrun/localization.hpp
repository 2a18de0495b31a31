#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hitrun/chains.hpp"
#include "hitrun/geometry.hpp"
#include "hitrun/rng.hpp"
#include "hitrun/targets.hpp"
#include "hitrun/types.hpp"

namespace hitrun {

//---------------------------------------------------------------------------//
// Stochastic localization with identity driving matrix
//---------------------------------------------------------------------------//

/// Chain used to estimate expectations under the current measure mu_t.
struct InnerSampler {
    ChainConfig chain;
    std::size_t budget = 256;  ///< recorded steps per estimate
    std::size_t burn_in = 64;  ///< discarded steps before recording
};

/// State of the process: c_t, t and the inner chain's current point.
/// mu_t is Uniform(K) at t = 0 and nu_{c/t, t} afterwards.
struct SLState {
    Vector c;
    double t = 0.0;
    Vector x;
    InnerSampler inner;

    /// Current measure mu_t on `body`.
    Target measure(const std::shared_ptr<const ConvexBody>& body) const;
};

/// c = 0, t = 0, inner chain started from an exact uniform sample.
SLState sl_init(const std::shared_ptr<const ConvexBody>& body, const InnerSampler& inner, Rng& rng);

/// Runs the inner chain under mu_t for burn_in + budget steps from state.x
/// and returns the `budget` recorded points; state.x is left at the last one.
PointList sample_mu_t(SLState& state, const std::shared_ptr<const ConvexBody>& body, Rng& rng);

/// Euler-Maruyama step c <- c + sqrt(h) xi + h b_hat, t <- t + h, where b_hat
/// averages inner-chain samples of mu_t. `base` must be a uniform target.
SLState sl_step(const SLState& state, const Target& base, double h, Rng& rng);

/// Default step size min(1/64, T/256).
double default_sl_step(double T);

/// Calls `visit(state, rng)` at t = 0 and whenever t reaches one of the
/// `checkpoints` (times must be multiples of h), then returns the final state
/// at the last checkpoint.
SLState run_sl_path(const Target& base, const InnerSampler& inner, double h, std::span<const double> checkpoints,
                    Rng& rng, const std::function<void(SLState&, Rng&)>& visit);

/// X + Z with X uniform on K and Z ~ N(0, I/T): the law of c_T / T.
Vector direct_cT_sample(const ConvexBody& body, double T, Rng& rng);

struct ShellMass {
    Estimate chain;     ///< hit-and-run estimate (batch-means SE)
    Estimate exact;     ///< independent exact-sample estimate
    double lower = 0.0; ///< 1/sqrt(2)
    double upper = 0.0; ///< sqrt(2)
};

/// P(1/sqrt(2) < |x - beta| < sqrt(2)) under nu_{beta,n} on `body`, by a
/// hit-and-run run of `n_samples` recorded states (thinned by `thin`, after
/// `burn_in` steps from the body center) and by `n_samples` exact draws.
ShellMass shell_mass(const ConvexBody& body, const Vector& beta, std::size_t n_samples, Rng& rng,
                     std::size_t burn_in = 2000, std::size_t thin = 10);

/// P(1/sqrt(2) < |Z| < sqrt(2)) for Z ~ N(0, I/n) in R^n.
double gaussian_shell_mass(int n);

//---------------------------------------------------------------------------//
// One-dimensional localization on a grid
//---------------------------------------------------------------------------//

/// Probability masses on equal cells of [z_min, z_max].
class Grid1D {
  public:
    static constexpr std::size_t kMinCells = 64;

    /// Validates n_cells >= 64, nonnegative masses summing to 1 within 1e-12.
    Grid1D(double z_min, double z_max, std::vector<double> mass);

    /// Cell masses proportional to density(center) * width, renormalized.
    static Grid1D from_density(const std::function<double(double)>& density, double z_min, double z_max,
                               std::size_t n_cells);
    /// Standard normal on [-half_width, half_width].
    static Grid1D standard_normal(std::size_t n_cells, double half_width = 8.0);
    /// Uniform on [-sqrt(3), sqrt(3)].
    static Grid1D isotropic_uniform(std::size_t n_cells);

    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    std::size_t n_cells() const { return mass_.size(); }
    double spacing() const { return (z_max_ - z_min_) / static_cast<double>(mass_.size()); }
    double center(std::size_t i) const { return z_min_ + (static_cast<double>(i) + 0.5) * spacing(); }
    const std::vector<double>& mass() const { return mass_; }

    double mean() const;
    /// Variance of the discrete measure on cell centers.
    double variance() const;

  private:
    double z_min_;
    double z_max_;
    std::vector<double> mass_;
};

struct Tilt1DParams {
    double y = 0.0;
    double tau = 0.0;  ///< t sigma^2
    double sigma2 = 1.0;
    double alpha = 1.0;

    void validate() const;
};

/// omega0 * exp(-(tau/2)(z - y)^2), renormalized. Throws UnderflowError when
/// the unnormalized mass is below the smallest normal double.
Grid1D tilt_1d(const Grid1D& omega0, const Tilt1DParams& params);

/// Draws a cell of omega0 by inverse CDF and adds N(0, 1/(alpha sigma2)) to
/// its center.
double sample_rho(const Grid1D& omega0, double alpha, double sigma2, Rng& rng);

/// sum_i h_i mass_i with h_i in [0, 1].
double apply_h(const Grid1D& omega, std::span<const double> h);

/// h_i = 1 for cells with center >= 0.
std::vector<double> right_half_indicator(const Grid1D& omega);

struct LipschitzReport {
    double max_ratio = 0.0;
    double bound = 0.0;  ///< sqrt(alpha sigma2)
    double worst_y = 0.0;
    double worst_y_tilde = 0.0;
};

/// max |G(y) - G(y~)| / |y - y~| with G(y) = tilt_1d(omega0, y, alpha sigma2)(h).
LipschitzReport lipschitz_check_1d(const Grid1D& omega0, double alpha, double sigma2, std::span<const double> h,
                                   std::span<const std::pair<double, double>> y_pairs);

struct VarianceTrace {
    std::vector<double> t;
    std::vector<double> mean_variance;
    std::vector<double> se;
};

/// Simulates d omega_t(z) = sigma (z - b_t) omega_t(z) dW_t on the grid with
/// `n_steps` explicit Euler steps over [0, alpha] for each path and returns
/// the path-averaged Var(omega_t). Throws StepSizeError if a cell mass turns
/// negative.
VarianceTrace variance_supermartingale_check(const Grid1D& omega0, double sigma2, double alpha,
                                             std::size_t n_paths, std::size_t n_steps, Rng& rng);

}  // namespace hitrun
