#include "hitrun/localization.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include "hitrun/errors.hpp"
#include "hitrun/stats.hpp"

namespace hitrun {

//---------------------------------------------------------------------------//
// Stochastic localization
//---------------------------------------------------------------------------//

Target SLState::measure(const std::shared_ptr<const ConvexBody>& body) const {
    if (t == 0.0) return Target::uniform(body);
    return Target::truncated_gaussian(body, c / t, t);
}

SLState sl_init(const std::shared_ptr<const ConvexBody>& body, const InnerSampler& inner, Rng& rng) {
    inner.chain.validate();
    if (inner.budget == 0) throw UsageError("inner sampler budget must be positive");
    SLState s;
    s.c = Vector::Zero(body->dim());
    s.t = 0.0;
    s.x = uniform_in_body(*body, rng);
    s.inner = inner;
    return s;
}

PointList sample_mu_t(SLState& state, const std::shared_ptr<const ConvexBody>& body, Rng& rng) {
    const Target mu = state.measure(body);
    Vector x = state.x;
    for (std::size_t k = 0; k < state.inner.burn_in; ++k) x = chain_step(state.inner.chain, mu, x, rng).x;
    PointList out;
    out.reserve(state.inner.budget);
    for (std::size_t k = 0; k < state.inner.budget; ++k) {
        x = chain_step(state.inner.chain, mu, x, rng).x;
        out.push_back(x);
    }
    state.x = x;
    return out;
}

SLState sl_step(const SLState& state, const Target& base, double h, Rng& rng) {
    if (!(h > 0.0)) throw UsageError("sl_step: h must be positive");
    if (!base.is_uniform()) throw UsageError("sl_step: base measure must be uniform on K");
    SLState next = state;
    const PointList xs = sample_mu_t(next, base.body_ptr(), rng);
    const Vector b_hat = stats::sample_mean(xs);
    const double sh = std::sqrt(h);
    for (Eigen::Index i = 0; i < next.c.size(); ++i) next.c[i] += sh * rng.normal();
    next.c += h * b_hat;
    next.t = state.t + h;
    return next;
}

double default_sl_step(double T) { return std::min(1.0 / 64.0, T / 256.0); }

SLState run_sl_path(const Target& base, const InnerSampler& inner, double h, std::span<const double> checkpoints,
                    Rng& rng, const std::function<void(SLState&, Rng&)>& visit) {
    if (!(h > 0.0)) throw UsageError("run_sl_path: h must be positive");
    std::vector<std::size_t> stops;
    for (double cp : checkpoints) {
        const double k = cp / h;
        const double kr = std::round(k);
        if (cp < 0.0 || std::abs(k - kr) > 1e-9 * std::max(1.0, k)) {
            throw UsageError("run_sl_path: checkpoints must be nonnegative multiples of h");
        }
        stops.push_back(static_cast<std::size_t>(kr));
    }
    if (!std::is_sorted(stops.begin(), stops.end())) throw UsageError("run_sl_path: checkpoints must be sorted");

    SLState state = sl_init(base.body_ptr(), inner, rng);
    const std::size_t last = stops.empty() ? 0 : stops.back();
    auto next_stop = stops.begin();
    for (std::size_t k = 0;; ++k) {
        while (next_stop != stops.end() && *next_stop == k) {
            visit(state, rng);
            ++next_stop;
        }
        if (k == last) break;
        state = sl_step(state, base, h, rng);
        state.t = static_cast<double>(k + 1) * h;
    }
    return state;
}

Vector direct_cT_sample(const ConvexBody& body, double T, Rng& rng) {
    if (!(T > 0.0)) throw UsageError("direct_cT_sample: T must be positive");
    Vector x = uniform_in_body(body, rng);
    const double s = 1.0 / std::sqrt(T);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += s * rng.normal();
    return x;
}

ShellMass shell_mass(const ConvexBody& body, const Vector& beta, std::size_t n_samples, Rng& rng,
                     std::size_t burn_in, std::size_t thin) {
    if (beta.size() != body.dim()) throw UsageError("shell_mass: beta has wrong dimension");
    if (n_samples == 0) throw UsageError("shell_mass: n_samples must be positive");
    if (thin == 0) throw UsageError("shell_mass: thin must be positive");
    const Target target = Target::truncated_gaussian(body, beta, static_cast<double>(body.dim()));

    ShellMass out;
    out.lower = 1.0 / std::sqrt(2.0);
    out.upper = std::sqrt(2.0);
    auto in_shell = [&](const Vector& x) {
        const double r = (x - beta).norm();
        return r > out.lower && r < out.upper;
    };

    Vector x = body.center();
    for (std::size_t k = 0; k < burn_in; ++k) x = hit_and_run_step(x, target, rng).x;
    std::vector<double> series(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        for (std::size_t j = 0; j < thin; ++j) x = hit_and_run_step(x, target, rng).x;
        series[k] = in_shell(x) ? 1.0 : 0.0;
    }
    out.chain.value = stats::mean(series);
    out.chain.se = stats::batch_means_se(series);
    out.chain.n = n_samples;

    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        if (in_shell(exact_sample(target, rng))) ++hits;
    }
    out.exact = proportion(hits, n_samples);
    return out;
}

double gaussian_shell_mass(int n) {
    if (n < 1) throw UsageError("gaussian_shell_mass: dimension must be positive");
    // n |Z|^2 is chi-square with n degrees of freedom.
    return stats::chi_square_cdf(2.0 * n, n) - stats::chi_square_cdf(0.5 * n, n);
}

//---------------------------------------------------------------------------//
// Grid1D
//---------------------------------------------------------------------------//

Grid1D::Grid1D(double z_min, double z_max, std::vector<double> mass)
    : z_min_(z_min), z_max_(z_max), mass_(std::move(mass)) {
    if (!(z_min_ < z_max_)) throw UsageError("Grid1D: need z_min < z_max");
    if (mass_.size() < kMinCells) throw UsageError("Grid1D: need at least 64 cells");
    double total = 0.0;
    for (double m : mass_) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw UsageError("Grid1D: masses must be finite and nonnegative");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-12) throw UsageError("Grid1D: masses must sum to 1");
}

Grid1D Grid1D::from_density(const std::function<double(double)>& density, double z_min, double z_max,
                            std::size_t n_cells) {
    if (!(z_min < z_max) || n_cells == 0) throw UsageError("Grid1D::from_density: bad grid");
    const double dz = (z_max - z_min) / static_cast<double>(n_cells);
    std::vector<double> m(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) m[i] = density(z_min + (static_cast<double>(i) + 0.5) * dz);
    const double total = std::accumulate(m.begin(), m.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) throw UsageError("Grid1D::from_density: density has no mass");
    for (double& v : m) v /= total;
    return Grid1D(z_min, z_max, std::move(m));
}

Grid1D Grid1D::standard_normal(std::size_t n_cells, double half_width) {
    return from_density([](double z) { return std::exp(-0.5 * z * z); }, -half_width, half_width, n_cells);
}

Grid1D Grid1D::isotropic_uniform(std::size_t n_cells) {
    const double a = std::sqrt(3.0);
    return from_density([](double) { return 1.0; }, -a, a, n_cells);
}

double Grid1D::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) s += mass_[i] * center(i);
    return s;
}

double Grid1D::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        const double d = center(i) - m;
        s += mass_[i] * d * d;
    }
    return s;
}

//---------------------------------------------------------------------------//
// One-dimensional tilts
//---------------------------------------------------------------------------//

void Tilt1DParams::validate() const {
    if (!(sigma2 > 0.0) || !(alpha > 0.0)) throw UsageError("Tilt1DParams: sigma2 and alpha must be positive");
    if (!(tau >= 0.0)) throw UsageError("Tilt1DParams: tau must be nonnegative");
    if (tau > alpha * sigma2 * (1.0 + 1e-12)) throw UsageError("Tilt1DParams: tau exceeds alpha * sigma2");
    if (!std::isfinite(y)) throw UsageError("Tilt1DParams: y must be finite");
}

Grid1D tilt_1d(const Grid1D& omega0, const Tilt1DParams& params) {
    params.validate();
    const auto& m0 = omega0.mass();
    std::vector<double> logw(m0.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m0.size(); ++i) {
        const double d = omega0.center(i) - params.y;
        logw[i] = m0[i] > 0.0 ? std::log(m0[i]) - 0.5 * params.tau * d * d : -std::numeric_limits<double>::infinity();
        top = std::max(top, logw[i]);
    }
    if (!(top >= std::log(DBL_MIN))) throw UnderflowError("tilt_1d: tilted mass underflows");
    std::vector<double> m(m0.size());
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = std::exp(logw[i] - top);
        total += m[i];
    }
    for (double& v : m) v /= total;
    return Grid1D(omega0.z_min(), omega0.z_max(), std::move(m));
}

double sample_rho(const Grid1D& omega0, double alpha, double sigma2, Rng& rng) {
    if (!(alpha * sigma2 > 0.0)) throw UsageError("sample_rho: alpha * sigma2 must be positive");
    const auto& m = omega0.mass();
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t cell = m.size() - 1;
    for (std::size_t i = 0; i < m.size(); ++i) {
        acc += m[i];
        if (u < acc) {
            cell = i;
            break;
        }
    }
    return omega0.center(cell) + rng.normal() / std::sqrt(alpha * sigma2);
}

double apply_h(const Grid1D& omega, std::span<const double> h) {
    if (h.size() != omega.n_cells()) throw UsageError("apply_h: weight length differs from cell count");
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] >= 0.0 && h[i] <= 1.0)) throw UsageError("apply_h: weights must lie in [0, 1]");
        s += h[i] * omega.mass()[i];
    }
    return s;
}

std::vector<double> right_half_indicator(const Grid1D& omega) {
    std::vector<double> h(omega.n_cells());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = omega.center(i) >= 0.0 ? 1.0 : 0.0;
    return h;
}

LipschitzReport lipschitz_check_1d(const Grid1D& omega0, double alpha, double sigma2, std::span<const double> h,
                                   std::span<const std::pair<double, double>> y_pairs) {
    LipschitzReport r;
    const double tau = alpha * sigma2;
    r.bound = std::sqrt(tau);
    auto G = [&](double y) { return apply_h(tilt_1d(omega0, Tilt1DParams{y, tau, sigma2, alpha}), h); };
    for (const auto& [y, yt] : y_pairs) {
        if (y == yt) continue;
        const double ratio = std::abs(G(y) - G(yt)) / std::abs(y - yt);
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.worst_y = y;
            r.worst_y_tilde = yt;
        }
    }
    return r;
}

VarianceTrace variance_supermartingale_check(const Grid1D& omega0, double sigma2, double alpha,
                                             std::size_t n_paths, std::size_t n_steps, Rng& rng) {
    if (!(sigma2 > 0.0) || !(alpha > 0.0)) throw UsageError("variance check: sigma2 and alpha must be positive");
    if (n_paths < 2 || n_steps == 0) throw UsageError("variance check: need >= 2 paths and >= 1 step");
    const double dt = alpha / static_cast<double>(n_steps);
    const double scale = std::sqrt(sigma2 * dt);
    const std::size_t cells = omega0.n_cells();
    std::vector<double> z(cells);
    for (std::size_t i = 0; i < cells; ++i) z[i] = omega0.center(i);

    std::vector<std::vector<double>> var(n_steps + 1, std::vector<double>(n_paths));
    std::vector<double> w(cells);
    for (std::size_t p = 0; p < n_paths; ++p) {
        w = omega0.mass();
        for (std::size_t k = 0;; ++k) {
            double mean = 0.0;
            for (std::size_t i = 0; i < cells; ++i) mean += w[i] * z[i];
            double v = 0.0;
            for (std::size_t i = 0; i < cells; ++i) v += w[i] * (z[i] - mean) * (z[i] - mean);
            var[k][p] = v;
            if (k == n_steps) break;

            const double a = scale * rng.normal();
            double total = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                w[i] *= 1.0 + a * (z[i] - mean);
                if (w[i] < 0.0) {
                    throw StepSizeError("variance check: negative cell mass; use more steps");
                }
                total += w[i];
            }
            for (double& x : w) x /= total;
        }
    }

    VarianceTrace out;
    out.t.resize(n_steps + 1);
    out.mean_variance.resize(n_steps + 1);
    out.se.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        out.t[k] = static_cast<double>(k) * dt;
        out.mean_variance[k] = stats::mean(var[k]);
        out.se[k] = stats::standard_error(var[k]);
    }
    return out;
}

}  // namespace hitrun
