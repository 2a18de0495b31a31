#include "hitrun/chains.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hitrun/errors.hpp"
#include "hitrun/geometry.hpp"

namespace hitrun {
namespace {

// 4-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {-0.86113631159405258, -0.33998104358485626, 0.33998104358485626,
                                            0.86113631159405258};
constexpr std::array<double, 4> kGlWeights = {0.34785484513745386, 0.65214515486254614, 0.65214515486254614,
                                              0.34785484513745386};

constexpr int kRaysPerCircle = 20000;
constexpr int kPolarBands3d = 200;
constexpr int kAzimuths3d = 400;

struct Grid {
    AxisBox box;
    int cells = 0;
    int dim = 0;
    Vector width;

    Grid(const ConvexBody& body, int grid) : box(body.bounding_box()), cells(grid), dim(body.dim()) {
        width = (box.upper - box.lower) / static_cast<double>(grid);
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int k = 0; k < dim; ++k) s *= static_cast<std::size_t>(cells);
        return s;
    }

    std::size_t index(const Vector& x) const {
        std::size_t idx = 0;
        for (int k = dim - 1; k >= 0; --k) {
            int c = static_cast<int>(std::floor((x[k] - box.lower[k]) / width[k]));
            c = std::clamp(c, 0, cells - 1);
            idx = idx * static_cast<std::size_t>(cells) + static_cast<std::size_t>(c);
        }
        return idx;
    }
};

// Adds w * integral of p(u, u + r theta) r^{n-1} dr over each grid cell the
// ray from u crosses.
void integrate_ray(const Vector& u, const Vector& theta, double w, const Target& target, const Grid& grid,
                   std::vector<double>& mass) {
    const Chord ch = chord(target.body(), u, theta);
    const double t_end = ch.t_plus;
    if (!(t_end > 0.0)) return;

    std::vector<double> cuts{0.0, t_end};
    for (int k = 0; k < grid.dim; ++k) {
        if (theta[k] == 0.0) continue;
        for (int j = 0; j <= grid.cells; ++j) {
            const double line = grid.box.lower[k] + j * grid.width[k];
            const double t = (line - u[k]) / theta[k];
            // Grid lines through u itself round to t ~ 1e-17; they are not crossings.
            if (t > 1e-12 * t_end && t < t_end) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    const int n = target.dim();
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s];
        const double b = cuts[s + 1];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
            const double r = mid + half * kGlNodes[q];
            const Vector x = u + r * theta;
            acc += kGlWeights[q] * transition_density(u, x, target) * std::pow(r, n - 1);
        }
        mass[grid.index(u + mid * theta)] += w * half * acc;
    }
}

}  // namespace

void ChainConfig::validate() const {
    if (kind == ChainKind::ball_walk && !(delta > 0.0)) throw UsageError("ball walk: delta must be positive");
    if (max_chord_retries < 1) throw UsageError("max_chord_retries must be positive");
}

StepOutcome hit_and_run_step(const Vector& x, const Target& target, Rng& rng, int max_chord_retries) {
    const ConvexBody& body = target.body();
    StepOutcome out;
    for (int attempt = 0; attempt <= max_chord_retries; ++attempt) {
        const Vector theta = uniform_direction(rng, body.dim());
        const Chord ch = chord(body, x, theta);
        if (is_degenerate(body, ch)) {
            ++out.degenerate_redraws;
            continue;
        }
        const double t = sample_chord(restrict_to_chord(target, ch), rng);
        Vector y = x + t * theta;
        if (!body.contains(y)) {
            // The endpoint rounded outside K; treat like a degenerate draw.
            ++out.degenerate_redraws;
            continue;
        }
        out.moved = t != 0.0;
        out.x = std::move(y);
        return out;
    }
    throw StepError("hit_and_run_step: degenerate chord persisted after " + std::to_string(max_chord_retries) +
                    " redraws");
}

StepOutcome ball_walk_step(const Vector& x, const Target& target, double delta, Rng& rng) {
    if (!(delta > 0.0)) throw UsageError("ball_walk_step: delta must be positive");
    const Vector y = uniform_in_ball(rng, x, delta);
    if (!target.body().contains(y)) return StepOutcome{x, false, 0};
    if (const auto* g = std::get_if<TruncatedGaussianLaw>(&target.law())) {
        const double log_ratio = -0.5 * g->m * ((y - g->beta).squaredNorm() - (x - g->beta).squaredNorm());
        if (log_ratio < 0.0 && !(rng.uniform() < std::exp(log_ratio))) return StepOutcome{x, false, 0};
    }
    return StepOutcome{y, true, 0};
}

StepOutcome chain_step(const ChainConfig& config, const Target& target, const Vector& x, Rng& rng) {
    auto inner = [&]() -> StepOutcome {
        switch (config.kind) {
            case ChainKind::hit_and_run:
                return hit_and_run_step(x, target, rng, config.max_chord_retries);
            case ChainKind::ball_walk:
                return ball_walk_step(x, target, config.delta, rng);
            case ChainKind::exact_resample:
                return StepOutcome{exact_sample(target, rng), true, 0};
        }
        throw UsageError("chain_step: unknown chain kind");
    };
    if (config.lazy) return lazy_step(x, rng, inner);
    return inner();
}

StepOutcome advance(ChainState& state, const ChainConfig& config, const Target& target) {
    StepOutcome out = chain_step(config, target, state.x, state.rng);
    state.x = out.x;
    ++state.steps_taken;
    return out;
}

ChainRun run_chain(const ChainConfig& config, const Target& target, const Vector& init, std::size_t n_steps,
                   std::size_t thin, Rng& rng) {
    config.validate();
    if (thin == 0) throw UsageError("run_chain: thin must be positive");
    if (init.size() != target.dim()) throw UsageError("run_chain: init has wrong dimension");
    if (!target.body().contains(init)) throw DomainError("run_chain: init is outside the body");

    ChainRun run;
    run.n_steps = n_steps;
    const std::size_t records = 1 + n_steps / thin;
    run.steps.reserve(records);
    run.samples.reserve(records);
    run.moved.reserve(records);
    run.steps.push_back(0);
    run.samples.push_back(init);
    run.moved.push_back(0);

    Vector x = init;
    for (std::size_t step = 1; step <= n_steps; ++step) {
        StepOutcome out = chain_step(config, target, x, rng);
        run.degenerate_chords += static_cast<std::size_t>(out.degenerate_redraws);
        if (out.moved) ++run.n_moves;
        x = std::move(out.x);
        if (step % thin == 0) {
            run.steps.push_back(step);
            run.samples.push_back(x);
            run.moved.push_back(out.moved ? 1 : 0);
        }
    }
    return run;
}

double unit_ball_volume(int n) {
    if (n < 1) throw UsageError("unit_ball_volume: dimension must be positive");
    return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

double transition_density(const Vector& u, const Vector& x, const Target& target) {
    const ConvexBody& body = target.body();
    if (u.size() != body.dim() || x.size() != body.dim()) throw UsageError("transition_density: dimension mismatch");
    const Vector d = x - u;
    const double dist = d.norm();
    if (dist == 0.0) throw UsageError("transition_density: kernel is singular at x = u");
    if (!body.contains(u)) throw DomainError("transition_density: u is outside the body");
    if (!body.contains(x)) return 0.0;

    const int n = body.dim();
    const Chord ch = chord(body, u, d / dist);
    const ChordLawParams params = restrict_to_chord(target, ch);
    const double log_p = std::log(2.0 / (n * unit_ball_volume(n))) + log_density_unnormalized(target, x) -
                         log_chord_mass(params) - (n - 1) * std::log(dist);
    return std::exp(log_p);
}

std::vector<double> kernel_cell_masses(const Vector& u, const Target& target, int grid_cells) {
    const int n = target.dim();
    if (n != 2 && n != 3) throw UsageError("kernel quadrature supports n = 2 or 3 only");
    if (grid_cells < 1) throw UsageError("kernel quadrature: grid must be positive");
    if (!target.body().contains(u)) throw DomainError("kernel quadrature: u is outside the body");

    const Grid grid(target.body(), grid_cells);
    std::vector<double> mass(grid.size(), 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    Vector theta(n);
    if (n == 2) {
        const double w = two_pi / kRaysPerCircle;
        for (int k = 0; k < kRaysPerCircle; ++k) {
            const double phi = (k + 0.5) * w;
            theta << std::cos(phi), std::sin(phi);
            integrate_ray(u, theta, w, target, grid, mass);
        }
    } else {
        const double dz = 2.0 / kPolarBands3d;
        const double dpsi = two_pi / kAzimuths3d;
        for (int j = 0; j < kPolarBands3d; ++j) {
            const double z = -1.0 + (j + 0.5) * dz;
            const double rho = std::sqrt(1.0 - z * z);
            for (int k = 0; k < kAzimuths3d; ++k) {
                const double psi = (k + 0.5) * dpsi;
                theta << rho * std::cos(psi), rho * std::sin(psi), z;
                integrate_ray(u, theta, dz * dpsi, target, grid, mass);
            }
        }
    }
    return mass;
}

KernelTv empirical_kernel_tv(const Vector& u, const Target& target, std::size_t n_samples, int grid_cells, Rng& rng) {
    const int n = target.dim();
    if (n != 2 && n != 3) throw UsageError("empirical_kernel_tv: supports n = 2 or 3 only");
    if (n_samples == 0) throw UsageError("empirical_kernel_tv: n_samples must be positive");

    KernelTv out;
    out.cell_mass = kernel_cell_masses(u, target, grid_cells);
    const Grid grid(target.body(), grid_cells);
    std::vector<std::size_t> counts(grid.size(), 0);
    for (std::size_t k = 0; k < n_samples; ++k) {
        ++counts[grid.index(hit_and_run_step(u, target, rng).x)];
    }
    const double total = static_cast<double>(n_samples);
    out.cell_freq.resize(counts.size());
    double tv = 0.0;
    double noise = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const double p = out.cell_mass[c];
        out.cell_freq[c] = static_cast<double>(counts[c]) / total;
        tv += std::abs(out.cell_freq[c] - p);
        if (p > 0.0) noise += std::sqrt(2.0 * p * std::max(1.0 - p, 0.0) / (std::numbers::pi * total));
    }
    out.tv = 0.5 * tv;
    out.expected_noise = 0.5 * noise;
    return out;
}

}  // namespace hitrun
