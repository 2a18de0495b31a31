#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hitrun/rng.hpp"
#include "hitrun/targets.hpp"
#include "hitrun/types.hpp"

namespace hitrun {

enum class ChainKind {
    hit_and_run,
    ball_walk,
    /// Independence kernel: every step is a fresh exact draw from the target.
    exact_resample,
};

struct ChainConfig {
    ChainKind kind = ChainKind::hit_and_run;
    double delta = 0.1;  ///< ball-walk step radius
    bool lazy = false;
    int max_chord_retries = 16;

    void validate() const;
};

struct StepOutcome {
    Vector x;
    bool moved = false;
    int degenerate_redraws = 0;
};

/// One replica: its current point, step count and private random stream.
struct ChainState {
    Vector x;
    std::size_t steps_taken = 0;
    Rng rng;
};

/// Hit-and-run step: uniform direction, exact chord, exact draw from the
/// target restricted to the chord. Degenerate chords are redrawn up to
/// `max_chord_retries` times, then StepError is thrown.
StepOutcome hit_and_run_step(const Vector& x, const Target& target, Rng& rng, int max_chord_retries = 16);

/// Ball-walk step with radius `delta`. Proposals outside K are refused; for
/// truncated-Gaussian targets the move is Metropolis-accepted.
StepOutcome ball_walk_step(const Vector& x, const Target& target, double delta, Rng& rng);

/// Stays at x with probability exactly 1/2, otherwise runs `inner`.
template <class InnerStep>
StepOutcome lazy_step(const Vector& x, Rng& rng, InnerStep&& inner) {
    if (rng.coin()) return StepOutcome{x, false, 0};
    return inner();
}

StepOutcome chain_step(const ChainConfig& config, const Target& target, const Vector& x, Rng& rng);

/// Advances a replica by one step in place.
StepOutcome advance(ChainState& state, const ChainConfig& config, const Target& target);

struct ChainRun {
    std::vector<std::size_t> steps;  ///< step index of each recorded state
    PointList samples;               ///< init followed by every thin-th state
    std::vector<std::uint8_t> moved; ///< whether the recorded step moved (0 for init)
    std::size_t n_steps = 0;
    std::size_t n_moves = 0;
    std::size_t degenerate_chords = 0;

    double acceptance_rate() const {
        return n_steps == 0 ? 0.0 : static_cast<double>(n_moves) / static_cast<double>(n_steps);
    }
};

/// Runs `n_steps` steps from `init`, recording the initial state and then
/// every `thin`-th state. Throws DomainError if init is outside K.
ChainRun run_chain(const ChainConfig& config, const Target& target, const Vector& init, std::size_t n_steps,
                   std::size_t thin, Rng& rng);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// One-step hit-and-run transition density from u to x:
/// 2 / (n pi_n) * nu(x) / (nu(l_ux) |u - x|^{n-1}),
/// with nu(l_ux) the integral of the density along the line through u and x.
/// Returns 0 for x outside K; throws UsageError for x == u.
double transition_density(const Vector& u, const Vector& x, const Target& target);

/// Total variation between a histogram of `n_samples` one-step hit-and-run
/// moves from u and the transition density integrated over the same cells.
/// Cells tile the body's bounding box with `grid` cells per axis. Supports
/// n = 2 and n = 3.
struct KernelTv {
    double tv = 0.0;
    double expected_noise = 0.0;  ///< E[TV] under pure multinomial noise
    std::vector<double> cell_mass;
    std::vector<double> cell_freq;
};

KernelTv empirical_kernel_tv(const Vector& u, const Target& target, std::size_t n_samples, int grid, Rng& rng);

/// Cell masses of the one-step law from u on the bounding-box grid, by
/// quadrature of `transition_density` along rays from u.
std::vector<double> kernel_cell_masses(const Vector& u, const Target& target, int grid);

}  // namespace hitrun
