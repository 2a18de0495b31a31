#include "hitrun/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "hitrun/errors.hpp"
#include "hitrun/normal.hpp"
#include "hitrun/parallel.hpp"
#include "hitrun/stats.hpp"

namespace hitrun {
namespace {

constexpr std::size_t kMinTvSamples = 1000;
constexpr int kExactSampleMaxDim = 8;
constexpr std::size_t kMinWarmPilotHits = 16;

// Binned TV between the empirical law of `xs` and `ref`.
double axis_tv(std::span<const double> xs, const Marginal& ref, int n_bins) {
    const double width = (ref.hi - ref.lo) / n_bins;
    std::vector<double> counts(static_cast<std::size_t>(n_bins), 0.0);
    double outside = 0.0;
    for (double x : xs) {
        if (x < ref.lo || x > ref.hi) {
            outside += 1.0;
            continue;
        }
        const int b = std::min(static_cast<int>((x - ref.lo) / width), n_bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    const double n = static_cast<double>(xs.size());
    double acc = outside / n;
    double prev = ref.cdf(ref.lo);
    for (int b = 0; b < n_bins; ++b) {
        const double next = b + 1 == n_bins ? ref.cdf(ref.hi) : ref.cdf(ref.lo + (b + 1) * width);
        acc += std::abs(counts[static_cast<std::size_t>(b)] / n - (next - prev));
        prev = next;
    }
    return 0.5 * acc;
}

// Binned TV between two empirical samples on the reference support.
double split_tv(std::span<const double> a, std::span<const double> b, const Marginal& ref, int n_bins) {
    const double width = (ref.hi - ref.lo) / n_bins;
    auto histogram = [&](std::span<const double> xs) {
        std::vector<double> h(static_cast<std::size_t>(n_bins) + 1, 0.0);  // last slot: outside
        for (double x : xs) {
            if (x < ref.lo || x > ref.hi) {
                h.back() += 1.0;
            } else {
                h[static_cast<std::size_t>(std::min(static_cast<int>((x - ref.lo) / width), n_bins - 1))] += 1.0;
            }
        }
        for (double& v : h) v /= static_cast<double>(xs.size());
        return h;
    };
    const auto ha = histogram(a);
    const auto hb = histogram(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < ha.size(); ++i) acc += std::abs(ha[i] - hb[i]);
    return 0.5 * acc;
}

std::vector<double> coordinate(const PointList& xs, int axis) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i][axis];
    return out;
}

double marginal_tv_max(const PointList& samples, std::span<const Marginal> reference, int n_bins) {
    double tv = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        tv = std::max(tv, axis_tv(coordinate(samples, static_cast<int>(k)), reference[k], n_bins));
    }
    return tv;
}

}  // namespace

PartitionSpec PartitionSpec::coordinate(int dim, int axis, double offset) {
    if (axis < 0 || axis >= dim) throw UsageError("PartitionSpec: axis out of range");
    PartitionSpec p;
    p.normal = Vector::Unit(dim, axis);
    p.offset = offset;
    return p;
}

void PartitionSpec::validate(int dim) const {
    if (normal.size() != dim) throw UsageError("PartitionSpec: normal has wrong dimension");
    if (std::abs(normal.norm() - 1.0) > 1e-9) throw UsageError("PartitionSpec: normal must be a unit vector");
}

//---------------------------------------------------------------------------//
// Marginals and TV
//---------------------------------------------------------------------------//

Marginal Marginal::uniform(double lo, double hi) {
    if (!(lo < hi)) throw UsageError("Marginal::uniform: need lo < hi");
    return Marginal{lo, hi, [lo, hi](double x) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); }};
}

Marginal Marginal::ball(double center, double radius, int n) {
    if (!(radius > 0.0) || n < 1) throw UsageError("Marginal::ball: bad parameters");
    // (x - c)/R is distributed as 2 Beta((n+1)/2, (n+1)/2) - 1.
    const double a = 0.5 * (n + 1);
    return Marginal{center - radius, center + radius, [center, radius, a](double x) {
                        const double u = std::clamp(0.5 * ((x - center) / radius + 1.0), 0.0, 1.0);
                        return boost::math::ibeta(a, a, u);
                    }};
}

Marginal Marginal::truncated_normal(double mean, double sd, double lo, double hi) {
    if (!(sd > 0.0) || !(lo < hi)) throw UsageError("Marginal::truncated_normal: bad parameters");
    const double za = (lo - mean) / sd;
    const double zb = (hi - mean) / sd;
    const double log_total = normal::log_interval_mass(za, zb);
    return Marginal{lo, hi, [=](double x) {
                        if (x <= lo) return 0.0;
                        if (x >= hi) return 1.0;
                        return std::exp(normal::log_interval_mass(za, (x - mean) / sd) - log_total);
                    }};
}

std::vector<Marginal> target_marginals(const Target& target) {
    const int n = target.dim();
    std::vector<Marginal> out;
    out.reserve(static_cast<std::size_t>(n));
    const auto& shape = target.body().shape();
    if (target.is_uniform()) {
        if (const auto* box = std::get_if<BoxShape>(&shape)) {
            for (int k = 0; k < n; ++k) out.push_back(Marginal::uniform(box->lower[k], box->upper[k]));
            return out;
        }
        if (const auto* ball = std::get_if<BallShape>(&shape)) {
            for (int k = 0; k < n; ++k) out.push_back(Marginal::ball(ball->center[k], ball->radius, n));
            return out;
        }
    } else if (const auto* box = std::get_if<BoxShape>(&shape)) {
        const auto& g = std::get<TruncatedGaussianLaw>(target.law());
        const double sd = 1.0 / std::sqrt(g.m);
        for (int k = 0; k < n; ++k) {
            out.push_back(Marginal::truncated_normal(g.beta[k], sd, box->lower[k], box->upper[k]));
        }
        return out;
    }
    throw UsageError("target_marginals: analytic marginals exist only for boxes and uniform balls");
}

TvReport tv_marginal(const PointList& samples, std::span<const Marginal> reference, int n_bins) {
    if (samples.size() < kMinTvSamples) throw UsageError("tv_marginal: need at least 1000 samples");
    if (n_bins < 1) throw UsageError("tv_marginal: n_bins must be positive");
    if (static_cast<Eigen::Index>(reference.size()) != samples.front().size()) {
        throw UsageError("tv_marginal: one reference marginal per axis required");
    }
    TvReport r;
    const std::size_t half = samples.size() / 2;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const auto xs = coordinate(samples, static_cast<int>(k));
        const double tv = axis_tv(xs, reference[k], n_bins);
        r.per_axis.push_back(tv);
        r.tv = std::max(r.tv, tv);
        const std::span<const double> all(xs);
        r.noise_floor = std::max(r.noise_floor,
                                 0.5 * split_tv(all.first(half), all.subspan(half, half), reference[k], n_bins));
    }
    return r;
}

//---------------------------------------------------------------------------//
// Warm start
//---------------------------------------------------------------------------//

bool WarmStart::contains(const Vector& x) const { return body->contains(x) && direction.dot(x) <= q; }

Vector WarmStart::sample(Rng& rng, std::size_t max_tries) const {
    for (std::size_t k = 0; k < max_tries; ++k) {
        Vector x = uniform_in_body(*body, rng);
        if (direction.dot(x) <= q) return x;
    }
    throw EfficiencyError("WarmStart::sample: rejection exceeded its iteration cap");
}

WarmStart warm_start(std::shared_ptr<const ConvexBody> body, double M, Rng& rng, std::optional<Vector> direction,
                     std::size_t n_pilot) {
    if (!(M >= 1.0) || !std::isfinite(M)) throw UsageError("warm_start: M must be finite and >= 1");
    const int n = body->dim();
    WarmStart w;
    w.body = body;
    w.M = M;
    w.direction = direction ? *direction : Vector::Unit(n, 0);
    if (w.direction.size() != n || w.direction.norm() == 0.0) throw UsageError("warm_start: bad direction");
    w.direction.normalize();

    if (M == 1.0) {
        w.q = std::numeric_limits<double>::infinity();
        w.exact = true;
        return w;
    }
    if (const auto* box = std::get_if<BoxShape>(&body->shape())) {
        Eigen::Index axis = 0;
        const double top = w.direction.cwiseAbs().maxCoeff(&axis);
        if (top == 1.0) {
            const double lo = box->lower[axis];
            const double hi = box->upper[axis];
            const double width = (hi - lo) / M;
            if (!(width > 1e-12 * (hi - lo))) throw RangeError("warm_start: sub-body is numerically empty");
            w.q = w.direction[axis] > 0.0 ? lo + width : -(hi - width);
            w.exact = true;
            return w;
        }
    }
    if (static_cast<double>(n_pilot) / M < static_cast<double>(kMinWarmPilotHits)) {
        throw RangeError("warm_start: sub-body of measure 1/M is too small to locate with the pilot sample");
    }
    std::vector<double> proj(n_pilot);
    for (auto& p : proj) p = w.direction.dot(uniform_in_body(*body, rng));
    w.q = stats::order_statistic_quantile(std::move(proj), 1.0 / M);
    return w;
}

//---------------------------------------------------------------------------//
// Conductance
//---------------------------------------------------------------------------//

SConductance s_conductance(const ChainConfig& chain, const Target& target, const PartitionSpec& partition, double s,
                           std::size_t n_samples, Rng& rng) {
    chain.validate();
    partition.validate(target.dim());
    if (!(s >= 0.0 && s < 0.5)) throw UsageError("s_conductance: s must lie in [0, 1/2)");
    if (n_samples < 2) throw UsageError("s_conductance: need at least two samples");

    SConductance out;
    out.approximate = target.dim() > kExactSampleMaxDim;
    Vector x = target.body().center();
    const std::size_t thin = static_cast<std::size_t>(target.dim());
    if (out.approximate) {
        const std::size_t burn = 10 * thin * thin;
        for (std::size_t k = 0; k < burn; ++k) x = hit_and_run_step(x, target, rng).x;
    }

    std::vector<double> f(n_samples), g(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        if (out.approximate) {
            for (std::size_t j = 0; j < thin; ++j) x = hit_and_run_step(x, target, rng).x;
        } else {
            x = exact_sample(target, rng);
        }
        const bool in1 = partition.in_s1(x);
        g[k] = in1 ? 1.0 : 0.0;
        f[k] = 0.0;
        if (in1) {
            const Vector y = chain_step(chain, target, x, rng).x;
            if (!partition.in_s1(y)) f[k] = 1.0;
        }
    }
    const double nn = static_cast<double>(n_samples);
    const double num = stats::mean(f);
    const double p = stats::mean(g);
    out.nu_s1 = p;
    out.numerator = num;
    out.numerator_se = stats::standard_error(f);
    if (!(p > s && p < 1.0 - s)) {
        throw PreconditionError("s_conductance: estimated nu(S1) = " + std::to_string(p) + " is outside (s, 1 - s)");
    }
    const double den = std::min(p, 1.0 - p) - s;
    const double sign = p < 0.5 ? 1.0 : -1.0;
    out.phi = num / den;

    double cov = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) cov += (f[k] - num) * (g[k] - p);
    cov /= nn - 1.0;
    const double var_f = stats::variance(f);
    const double var_g = stats::variance(g);
    const double var = (var_f / (den * den) + num * num * var_g / std::pow(den, 4) -
                        2.0 * sign * num * cov / std::pow(den, 3)) /
                       nn;
    out.se = std::sqrt(std::max(var, 0.0));
    return out;
}

Estimate escape_flux(const ChainConfig& chain, const Target& target, const PartitionSpec& partition,
                     const PointList& xs, Rng& rng) {
    partition.validate(target.dim());
    if (xs.empty()) throw UsageError("escape_flux: no points");
    std::size_t hits = 0;
    for (const auto& x : xs) {
        if (!partition.in_s1(x)) continue;
        if (!partition.in_s1(chain_step(chain, target, x, rng).x)) ++hits;
    }
    return proportion(hits, xs.size());
}

double ls_bound(double M, double s, double phi_s, double N) {
    if (!(M >= 1.0)) throw UsageError("ls_bound: M must be >= 1");
    if (!(s > 0.0 && s < 0.5)) throw UsageError("ls_bound: s must lie in (0, 1/2)");
    if (!(phi_s > 0.0 && phi_s <= 1.0)) throw UsageError("ls_bound: phi_s must lie in (0, 1]");
    if (!(N >= 0.0)) throw UsageError("ls_bound: N must be nonnegative");
    return M * s + M * std::exp(N * std::log1p(-0.5 * phi_s * phi_s));
}

//---------------------------------------------------------------------------//
// Step size and overlap
//---------------------------------------------------------------------------//

Estimate estimate_F_u(const Target& target, const Vector& u, std::size_t n_samples, Rng& rng,
                      std::size_t n_bootstrap) {
    if (n_samples < 8) throw UsageError("estimate_F_u: need at least 8 samples");
    if (!target.body().contains(u)) throw DomainError("estimate_F_u: u is outside the body");
    std::vector<double> d(n_samples);
    for (auto& v : d) v = (hit_and_run_step(u, target, rng).x - u).norm();

    Estimate e;
    e.n = n_samples;
    e.value = stats::order_statistic_quantile(d, 0.125);
    if (n_bootstrap >= 2) {
        std::vector<double> boot(n_bootstrap);
        std::vector<double> resample(n_samples);
        for (auto& b : boot) {
            for (auto& r : resample) r = d[rng.below(n_samples)];
            b = stats::order_statistic_quantile(resample, 0.125);
        }
        e.se = std::sqrt(stats::variance(boot));
    }
    return e;
}

double F_u_lower_bound(double r, int n) {
    if (!(r > 0.0) || n < 1) throw UsageError("F_u_lower_bound: need r > 0 and n >= 1");
    return std::min(2.0 * r, 1.0 / (8.0 * std::sqrt(static_cast<double>(n)))) / 128.0;
}

OverlapTv kernel_overlap_tv(const Target& target, const Vector& u, const Vector& v, std::size_t n_samples, int grid,
                            Rng& rng) {
    const int n = target.dim();
    if (n != 2 && n != 3) throw UsageError("kernel_overlap_tv: supports n = 2 or 3 only");
    if (!target.body().contains(u) || !target.body().contains(v)) {
        throw DomainError("kernel_overlap_tv: u and v must lie in the body");
    }
    OverlapTv out;
    if (u == v) return out;

    if (grid > 0) {
        const auto qu = kernel_cell_masses(u, target, grid);
        const auto qv = kernel_cell_masses(v, target, grid);
        double acc = 0.0;
        for (std::size_t i = 0; i < qu.size(); ++i) acc += std::abs(qu[i] - qv[i]);
        out.grid_tv = 0.5 * acc;
    }
    if (n_samples > 0) {
        std::vector<double> terms(n_samples);
        for (auto& term : terms) {
            const Vector y = hit_and_run_step(u, target, rng).x;
            const double pu = transition_density(u, y, target);
            const double pv = y == v ? 0.0 : transition_density(v, y, target);
            term = pu > 0.0 ? std::max(0.0, 1.0 - pv / pu) : 0.0;
        }
        out.mc_tv = stats::mean(terms);
        out.mc_se = stats::standard_error(terms);
    }
    return out;
}

//---------------------------------------------------------------------------//
// Mixing curve
//---------------------------------------------------------------------------//

bool MixingReport::non_increasing(double k) const {
    for (std::size_t i = 1; i < tv.size(); ++i) {
        if (tv[i] > tv[i - 1] + k * std::hypot(se[i], se[i - 1])) return false;
    }
    return true;
}

MixingReport mixing_curve(const ChainConfig& chain, const Target& target, const InitSampler& init,
                          std::span<const std::size_t> checkpoints, std::size_t n_replicas, Rng& rng, double epsilon,
                          int n_bins, unsigned threads, std::size_t n_bootstrap) {
    chain.validate();
    if (checkpoints.empty()) throw UsageError("mixing_curve: no checkpoints");
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
        if (checkpoints[i] <= checkpoints[i - 1]) throw UsageError("mixing_curve: checkpoints must increase strictly");
    }
    if (n_replicas < kMinTvSamples) throw UsageError("mixing_curve: need at least 1000 replicas");
    const auto marginals = target_marginals(target);

    const std::uint64_t base = rng.next_u64();
    std::vector<PointList> states(checkpoints.size(), PointList(n_replicas));
    parallel_for(n_replicas, threads, [&](std::size_t i) {
        Rng r = Rng::derive(base, i, "replica");
        Vector x = init(r);
        std::size_t step = 0;
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (; step < checkpoints[c]; ++step) x = chain_step(chain, target, x, r).x;
            states[c][i] = x;
        }
    });

    MixingReport report;
    report.epsilon = epsilon;
    Rng boot_rng = rng.split(0, "bootstrap");
    PointList resample(n_replicas);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const TvReport tv = tv_marginal(states[c], marginals, n_bins);
        report.steps.push_back(checkpoints[c]);
        report.tv.push_back(tv.tv);
        report.noise_floor.push_back(tv.noise_floor);
        std::vector<double> boot(n_bootstrap);
        for (auto& b : boot) {
            for (auto& x : resample) x = states[c][boot_rng.below(n_replicas)];
            b = marginal_tv_max(resample, marginals, n_bins);
        }
        report.se.push_back(n_bootstrap >= 2 ? std::sqrt(stats::variance(boot)) : 0.0);
        if (!report.mixing_step && tv.tv <= epsilon) report.mixing_step = checkpoints[c];
    }
    return report;
}

//---------------------------------------------------------------------------//
// K_r
//---------------------------------------------------------------------------//

Estimate K_r_mass(const ConvexBody& body, double r, std::size_t n_samples, Rng& rng, std::size_t n_lambda) {
    if (!(r > 0.0)) throw UsageError("K_r_mass: r must be positive");
    if (n_samples == 0) throw UsageError("K_r_mass: n_samples must be positive");
    if (body.inscribed_radius() < 1.0 - 1e-12) {
        throw PreconditionError("K_r_mass: body must contain a unit ball");
    }
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Vector u = uniform_in_body(body, rng);
        if (in_K_r(body, u, r, n_lambda, rng).verdict == KrMembership::in) ++hits;
    }
    return proportion(hits, n_samples);
}

double K_r_mass_lower_bound(double r, int n) { return 1.0 - 2.0 * std::sqrt(static_cast<double>(n)) * r; }

}  // namespace hitrun
