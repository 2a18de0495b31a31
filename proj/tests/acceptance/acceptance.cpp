// Quantitative acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hitrun/chains.hpp"
#include "hitrun/diagnostics.hpp"
#include "hitrun/geometry.hpp"
#include "hitrun/localization.hpp"
#include "hitrun/logconcave1d.hpp"
#include "hitrun/stats.hpp"
#include "hitrun/targets.hpp"

using namespace hitrun;

namespace {

constexpr std::uint64_t kSeed = 0x5eed2024;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome(Rng&)> run;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::shared_ptr<const ConvexBody> share(ConvexBody b) { return std::make_shared<const ConvexBody>(std::move(b)); }

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

//---------------------------------------------------------------------------//

Outcome kernel_correctness(Rng& rng) {
    auto disc = share(ConvexBody::ball(Vector::Zero(2), 1.0));
    const Target uniform = Target::uniform(disc);
    const Target gauss = Target::truncated_gaussian(disc, Vector::Zero(2), 4.0);
    struct Case {
        const char* label;
        const Target* target;
        Vector u;
        double bound;
    };
    const std::vector<Case> cases = {
        {"uniform u=0", &uniform, vec({0.0, 0.0}), 0.02},
        {"uniform u=(0.3,0)", &uniform, vec({0.3, 0.0}), 0.03},
        {"nu_{0,4} u=(0.3,0)", &gauss, vec({0.3, 0.0}), 0.03},
    };
    Outcome o{true, ""};
    for (const auto& c : cases) {
        const KernelTv r = empirical_kernel_tv(c.u, *c.target, 1'000'000, 50, rng);
        const bool ok = r.tv <= c.bound;
        o.pass = o.pass && ok;
        o.detail += std::string(c.label) + ": tv=" + fmt(r.tv) + " (noise " + fmt(r.expected_noise) + ", bound " +
                    fmt(c.bound) + ")" + (ok ? "" : " FAIL") + "; ";
    }
    return o;
}

Outcome covariance_bound(Rng& rng) {
    auto box = share(ConvexBody::cube(4, 1.0));
    Outcome o{true, ""};
    for (double t : {1.0, 4.0, 16.0}) {
        const Target target = Target::truncated_gaussian(box, Vector::Zero(4), t);
        ChainConfig cfg;
        Vector x = Vector::Zero(4);
        for (int k = 0; k < 1000; ++k) x = hit_and_run_step(x, target, rng).x;
        const ChainRun run = run_chain(cfg, target, x, 500'000, 5, rng);
        const PointList samples(run.samples.begin() + 1, run.samples.end());
        const Estimate top = stats::top_covariance_eigenvalue(samples);
        const double bound = 1.0 / t + 5.0 * top.se;
        const bool ok = top.value <= bound;
        o.pass = o.pass && ok;
        o.detail += "t=" + fmt(t) + ": lambda_max=" + fmt(top.value) + " <= " + fmt(bound) + (ok ? "" : " FAIL") + "; ";
    }
    return o;
}

Outcome sl_martingale(Rng& rng) {
    auto box = share(ConvexBody::cube(4, 1.0));
    const Target base = Target::uniform(box);
    const std::vector<double> checkpoints = {1.0, 2.0, 4.0};
    const std::size_t n_paths = 200;
    std::vector<std::vector<double>> values(checkpoints.size(), std::vector<double>(n_paths));
    InnerSampler inner;
    for (std::size_t p = 0; p < n_paths; ++p) {
        Rng r = Rng::derive(rng.next_u64(), p, "sl-path");
        std::size_t c = 0;
        run_sl_path(base, inner, 1.0 / 64.0, checkpoints, r, [&](SLState& s, Rng& rr) {
            const PointList xs = sample_mu_t(s, box, rr);
            double hits = 0.0;
            for (const auto& x : xs) hits += x[0] > 0.0 ? 1.0 : 0.0;
            values[c++][p] = hits / static_cast<double>(xs.size());
        });
    }
    Outcome o{true, ""};
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const double m = stats::mean(values[c]);
        const double se = stats::standard_error(values[c]);
        const bool ok = std::abs(m - 0.5) <= 3.0 * se;
        o.pass = o.pass && ok;
        o.detail += "t=" + fmt(checkpoints[c]) + ": mean=" + fmt(m) + " se=" + fmt(se) + (ok ? "" : " FAIL") + "; ";
    }
    return o;
}

Outcome cT_law(Rng& rng) {
    auto box = share(ConvexBody::cube(4, 1.0));
    const Target base = Target::uniform(box);
    const double T = 4.0;
    const std::size_t n_paths = 10'000;
    const std::vector<double> checkpoints = {T};
    PointList sde(n_paths), direct(n_paths);
    InnerSampler inner;
    const std::uint64_t sde_seed = rng.next_u64();
    for (std::size_t p = 0; p < n_paths; ++p) {
        Rng r = Rng::derive(sde_seed, p, "sl-path");
        run_sl_path(base, inner, 1.0 / 64.0, checkpoints, r, [&](SLState& s, Rng&) { sde[p] = s.c / s.t; });
    }
    for (auto& x : direct) x = direct_cT_sample(*box, T, rng);
    const stats::EnergyTest e = stats::energy_test(sde, direct, 99, rng);
    Outcome o;
    o.pass = e.p_value > 0.01;
    o.detail = "energy statistic=" + fmt(e.statistic) + " p=" + fmt(e.p_value) + " (reject if <= 0.01)";
    return o;
}

Outcome shell_concentration(Rng& rng) {
    const int n = 64;
    const ConvexBody box = ConvexBody::isotropic_cube(n);
    const double threshold = 1.0 - std::exp(-2.0) - 0.02;
    int good = 0;
    double worst = 1.0;
    double worst_exact_gap = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vector beta = direct_cT_sample(box, n, rng);
        const ShellMass s = shell_mass(box, beta, 2000, rng);
        if (s.chain.value >= threshold) ++good;
        worst = std::min(worst, s.chain.value);
        worst_exact_gap = std::max(worst_exact_gap, std::abs(s.chain.value - s.exact.value));
    }
    Outcome o;
    o.pass = good >= 95;
    o.detail = std::to_string(good) + "/100 draws >= " + fmt(threshold) + " (min " + fmt(worst) +
               ", max |chain - exact| " + fmt(worst_exact_gap) + ")";
    return o;
}

Outcome F_u_bound(Rng& rng) {
    Outcome o{true, ""};
    for (int n : {4, 16}) {
        auto box = share(ConvexBody::isotropic_cube(n));
        const double r = 1.0 / (32.0 * std::sqrt(static_cast<double>(n)));
        const double bound = F_u_lower_bound(r, n);
        int tested = 0;
        int passed = 0;
        double min_ratio = std::numeric_limits<double>::infinity();
        while (tested < 50) {
            const Vector beta = direct_cT_sample(*box, n, rng);
            const Target target = Target::truncated_gaussian(box, beta, n);
            const Vector u = exact_sample(target, rng);
            if ((u - beta).norm() > std::sqrt(2.0)) continue;
            if (in_K_r(*box, u, r, 4000, rng).verdict != KrMembership::in) continue;
            ++tested;
            const Estimate f = estimate_F_u(target, u, 4000, rng, 0);
            if (f.value >= bound) ++passed;
            min_ratio = std::min(min_ratio, f.value / bound);
        }
        const bool ok = passed == tested;
        o.pass = o.pass && ok;
        o.detail += "n=" + std::to_string(n) + ": " + std::to_string(passed) + "/" + std::to_string(tested) +
                    " above bound " + fmt(bound) + " (min ratio " + fmt(min_ratio) + "); ";
    }
    return o;
}

Outcome K_r_size(Rng& rng) {
    const ConvexBody box = ConvexBody::isotropic_cube(2);
    const double r = 0.05;
    const Estimate m = K_r_mass(box, r, 4000, rng);
    const double bound = K_r_mass_lower_bound(r, 2) - 3.0 * m.se;
    Outcome o;
    o.pass = m.value >= bound;
    o.detail = "mass=" + fmt(m.value) + " se=" + fmt(m.se) + " >= " + fmt(bound);
    return o;
}

Outcome logconcave_suite(Rng&) {
    std::vector<double> t_grid;
    for (int k = 0; k <= 40; ++k) t_grid.push_back(0.25 * k);
    int checks = 0;
    int failed = 0;
    std::string failures;
    auto tally = [&](const std::string& density, const lc1d::CheckResult& r) {
        ++checks;
        if (!r.pass) {
            ++failed;
            failures += density + "/" + r.check + " ";
        }
    };
    for (const auto& d : lc1d::standard_library()) {
        tally(d.name(), lc1d::check_max_density(d));
        tally(d.name(), lc1d::check_density_at_zero(d));
        tally(d.name(), lc1d::check_tail(d, t_grid));
        tally(d.name(), lc1d::cheeger_1d(d));
        for (double delta : {0.05, 0.1, 0.3}) {
            const auto q = lc1d::check_quantile_density(d, delta);
            tally(d.name(), q.density);
            tally(d.name(), q.derivative);
        }
    }
    Outcome o;
    o.pass = failed == 0;
    o.detail = std::to_string(checks - failed) + "/" + std::to_string(checks) + " checks pass" +
               (failures.empty() ? "" : " (failed: " + failures + ")");
    return o;
}

Outcome lipschitz_1d(Rng& rng) {
    struct Config {
        const char* label;
        Grid1D omega0;
        double alpha;
        double sigma2;
    };
    const std::size_t cells = 4096;
    const std::vector<Config> configs = {
        {"uniform, alpha sigma2=1", Grid1D::isotropic_uniform(cells), 1.0, 1.0},
        {"gaussian, alpha sigma2=4", Grid1D::standard_normal(cells), 4.0, 1.0},
        {"laplace, alpha sigma2=16", Grid1D::from_density([](double z) { return std::exp(-std::sqrt(2.0) * std::abs(z)); },
                                                          -20.0, 20.0, cells),
         8.0, 2.0},
    };
    Outcome o{true, ""};
    for (const auto& c : configs) {
        const double tau = c.alpha * c.sigma2;
        std::vector<std::pair<double, double>> pairs;
        for (int k = 0; k < 1000; ++k) {
            const double y = sample_rho(c.omega0, c.alpha, c.sigma2, rng);
            // Mix close pairs (derivative scale) with distant ones.
            const double gap = std::pow(10.0, -3.0 + 3.5 * rng.uniform()) / std::sqrt(tau);
            pairs.emplace_back(y, y + (rng.coin() ? gap : -gap));
        }
        const auto h = right_half_indicator(c.omega0);
        const LipschitzReport r = lipschitz_check_1d(c.omega0, c.alpha, c.sigma2, h, pairs);
        const bool ok = r.max_ratio <= r.bound * 1.02;
        o.pass = o.pass && ok;
        o.detail += std::string(c.label) + ": max ratio=" + fmt(r.max_ratio) + " <= " + fmt(1.02 * r.bound) +
                    (ok ? "" : " FAIL") + "; ";
    }
    return o;
}

Outcome dirichlet_supermartingale(Rng& rng) {
    auto box = share(ConvexBody::cube(4, 1.0));
    const Target base = Target::uniform(box);
    const std::vector<double> checkpoints = {0.0, 1.0, 2.0, 4.0};
    const std::size_t n_paths = 100;
    const PartitionSpec S = PartitionSpec::coordinate(4, 0, 0.0);
    ChainConfig step;
    InnerSampler inner;
    std::vector<std::vector<double>> values(checkpoints.size(), std::vector<double>(n_paths));
    for (std::size_t p = 0; p < n_paths; ++p) {
        Rng r = Rng::derive(rng.next_u64(), p, "sl-path");
        std::size_t c = 0;
        run_sl_path(base, inner, 1.0 / 64.0, checkpoints, r, [&](SLState& s, Rng& rr) {
            SLState probe = s;
            probe.inner.budget = 4000;
            const PointList xs = sample_mu_t(probe, box, rr);
            values[c++][p] = escape_flux(step, s.measure(box), S, xs, rr).value;
        });
    }
    Outcome o{true, ""};
    std::vector<double> m(checkpoints.size()), se(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        m[c] = stats::mean(values[c]);
        se[c] = stats::standard_error(values[c]);
        o.detail += "t=" + fmt(checkpoints[c]) + ": E=" + fmt(m[c]) + "+-" + fmt(se[c]) + "; ";
        if (c > 0 && m[c] > m[c - 1] + 3.0 * std::hypot(se[c], se[c - 1])) {
            o.pass = false;
            o.detail += "increase FAIL; ";
        }
    }
    return o;
}

Outcome mixing_sanity(Rng& rng) {
    std::vector<std::size_t> checkpoints = {0};
    for (std::size_t s = 1; s <= 2048; s *= 2) checkpoints.push_back(s);
    ChainConfig cfg;
    cfg.lazy = true;
    std::vector<double> log_n, log_steps;
    Outcome o{true, ""};
    for (int n : {2, 4, 8}) {
        auto box = share(ConvexBody::isotropic_cube(n));
        const Target target = Target::uniform(box);
        const WarmStart warm = warm_start(box, 2.0, rng);
        const MixingReport rep = mixing_curve(
            cfg, target, [&](Rng& r) { return warm.sample(r); }, checkpoints, 4000, rng, 0.1);
        const bool monotone = rep.non_increasing(3.0);
        o.pass = o.pass && monotone && rep.mixing_step.has_value();
        o.detail += "n=" + std::to_string(n) + ": tv0=" + fmt(rep.tv.front()) + " mix step=" +
                    (rep.mixing_step ? std::to_string(*rep.mixing_step) : std::string("none")) +
                    (monotone ? "" : " non-monotone FAIL") + "; ";
        if (rep.mixing_step) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_steps.push_back(std::log(static_cast<double>(std::max<std::size_t>(*rep.mixing_step, 1))));
        }
    }
    if (log_n.size() == 3) {
        const double slope = stats::ols_slope(log_n, log_steps);
        o.pass = o.pass && slope < 4.0;
        o.detail += "log-log slope=" + fmt(slope) + " (< 4)";
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "kernel correctness (one-step TV, disc)", kernel_correctness},
        {2, "Brascamp-Lieb covariance bound", covariance_bound},
        {3, "SL martingale mu_t(E)", sl_martingale},
        {4, "law of c_T / T (energy test)", cT_law},
        {5, "shell concentration n=64", shell_concentration},
        {6, "F_u lower bound", F_u_bound},
        {7, "K_r mass", K_r_size},
        {8, "1-D logconcave lemma suite", logconcave_suite},
        {9, "1-D Lipschitz bound", lipschitz_1d},
        {10, "Dirichlet form super-martingale", dirichlet_supermartingale},
        {11, "mixing sanity (lazy hit-and-run, 2-warm)", mixing_sanity},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        Rng rng = Rng::derive(kSeed, static_cast<std::uint64_t>(c.id), "acceptance");
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(rng);
        } catch (const std::exception& e) {
            o = Outcome{false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("[%s] %2d %s | %s| %.1f s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
