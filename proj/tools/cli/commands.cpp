#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hitrun/chains.hpp"
#include "hitrun/diagnostics.hpp"
#include "hitrun/errors.hpp"
#include "hitrun/localization.hpp"
#include "hitrun/logconcave1d.hpp"
#include "hitrun/parallel.hpp"
#include "hitrun/stats.hpp"

namespace hitrun::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string streams_note(const ExperimentConfig& c, const std::string& labels) {
    return fmt::format("seed={}; streams: Rng::derive(seed, index, label) with labels {}", c.seed, labels);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Every command records the configuration it actually ran with.
void write_resolved(const fs::path& out, const ExperimentConfig& c) { write_json(out / "resolved_config.json", to_json(c)); }

std::shared_ptr<const ConvexBody> make_body(const ExperimentConfig& c) {
    return std::make_shared<const ConvexBody>(build_body(c.body));
}

Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string coord_header(const char* prefix, int n) {
    std::string h;
    for (int i = 0; i < n; ++i) h += fmt::format(",{}_{}", prefix, i);
    return h;
}

std::string coords(const Vector& x) {
    std::string s;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += "," + num(x[i]);
    return s;
}

Grid1D one_d_grid(const OneDSection& s) {
    if (s.density == "uniform") return Grid1D::isotropic_uniform(s.cells);
    if (s.density == "gaussian") return Grid1D::standard_normal(s.cells);
    return Grid1D::from_density([](double z) { return std::exp(-std::sqrt(2.0) * std::abs(z)); }, -20.0, 20.0,
                                s.cells);
}

json null_if_nan(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

//---------------------------------------------------------------------------//

int cmd_sample(const ExperimentConfig& c, const fs::path& out) {
    auto body = make_body(c);
    const Target target = build_target(c, body);
    const Vector init = c.sample.init.empty() ? body->center() : to_vector(c.sample.init);
    Rng rng = Rng::derive(c.seed, 0, "sample");
    const ChainRun run = run_chain(build_chain(c.chain), target, init, c.sample.n_steps, c.sample.thin, rng);

    std::string csv = "# hitrun sample; " + streams_note(c, "\"sample\" (index 0)") + "\n";
    csv += "step" + coord_header("x", body->dim()) + ",moved\n";
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
        csv += fmt::format("{}{},{}\n", run.steps[i], coords(run.samples[i]), static_cast<int>(run.moved[i]));
    }
    write_text(out / "trace.csv", csv);

    const json summary = {{"command", "sample"},
                          {"seed", c.seed},
                          {"n_steps", run.n_steps},
                          {"n_moves", run.n_moves},
                          {"acceptance", run.acceptance_rate()},
                          {"degenerate_chords", run.degenerate_chords},
                          {"streams", streams_note(c, "\"sample\" (index 0)")},
                          {"resolved_config", to_json(c)}};
    write_json(out / "summary.json", summary);
    write_resolved(out, c);
    return 0;
}

//---------------------------------------------------------------------------//

namespace {

struct Entry {
    std::string check;
    std::string anchor;
    double value = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    std::string relation = "<=";
    std::string detail;
    bool skipped = false;
    bool pass = false;
};

Entry entry(std::string check, std::string anchor, std::string relation = "<=") {
    Entry e;
    e.check = std::move(check);
    e.anchor = std::move(anchor);
    e.relation = std::move(relation);
    return e;
}

void settle(Entry& e, const VerifySection& v) {
    if (auto it = v.bounds.find(e.check); it != v.bounds.end()) e.bound = it->second;
    if (e.skipped) {
        e.pass = true;
        return;
    }
    e.pass = e.relation == "<=" ? e.value <= e.bound : e.value >= e.bound;
}

Entry verify_kernel_tv(const ExperimentConfig& c, const Target& target, Rng& rng) {
    Entry e = entry("kernel_tv", "hit-and-run one-step transition kernel");
    const int n = target.dim();
    if ((n != 2 && n != 3) || !target.body().has_bounding_box()) {
        e.skipped = true;
        e.detail = "kernel quadrature needs a bounded body in dimension 2 or 3";
        return e;
    }
    const KernelTv r = empirical_kernel_tv(target.body().center(), target, c.verify.kernel_samples,
                                           c.verify.kernel_grid, rng);
    e.value = r.tv;
    e.bound = r.expected_noise + 0.01;
    e.detail = fmt::format("one-step histogram vs quadrature from the body center; noise floor {}",
                           num(r.expected_noise));
    return e;
}

Entry verify_covariance(const ExperimentConfig& c, const std::shared_ptr<const ConvexBody>& body, Rng& rng) {
    Entry e = entry("covariance_bl", "Brascamp-Lieb covariance bound");
    const double m = c.verify.cov_m;
    const Target target = Target::truncated_gaussian(body, body->center(), m);
    Vector x = body->center();
    for (int k = 0; k < 1000; ++k) x = hit_and_run_step(x, target, rng).x;
    const ChainRun run = run_chain(ChainConfig{}, target, x, c.verify.cov_steps, 5, rng);
    const PointList samples(run.samples.begin() + 1, run.samples.end());
    const Estimate top = stats::top_covariance_eigenvalue(samples);
    e.value = top.value;
    e.bound = 1.0 / m + 5.0 * top.se;
    e.detail = fmt::format("top covariance eigenvalue of nu_(center, {}) vs 1/m + 5 SE (SE {})", num(m), num(top.se));
    return e;
}

Entry verify_sl_martingale(const ExperimentConfig& c, const std::shared_ptr<const ConvexBody>& body, Rng& rng) {
    Entry e = entry("sl_martingale", "martingale property of mu_t(E)");
    const Target base = Target::uniform(body);
    const double T = c.verify.sl_T;
    const double h = default_sl_step(T);
    const std::vector<double> checkpoints = {T};
    const double threshold = body->center()[0];
    const std::size_t n_paths = c.verify.sl_paths;
    std::vector<double> values(n_paths);
    InnerSampler inner;
    const std::uint64_t master = rng.next_u64();
    parallel_for(n_paths, c.threads, [&](std::size_t p) {
        Rng r = Rng::derive(master, p, "sl-path");
        run_sl_path(base, inner, h, checkpoints, r, [&](SLState& s, Rng& rr) {
            const PointList xs = sample_mu_t(s, body, rr);
            double hits = 0.0;
            for (const auto& x : xs) hits += x[0] > threshold ? 1.0 : 0.0;
            values[p] = hits / static_cast<double>(xs.size());
        });
    });
    std::size_t ref_hits = 0;
    const std::size_t n_ref = 20'000;
    for (std::size_t i = 0; i < n_ref; ++i) ref_hits += uniform_in_body(*body, rng)[0] > threshold ? 1 : 0;
    const Estimate ref = proportion(ref_hits, n_ref);
    const double mean = stats::mean(values);
    const double se = stats::standard_error(values);
    e.value = std::abs(mean - ref.value);
    e.bound = 3.0 * std::hypot(se, ref.se);
    e.detail = fmt::format("E = {{x_0 > {}}}; mean mu_T(E) {} vs nu(E) {} at T = {}", num(threshold), num(mean),
                           num(ref.value), num(T));
    return e;
}

Entry verify_cT_law(const ExperimentConfig& c, const std::shared_ptr<const ConvexBody>& body, Rng& rng) {
    Entry e = entry("cT_law", "law of c_T / T", ">=");
    e.bound = 0.01;
    const Target base = Target::uniform(body);
    const double T = c.verify.sl_T;
    const double h = default_sl_step(T);
    const std::vector<double> checkpoints = {T};
    const std::size_t n_paths = c.verify.ct_paths;
    PointList sde(n_paths), direct(n_paths);
    InnerSampler inner;
    const std::uint64_t master = rng.next_u64();
    parallel_for(n_paths, c.threads, [&](std::size_t p) {
        Rng r = Rng::derive(master, p, "sl-path");
        run_sl_path(base, inner, h, checkpoints, r, [&](SLState& s, Rng&) { sde[p] = s.c / s.t; });
    });
    for (auto& x : direct) x = direct_cT_sample(*body, T, rng);
    const stats::EnergyTest t = stats::energy_test(sde, direct, 99, rng);
    e.value = t.p_value;
    e.detail = fmt::format("energy test, {} SDE paths vs direct draws, statistic {}", n_paths, num(t.statistic));
    return e;
}

Entry verify_F_u(const ExperimentConfig& c, const std::shared_ptr<const ConvexBody>& body, Rng& rng) {
    Entry e = entry("F_u_bound", "step-size lower bound F_u", ">=");
    const int n = body->dim();
    const double r = 1.0 / (32.0 * std::sqrt(static_cast<double>(n)));
    e.bound = F_u_lower_bound(r, n);
    double worst = std::numeric_limits<double>::infinity();
    std::size_t tested = 0;
    std::size_t tries = 0;
    while (tested < c.verify.f_u_points) {
        if (++tries > 100'000) throw EfficiencyError("verify F_u_bound: no admissible points found in K_r");
        const Vector beta = direct_cT_sample(*body, n, rng);
        const Target target = Target::truncated_gaussian(body, beta, n);
        const Vector u = exact_sample(target, rng);
        if ((u - beta).norm() > std::sqrt(2.0)) continue;
        if (in_K_r(*body, u, r, 4000, rng).verdict != KrMembership::in) continue;
        ++tested;
        worst = std::min(worst, estimate_F_u(target, u, c.verify.f_u_samples, rng, 0).value);
    }
    e.value = worst;
    e.detail = fmt::format("minimum over {} points u in K_r with |u - beta| <= sqrt 2, r = {}", tested, num(r));
    return e;
}

Entry verify_K_r(const ExperimentConfig& c, const std::shared_ptr<const ConvexBody>& body, Rng& rng) {
    Entry e = entry("K_r_mass", "mass of K_r", ">=");
    const double r = c.verify.k_r_radius;
    try {
        const Estimate m = K_r_mass(*body, r, c.verify.k_r_samples, rng);
        e.value = m.value;
        e.bound = K_r_mass_lower_bound(r, body->dim()) - 3.0 * m.se;
        e.detail = fmt::format("r = {}, bound 1 - 2 sqrt(n) r less 3 SE (SE {})", num(r), num(m.se));
    } catch (const PreconditionError& err) {
        e.skipped = true;
        e.detail = err.what();
    }
    return e;
}

std::vector<double> tail_grid(const LogconcaveSection& l) {
    std::vector<double> t;
    for (int k = 0; k * l.t_step <= l.t_max + 1e-12; ++k) t.push_back(k * l.t_step);
    return t;
}

struct LcRow {
    std::string density;
    lc1d::CheckResult result;
    std::string relation;
    std::optional<double> delta;
};

std::vector<LcRow> logconcave_rows(const LogconcaveSection& l) {
    const auto t_grid = tail_grid(l);
    std::vector<LcRow> rows;
    for (const auto& d : lc1d::standard_library()) {
        const std::string name = d.name();
        rows.push_back({name, lc1d::check_max_density(d), "<=", std::nullopt});
        rows.push_back({name, lc1d::check_density_at_zero(d), ">=", std::nullopt});
        rows.push_back({name, lc1d::check_tail(d, t_grid), "<=", std::nullopt});
        rows.push_back({name, lc1d::cheeger_1d(d), ">=", std::nullopt});
        for (double delta : l.deltas) {
            const auto q = lc1d::check_quantile_density(d, delta);
            rows.push_back({name, q.density, ">=", delta});
            rows.push_back({name, q.derivative, "<=", delta});
        }
    }
    return rows;
}

Entry verify_logconcave(const ExperimentConfig& c) {
    Entry e = entry("logconcave_suite", "isotropic one-dimensional logconcave lemmas");
    const auto rows = logconcave_rows(c.logconcave);
    std::size_t failed = 0;
    std::string names;
    for (const auto& r : rows) {
        if (!r.result.pass) {
            ++failed;
            names += " " + r.density + "/" + r.result.check;
        }
    }
    e.value = static_cast<double>(failed);
    e.bound = 0.0;
    e.detail = fmt::format("{} failing of {} checks{}", failed, rows.size(), names);
    return e;
}

Entry verify_lipschitz(const ExperimentConfig& c, Rng& rng) {
    Entry e = entry("lipschitz_1d", "Lipschitz bound for the one-dimensional tilt");
    const Grid1D omega0 = Grid1D::isotropic_uniform(c.verify.grid_cells);
    const double alpha = 1.0;
    const double sigma2 = 1.0;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t k = 0; k < c.verify.lipschitz_pairs; ++k) {
        const double y = sample_rho(omega0, alpha, sigma2, rng);
        const double gap = std::pow(10.0, -3.0 + 3.5 * rng.uniform());
        pairs.emplace_back(y, y + (rng.coin() ? gap : -gap));
    }
    const LipschitzReport r = lipschitz_check_1d(omega0, alpha, sigma2, right_half_indicator(omega0), pairs);
    e.value = r.max_ratio;
    e.bound = 1.02 * r.bound;
    e.detail = fmt::format("uniform start, alpha sigma2 = 1, {} pairs", pairs.size());
    return e;
}

}  // namespace

int cmd_verify(const ExperimentConfig& c, const fs::path& out) {
    auto body = make_body(c);
    const Target target = build_target(c, body);
    const auto& ids = verify_check_ids();
    std::vector<std::function<Entry(Rng&)>> checks = {
        [&](Rng& r) { return verify_kernel_tv(c, target, r); },
        [&](Rng& r) { return verify_covariance(c, body, r); },
        [&](Rng& r) { return verify_sl_martingale(c, body, r); },
        [&](Rng& r) { return verify_cT_law(c, body, r); },
        [&](Rng& r) { return verify_F_u(c, body, r); },
        [&](Rng& r) { return verify_K_r(c, body, r); },
        [&](Rng&) { return verify_logconcave(c); },
        [&](Rng& r) { return verify_lipschitz(c, r); },
    };
    json entries = json::array();
    std::vector<std::string> failing;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Rng rng = Rng::derive(c.seed, i, "verify");
        Entry e = checks[i](rng);
        if (e.check != ids[i]) throw Error("verify: check order does not match the id table");
        settle(e, c.verify);
        if (!e.pass) failing.push_back(e.check);
        entries.push_back({{"check", e.check},
                           {"anchor", e.anchor},
                           {"value", null_if_nan(e.value)},
                           {"bound", null_if_nan(e.bound)},
                           {"relation", e.relation},
                           {"pass", e.pass},
                           {"skipped", e.skipped},
                           {"detail", e.detail}});
    }
    const json report = {{"command", "verify"},
                         {"seed", c.seed},
                         {"all_pass", failing.empty()},
                         {"failing", failing},
                         {"entries", entries},
                         {"streams", streams_note(c, "\"verify\" (index = check position)")},
                         {"resolved_config", to_json(c)}};
    write_json(out / "report.json", report);
    write_resolved(out, c);
    if (failing.empty()) return 0;
    std::string list;
    for (const auto& f : failing) list += (list.empty() ? "" : ", ") + f;
    std::cerr << "verify: failing checks: " << list << "\n";
    return 1;
}

//---------------------------------------------------------------------------//

namespace {

int sl_body(const ExperimentConfig& c, const fs::path& out) {
    if (c.target.kind != "uniform") {
        throw UsageError("sl starts from the uniform law on the body; set target.kind to \"uniform\"");
    }
    auto body = make_body(c);
    const Target base = Target::uniform(body);
    const auto& s = c.sl;
    const double h = s.h.value_or(default_sl_step(s.T));
    const int axis = s.event_axis;
    const double threshold = s.event_threshold.value_or(body->center()[axis]);
    InnerSampler inner{build_chain(c.chain), s.inner_budget, s.inner_burn_in};

    const std::size_t n_cp = s.checkpoints.size();
    std::vector<std::string> rows(s.n_paths);
    std::vector<std::vector<double>> mu(n_cp, std::vector<double>(s.n_paths));
    parallel_for(s.n_paths, c.threads, [&](std::size_t p) {
        Rng r = Rng::derive(c.seed, p, "sl-path");
        std::size_t k = 0;
        run_sl_path(base, inner, h, s.checkpoints, r, [&](SLState& st, Rng& rr) {
            const PointList xs = sample_mu_t(st, body, rr);
            const double top = stats::top_eigenvalue(stats::sample_covariance(xs));
            double hits = 0.0;
            for (const auto& x : xs) hits += x[axis] > threshold ? 1.0 : 0.0;
            const double mu_e = hits / static_cast<double>(xs.size());
            mu[k++][p] = mu_e;
            rows[p] += fmt::format("{},{}{},{},{}\n", p, num(st.t), coords(st.c), num(top), num(mu_e));
        });
    });

    const std::string note = streams_note(c, "\"sl-path\" (index = path)");
    std::string csv = "# hitrun sl; " + note + "\n";
    csv += "path,t" + coord_header("c", body->dim()) + ",top_eigenvalue,mu_E\n";
    for (const auto& r : rows) csv += r;
    write_text(out / "sl.csv", csv);

    json per_checkpoint = json::array();
    for (std::size_t k = 0; k < n_cp; ++k) {
        per_checkpoint.push_back({{"t", s.checkpoints[k]},
                                  {"mean_mu_E", stats::mean(mu[k])},
                                  {"se", s.n_paths > 1 ? json(stats::standard_error(mu[k])) : json(nullptr)}});
    }
    const json summary = {{"command", "sl"},
                          {"mode", "body"},
                          {"seed", c.seed},
                          {"h", h},
                          {"event", fmt::format("x_{} > {}", axis, num(threshold))},
                          {"checkpoints", per_checkpoint},
                          {"streams", note},
                          {"resolved_config", to_json(c)}};
    write_json(out / "summary.json", summary);
    return 0;
}

int sl_one_d(const ExperimentConfig& c, const fs::path& out) {
    const auto& o = c.sl.one_d;
    const Grid1D omega0 = one_d_grid(o);
    Rng rng = Rng::derive(c.seed, 0, "sl-1d");
    const VarianceTrace v = variance_supermartingale_check(omega0, o.sigma2, o.alpha, o.n_paths, o.n_steps, rng);
    const std::string note = streams_note(c, "\"sl-1d\" (index 0)");
    std::string csv = "# hitrun sl one_d; " + note + "\n";
    csv += "t,mean_variance,se\n";
    for (std::size_t i = 0; i < v.t.size(); ++i) {
        csv += fmt::format("{},{},{}\n", num(v.t[i]), num(v.mean_variance[i]), num(v.se[i]));
    }
    write_text(out / "sl_1d.csv", csv);
    const json summary = {{"command", "sl"},
                          {"mode", "one_d"},
                          {"seed", c.seed},
                          {"initial_variance", omega0.variance()},
                          {"final_mean_variance", v.mean_variance.empty() ? 0.0 : v.mean_variance.back()},
                          {"streams", note},
                          {"resolved_config", to_json(c)}};
    write_json(out / "summary.json", summary);
    return 0;
}

}  // namespace

int cmd_sl(const ExperimentConfig& c, const fs::path& out) {
    const int code = c.sl.mode == "one_d" ? sl_one_d(c, out) : sl_body(c, out);
    write_resolved(out, c);
    return code;
}

//---------------------------------------------------------------------------//

int cmd_mix(const ExperimentConfig& c, const fs::path& out) {
    auto body = make_body(c);
    const Target target = build_target(c, body);
    const ChainConfig chain = build_chain(c.chain);
    const auto& m = c.mix;

    InitSampler init;
    std::shared_ptr<WarmStart> warm;
    if (m.init == "warm") {
        Rng wr = Rng::derive(c.seed, 0, "warm-start");
        warm = std::make_shared<WarmStart>(warm_start(body, m.warm_M, wr));
        init = [warm](Rng& r) { return warm->sample(r); };
    } else {
        const Vector x0 = body->center();
        init = [x0](Rng&) { return x0; };
    }
    const std::vector<std::size_t> checkpoints(m.checkpoints.begin(), m.checkpoints.end());
    Rng rng = Rng::derive(c.seed, 0, "mix");
    MixingReport rep = mixing_curve(chain, target, init, checkpoints, m.n_replicas, rng, m.epsilon, m.n_bins,
                                    c.threads, m.n_bootstrap);
    std::optional<SConductance> sc;
    if (m.conductance_samples > 0) {
        Rng cr = Rng::derive(c.seed, 0, "mix-conductance");
        sc = s_conductance(chain, target, build_partition(m.partition, *body), m.s, m.conductance_samples, cr);
        rep.phi_s = sc->phi;
    }

    const std::string note = streams_note(c, "\"warm-start\", \"mix\", \"mix-conductance\" (index 0)");
    std::string csv = "# hitrun mix; " + note + "\n";
    csv += "step,tv,se,phi_s\n";
    for (std::size_t i = 0; i < rep.steps.size(); ++i) {
        csv += fmt::format("{},{},{},{}\n", rep.steps[i], num(rep.tv[i]), num(rep.se[i]),
                           rep.phi_s ? num(*rep.phi_s) : std::string());
    }
    write_text(out / "mix.csv", csv);

    json report = {{"command", "mix"},
                   {"seed", c.seed},
                   {"steps", rep.steps},
                   {"tv", rep.tv},
                   {"se", rep.se},
                   {"noise_floor", rep.noise_floor},
                   {"epsilon", rep.epsilon},
                   {"mixing_step", rep.mixing_step ? json(*rep.mixing_step) : json(nullptr)},
                   {"non_increasing", rep.non_increasing(3.0)},
                   {"phi_s", rep.phi_s ? json(*rep.phi_s) : json(nullptr)},
                   {"phi_s_se", sc ? json(sc->se) : json(nullptr)},
                   {"dirichlet", rep.dirichlet ? json(*rep.dirichlet) : json(nullptr)},
                   {"warm_start", warm ? json{{"M", warm->M}, {"q", warm->q}, {"exact", warm->exact}} : json(nullptr)},
                   {"streams", note},
                   {"resolved_config", to_json(c)}};
    write_json(out / "mix.json", report);
    write_resolved(out, c);
    return 0;
}

//---------------------------------------------------------------------------//

int cmd_conductance(const ExperimentConfig& c, const fs::path& out) {
    auto body = make_body(c);
    const Target target = build_target(c, body);
    const auto& k = c.conductance;
    const PartitionSpec partition = build_partition(k.partition, *body);
    Rng rng = Rng::derive(c.seed, 0, "conductance");
    const SConductance sc = s_conductance(build_chain(c.chain), target, partition, k.s, k.n_samples, rng);
    const json report = {{"command", "conductance"},
                         {"seed", c.seed},
                         {"s", k.s},
                         {"phi_s", sc.phi},
                         {"se", sc.se},
                         {"nu_S1", sc.nu_s1},
                         {"escape_numerator", sc.numerator},
                         {"escape_numerator_se", sc.numerator_se},
                         {"approximate", sc.approximate},
                         {"tv_bound", {{"M", k.M}, {"N", k.N}, {"value", ls_bound(k.M, k.s, sc.phi, k.N)}}},
                         {"partition", {{"normal", std::vector<double>(partition.normal.begin(), partition.normal.end())},
                                        {"offset", partition.offset}}},
                         {"streams", streams_note(c, "\"conductance\" (index 0)")},
                         {"resolved_config", to_json(c)}};
    write_json(out / "conductance.json", report);
    write_resolved(out, c);
    return 0;
}

//---------------------------------------------------------------------------//

int cmd_logconcave(const ExperimentConfig& c, const fs::path& out) {
    const auto rows = logconcave_rows(c.logconcave);
    std::string csv = "density,check,delta,value,bound,relation,margin,at,pass\n";
    json table = json::array();
    bool all = true;
    for (const auto& r : rows) {
        const auto& x = r.result;
        const double margin = r.relation == "<=" ? x.bound - x.value : x.value - x.bound;
        all = all && x.pass;
        csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.density, x.check, r.delta ? num(*r.delta) : "",
                           num(x.value), num(x.bound), r.relation, num(margin), num(x.at), x.pass ? 1 : 0);
        table.push_back({{"density", r.density},
                         {"check", x.check},
                         {"delta", r.delta ? json(*r.delta) : json(nullptr)},
                         {"value", x.value},
                         {"bound", x.bound},
                         {"relation", r.relation},
                         {"margin", margin},
                         {"at", x.at},
                         {"pass", x.pass}});
    }
    write_text(out / "logconcave.csv", csv);
    write_json(out / "logconcave.json", {{"command", "logconcave"}, {"all_pass", all}, {"rows", table},
                                         {"resolved_config", to_json(c)}});
    write_resolved(out, c);
    return 0;
}

}  // namespace hitrun::cli
