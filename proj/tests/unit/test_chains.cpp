#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hitrun/chains.hpp"
#include "hitrun/errors.hpp"
#include "hitrun/stats.hpp"
#include "oracles.hpp"

using namespace hitrun;

namespace {
Vector v2(double a, double b) { return Eigen::Vector2d(a, b); }
const ConvexBody kDisc = ConvexBody::ball(Vector::Zero(2), 1.0);
const ConvexBody kSquare = ConvexBody::cube(2, 1.0);
}  // namespace

TEST(HitAndRun, RadialLawFromDiscCenter) {
    Rng rng(1);
    const Target t = Target::uniform(kDisc);
    const Vector u = Vector::Zero(2);
    std::vector<double> r(1000000);
    for (auto& x : r) x = hit_and_run_step(u, t, rng).x.norm();
    // The polar oracle gives density 2 pi r * 1/(2 pi r) = 1 on [0, 1].
    EXPECT_NEAR(stats::mean(r), 0.5, 0.002);
    EXPECT_LT(stats::ks_statistic(r, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.003);
}

TEST(HitAndRun, OutputInsideBody) {
    Rng rng(2);
    Matrix shape(3, 3);
    shape << 4, 1, 0, 1, 2, 0, 0, 0, 1;
    const std::vector<ConvexBody> bodies = {ConvexBody::simplex(3), ConvexBody::ellipsoid(Vector::Zero(3), shape),
                                            ConvexBody::cube(3, 1.0)};
    for (const auto& body : bodies) {
        const Target uni = Target::uniform(body);
        const Target tg = Target::truncated_gaussian(body, Eigen::Vector3d(3, -1, 0), 6.0);
        Vector x = body.center();
        Vector y = body.center();
        for (int i = 0; i < 35000; ++i) {
            x = hit_and_run_step(x, uni, rng).x;
            y = hit_and_run_step(y, tg, rng).x;
            ASSERT_TRUE(body.contains(x));
            ASSERT_TRUE(body.contains(y));
        }
    }
}

TEST(HitAndRun, OneStepFromUniformStaysUniform) {
    Rng rng(3);
    const Target t = Target::uniform(kSquare);
    const int n = 400000;
    std::vector<int> counts(400, 0);
    for (int i = 0; i < n; ++i) {
        const Vector y = hit_and_run_step(uniform_in_body(kSquare, rng), t, rng).x;
        const int ix = std::min(19, static_cast<int>((y[0] + 1.0) * 10.0));
        const int iy = std::min(19, static_cast<int>((y[1] + 1.0) * 10.0));
        ++counts[ix * 20 + iy];
    }
    const double expect = n / 400.0;
    const double sd = std::sqrt(expect * (1.0 - 1.0 / 400.0));
    for (int c : counts) EXPECT_NEAR(c, expect, 4.0 * sd);
}

TEST(HitAndRun, StationaryForTruncatedGaussian) {
    Rng rng(4);
    const auto box = ConvexBody::box(Eigen::Vector3d(-1, -1, 0), Eigen::Vector3d(1, 2, 0.5));
    const Vector beta = Eigen::Vector3d(0.5, 3.0, -0.2);
    const double m = 2.0;
    const Target t = Target::truncated_gaussian(box, beta, m);
    const int n = 100000;
    PointList ys(n);
    for (auto& y : ys) y = hit_and_run_step(exact_sample(t, rng), t, rng).x;
    const double s = 1.0 / std::sqrt(m);
    for (int k = 0; k < 3; ++k) {
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = ys[i][k];
        const double lo = box.bounding_box().lower[k];
        const double hi = box.bounding_box().upper[k];
        const double fa = oracle::std_normal_cdf((lo - beta[k]) / s);
        const double fb = oracle::std_normal_cdf((hi - beta[k]) / s);
        const double d = stats::ks_statistic(
            xs, [&](double x) { return (oracle::std_normal_cdf((x - beta[k]) / s) - fa) / (fb - fa); });
        EXPECT_LT(d, 0.01) << "axis " << k;
    }
}

TEST(HitAndRun, DegenerateChordsExhaustRetries) {
    // Needle-shaped triangle: from its apex almost every chord has zero length.
    const double eps = 1e-9;
    Matrix rows(3, 2);
    rows << 0, -1, -eps, 1, 1, 0;
    const auto needle = ConvexBody::hpolytope(rows, Eigen::Vector3d(0, 0, 1), v2(0.5, 0.25 * eps))
                            .with_hints(std::nullopt, 2.0);
    Rng rng(5);
    EXPECT_THROW(hit_and_run_step(Vector::Zero(2), Target::uniform(needle), rng), StepError);
}

TEST(BallWalk, Examples) {
    Rng rng(6);
    const Target disc = Target::uniform(kDisc);
    for (int i = 0; i < 10000; ++i) EXPECT_TRUE(ball_walk_step(Vector::Zero(2), disc, 0.1, rng).moved);

    const Target sq = Target::uniform(kSquare);
    const int n = 100000;
    int moved = 0;
    for (int i = 0; i < n; ++i) moved += ball_walk_step(v2(1, 1), sq, 1e-4, rng).moved ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(moved) / n, 0.25, 0.01);

    const Vector x = v2(0.95, 0.2);
    moved = 0;
    for (int i = 0; i < n; ++i) moved += ball_walk_step(x, sq, 0.1, rng).moved ? 1 : 0;
    const Estimate acc = proportion(static_cast<std::size_t>(moved), n);
    const Estimate lam = lambda_fraction(kSquare, x, 0.1, n, rng);
    EXPECT_NEAR(acc.value, lam.value, 3.0 * std::hypot(acc.se, lam.se));
}

TEST(BallWalk, MetropolisKeepsTruncatedGaussian) {
    Rng rng(7);
    const Target t = Target::truncated_gaussian(kSquare, v2(0.3, -0.2), 3.0);
    ChainConfig cfg;
    cfg.kind = ChainKind::ball_walk;
    cfg.delta = 0.3;
    const ChainRun run = run_chain(cfg, t, Vector::Zero(2), 400000, 4, rng);
    std::vector<double> x0;
    for (std::size_t i = 1000; i < run.samples.size(); ++i) x0.push_back(run.samples[i][0]);
    const double ref = oracle::truncated_normal_mean(0.3, 1.0 / std::sqrt(3.0), -1.0, 1.0);
    EXPECT_NEAR(stats::mean(x0), ref, 5.0 * stats::batch_means_se(x0));
}

TEST(Lazy, StayProbabilityIsHalf) {
    Rng rng(8);
    const Target t = Target::uniform(kDisc);
    const int n = 1000000;
    int stays = 0;
    int stays2 = 0;
    const Vector x = v2(0.1, 0.1);
    for (int i = 0; i < n; ++i) {
        auto inner = [&] { return hit_and_run_step(x, t, rng); };
        stays += lazy_step(x, rng, inner).moved ? 0 : 1;
        stays2 += lazy_step(x, rng, [&] { return lazy_step(x, rng, inner); }).moved ? 0 : 1;
    }
    EXPECT_NEAR(static_cast<double>(stays) / n, 0.5, 0.0015);
    EXPECT_GE(static_cast<double>(stays2) / n, 0.75 - 0.0015);
}

TEST(Lazy, PreservesStationarity) {
    Rng rng(9);
    ChainConfig cfg;
    cfg.lazy = true;
    const Target t = Target::uniform(kSquare);
    std::vector<int> counts(100, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        Vector x = uniform_in_body(kSquare, rng);
        for (int k = 0; k < 3; ++k) x = chain_step(cfg, t, x, rng).x;
        ++counts[std::min(9, static_cast<int>((x[0] + 1) * 5)) * 10 + std::min(9, static_cast<int>((x[1] + 1) * 5))];
    }
    for (int c : counts) EXPECT_NEAR(c, n / 100.0, 4.0 * std::sqrt(n / 100.0));
}

TEST(RunChain, ZeroStepsAndDeterminism) {
    Rng rng(10);
    const Target t = Target::uniform(kSquare);
    ChainConfig cfg;
    const ChainRun empty = run_chain(cfg, t, v2(0.1, 0.2), 0, 1, rng);
    ASSERT_EQ(empty.samples.size(), 1u);
    EXPECT_EQ(empty.samples[0], v2(0.1, 0.2));

    Rng a(77), b(77);
    const ChainRun ra = run_chain(cfg, t, Vector::Zero(2), 500, 3, a);
    const ChainRun rb = run_chain(cfg, t, Vector::Zero(2), 500, 3, b);
    ASSERT_EQ(ra.samples.size(), rb.samples.size());
    for (std::size_t i = 0; i < ra.samples.size(); ++i) EXPECT_EQ(ra.samples[i], rb.samples[i]);

    EXPECT_THROW(run_chain(cfg, t, v2(3, 0), 10, 1, rng), DomainError);
    EXPECT_THROW(run_chain(cfg, t, Vector::Zero(2), 10, 0, rng), UsageError);
}

TEST(RunChain, FourBoxMean) {
    Rng rng(11);
    const auto box = ConvexBody::cube(4, 1.0);
    const ChainRun run = run_chain(ChainConfig{}, Target::uniform(box), Vector::Zero(4), 10000, 10, rng);
    EXPECT_EQ(run.samples.size(), 1001u);
    for (int k = 0; k < 4; ++k) {
        std::vector<double> xs;
        for (const auto& x : run.samples) xs.push_back(x[k]);
        EXPECT_NEAR(stats::mean(xs), 0.0, 4.0 * std::sqrt(1.0 / 3.0 / xs.size()));
    }
}

TEST(TransitionDensity, Examples) {
    EXPECT_NEAR(transition_density(Vector::Zero(2), v2(0.5, 0), Target::uniform(kDisc)), 1.0 / std::numbers::pi,
                1e-12);
    EXPECT_NEAR(transition_density(Vector::Zero(2), v2(0.5, 0), Target::uniform(kDisc)),
                oracle::disc_center_kernel(0.5), 1e-12);
    EXPECT_NEAR(transition_density(v2(0.5, 0), v2(-0.5, 0), Target::uniform(kSquare)), 1.0 / (2.0 * std::numbers::pi),
                1e-12);
    EXPECT_NEAR(transition_density(v2(0.5, 0), v2(-0.5, 0), Target::uniform(kSquare)),
                oracle::planar_uniform_kernel(2.0, 1.0), 1e-12);
    EXPECT_THROW(transition_density(v2(0.5, 0), v2(0.5, 0), Target::uniform(kSquare)), UsageError);
    EXPECT_EQ(transition_density(v2(0.5, 0), v2(1.5, 0), Target::uniform(kSquare)), 0.0);
}

TEST(TransitionDensity, DetailedBalance) {
    Rng rng(12);
    const auto ball = ConvexBody::ball(Eigen::Vector3d(0, 0.1, 0), 1.0);
    const Target t = Target::truncated_gaussian(ball, Eigen::Vector3d(0.4, -0.3, 0.8), 5.0);
    for (int i = 0; i < 200; ++i) {
        const Vector u = uniform_in_body(ball, rng);
        const Vector x = uniform_in_body(ball, rng);
        const double lhs = std::exp(log_density_unnormalized(t, u)) * transition_density(u, x, t);
        const double rhs = std::exp(log_density_unnormalized(t, x)) * transition_density(x, u, t);
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
    }
}

TEST(UnitBallVolume, SmallDimensions) {
    EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-12);
    EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-12);
    EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-12);
    for (int n = 1; n <= 30; ++n) EXPECT_NEAR(unit_ball_volume(n) / oracle::unit_ball_volume(n), 1.0, 1e-12);
}

TEST(KernelTv, DiscCenter) {
    Rng rng(13);
    const KernelTv r = empirical_kernel_tv(Vector::Zero(2), Target::uniform(kDisc), 1000000, 50, rng);
    EXPECT_LE(r.tv, 0.02);
    double mass = 0.0;
    for (double m : r.cell_mass) mass += m;
    EXPECT_NEAR(mass, 1.0, 1e-3);
}

TEST(KernelTv, CoarseGridNearNoiseFloor) {
    Rng rng(14);
    const KernelTv r = empirical_kernel_tv(v2(0.2, -0.4), Target::uniform(kSquare), 2000000, 20, rng);
    EXPECT_LE(r.tv, 0.01);
}

TEST(KernelTv, ThreeDimensionsAndErrors) {
    Rng rng(15);
    const auto cube = ConvexBody::cube(3, 1.0);
    const KernelTv r = empirical_kernel_tv(Eigen::Vector3d(0.2, 0, -0.1), Target::uniform(cube), 1000000, 10, rng);
    EXPECT_LE(r.tv, r.expected_noise + 0.01);
    EXPECT_THROW(empirical_kernel_tv(Vector::Zero(4), Target::uniform(ConvexBody::cube(4, 1.0)), 10, 5, rng),
                 UsageError);
}
