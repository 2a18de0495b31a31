#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hitrun/errors.hpp"
#include "hitrun/geometry.hpp"
#include "hitrun/stats.hpp"
#include "oracles.hpp"

using namespace hitrun;

namespace {

Vector v2(double a, double b) { return Eigen::Vector2d(a, b); }

ConvexBody square() { return ConvexBody::cube(2, 1.0); }

std::vector<ConvexBody> zoo() {
    Matrix rows(4, 3);
    rows << 1, 0, 0, -1, 0, 0, 0.3, 1, 0.2, -0.2, -0.5, -1;
    Matrix rows_full(6, 3);
    rows_full.topRows(4) = rows;
    rows_full.row(4) << 0, 0, 1;
    rows_full.row(5) << 0, -1, 0.4;
    Vector offsets(6);
    offsets << 1, 1, 1.2, 0.8, 1.5, 1.1;
    Matrix shape(3, 3);
    shape << 2.0, 0.3, 0.1, 0.3, 1.0, 0.0, 0.1, 0.0, 0.5;
    return {
        ConvexBody::ball(Eigen::Vector3d(0.1, -0.2, 0.3), 1.5),
        ConvexBody::box(Eigen::Vector3d(-1, -2, 0), Eigen::Vector3d(1, 0.5, 3)),
        ConvexBody::simplex(3, 2.0),
        ConvexBody::hpolytope(rows_full, offsets, Vector::Zero(3)).with_hints(std::nullopt, 10.0),
        ConvexBody::ellipsoid(Eigen::Vector3d(0.5, 0.0, -1.0), shape),
    };
}

}  // namespace

TEST(Membership, Examples) {
    EXPECT_TRUE(membership(ConvexBody::ball(Vector::Zero(2), 1.0), Vector::Zero(2)));
    EXPECT_TRUE(membership(square(), v2(1.0, 1.0)));
    EXPECT_FALSE(membership(square(), v2(1.0001, 0.0)));
    EXPECT_THROW(membership(square(), Vector::Zero(3)), UsageError);
}

TEST(Body, Validation) {
    EXPECT_THROW(ConvexBody::ball(Vector::Zero(2), -1.0), UsageError);
    EXPECT_THROW(ConvexBody::box(v2(0, 0), v2(1, 0)), UsageError);
    Matrix rows(1, 2);
    rows << 0, 0;
    EXPECT_THROW(ConvexBody::hpolytope(rows, Vector::Ones(1), Vector::Zero(2)), UsageError);
    EXPECT_THROW(square().with_hints(2.0, 1.0), UsageError);
}

TEST(Chord, Examples) {
    const auto ball = ConvexBody::ball(Vector::Zero(2), 1.0);
    const Chord c1 = chord(ball, Vector::Zero(2), v2(1, 0));
    EXPECT_NEAR(c1.t_minus, -1.0, 1e-14);
    EXPECT_NEAR(c1.t_plus, 1.0, 1e-14);

    const Chord c2 = chord(square(), Vector::Zero(2), v2(1, 1) / std::sqrt(2.0));
    EXPECT_NEAR(c2.t_minus, -std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(c2.t_plus, std::sqrt(2.0), 1e-14);

    const auto simplex = ConvexBody::simplex(2);
    const Vector u = v2(1.0 / 3.0, 1.0 / 3.0);
    const Chord c3 = chord(simplex, u, v2(1, 0));
    const auto [lo, hi] = oracle::bisect_chord([&](const Vector& x) { return simplex.contains(x); }, u, v2(1, 0), 5.0);
    EXPECT_NEAR(c3.t_minus, lo, 1e-9);
    EXPECT_NEAR(c3.t_plus, hi, 1e-9);
    EXPECT_NEAR(c3.t_minus, -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(c3.t_plus, 1.0 / 3.0, 1e-12);
}

TEST(Chord, Errors) {
    EXPECT_THROW(chord(square(), v2(2, 0), v2(1, 0)), DomainError);
    EXPECT_THROW(chord(square(), Vector::Zero(2), Vector::Zero(2)), UsageError);
    EXPECT_THROW(chord(square(), Vector::Zero(2), v2(2, 0)), UsageError);
}

TEST(Chord, EndpointsOnBoundaryAllKinds) {
    Rng rng(17);
    int cases = 0;
    for (const auto& body : zoo()) {
        for (int k = 0; k < 300; ++k) {
            const Vector u = uniform_in_body(body, rng);
            const Vector theta = uniform_direction(rng, body.dim());
            const Chord c = chord(body, u, theta);
            ASSERT_LE(c.t_minus, 0.0);
            ASSERT_GE(c.t_plus, 0.0);
            const double eps = 1e-6 * c.length();
            EXPECT_TRUE(body.contains(c.at(c.t_plus - eps)));
            EXPECT_FALSE(body.contains(c.at(c.t_plus + eps)));
            EXPECT_TRUE(body.contains(c.at(c.t_minus + eps)));
            EXPECT_FALSE(body.contains(c.at(c.t_minus - eps)));
            const Chord flipped = chord(body, u, -theta);
            EXPECT_NEAR(flipped.t_minus, -c.t_plus, 1e-12 * (1.0 + c.length()));
            EXPECT_NEAR(flipped.t_plus, -c.t_minus, 1e-12 * (1.0 + c.length()));
            ++cases;
        }
    }
    EXPECT_GE(cases, 1000);
}

TEST(Chord, AgreesWithBisectionOracle) {
    Rng rng(18);
    for (const auto& body : zoo()) {
        for (int k = 0; k < 20; ++k) {
            const Vector u = uniform_in_body(body, rng);
            const Vector theta = uniform_direction(rng, body.dim());
            const Chord c = chord(body, u, theta);
            const auto [lo, hi] =
                oracle::bisect_chord([&](const Vector& x) { return body.contains(x); }, u, theta, 50.0, 1e-12);
            EXPECT_NEAR(c.t_minus, lo, 1e-10);
            EXPECT_NEAR(c.t_plus, hi, 1e-10);
        }
    }
}

TEST(UniformDirection, Basics) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const double x = uniform_direction(rng, 1)[0];
        EXPECT_TRUE(x == 1.0 || x == -1.0);
    }
    const int n = 1000000;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        const Vector d = uniform_direction(rng, 3);
        ASSERT_NEAR(d.norm(), 1.0, 1e-12);
        sum += d;
    }
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(sum[k] / n, 0.0, 0.005);
}

TEST(UniformDirection, PlanarAnglesChiSquare) {
    Rng rng(2);
    std::vector<std::size_t> counts(36, 0);
    for (int i = 0; i < 1000000; ++i) {
        const Vector d = uniform_direction(rng, 2);
        double a = std::atan2(d[1], d[0]);
        if (a < 0) a += 2.0 * std::numbers::pi;
        ++counts[std::min<std::size_t>(35, static_cast<std::size_t>(a / (2.0 * std::numbers::pi) * 36))];
    }
    EXPECT_GT(stats::chi_square_uniform_p_value(counts), 0.01);
}

TEST(CapFraction, Examples) {
    Rng rng(3);
    const Estimate e = cap_fraction(100, 0.2, 1000000, rng);
    EXPECT_NEAR(e.value, 0.023, 0.002);
    EXPECT_LE(e.value, cap_area_bound(100, 0.2) + 5.0 * e.se);
    EXPECT_NEAR(cap_area_bound(100, 0.2), std::exp(-2.0), 1e-15);

    EXPECT_NEAR(cap_fraction(2, 0.5, 1000000, rng).value, 1.0 / 3.0, 0.002);
    EXPECT_LT(cap_fraction(5, 0.999999, 100000, rng).value, 1e-3);
    EXPECT_THROW(cap_fraction(3, 0.5, 0, rng), UsageError);
}

TEST(CapFraction, BoundHoldsOverGrid) {
    Rng rng(4);
    for (int n : {2, 5, 20, 60}) {
        for (double c : {0.1, 0.3, 0.6, 0.9}) {
            const Estimate e = cap_fraction(n, c, 20000, rng);
            EXPECT_LE(e.value, cap_area_bound(n, c) + 5.0 * e.se) << n << " " << c;
        }
    }
}

TEST(LambdaFraction, Examples) {
    Rng rng(5);
    EXPECT_DOUBLE_EQ(lambda_fraction(square(), Vector::Zero(2), 0.5, 10000, rng).value, 1.0);
    EXPECT_NEAR(lambda_fraction(square(), v2(1, 0), 0.1, 100000, rng).value, 0.5, 0.01);
    EXPECT_NEAR(lambda_fraction(square(), v2(1, 1), 0.1, 100000, rng).value, 0.25, 0.01);
}

TEST(LambdaFraction, MonotoneUnderInclusion) {
    Rng rng(6);
    const auto small = ConvexBody::cube(2, 0.8);
    const auto big = square();
    for (const Vector& u : {v2(0.7, 0.0), v2(0.75, 0.75), v2(-0.6, 0.3)}) {
        const Estimate a = lambda_fraction(small, u, 0.3, 20000, rng);
        const Estimate b = lambda_fraction(big, u, 0.3, 20000, rng);
        EXPECT_LE(a.value, b.value + 3.0 * std::hypot(a.se, b.se));
    }
}

TEST(InKr, Examples) {
    Rng rng(7);
    EXPECT_EQ(in_K_r(square(), Vector::Zero(2), 0.25, 4000, rng).verdict, KrMembership::in);
    EXPECT_EQ(in_K_r(square(), v2(1, 1), 0.05, 4000, rng).verdict, KrMembership::out);
    EXPECT_DOUBLE_EQ(kKrThreshold, 0.984375);
    EXPECT_THROW(in_K_r(square(), v2(2, 0), 0.05, 100, rng), DomainError);
}

TEST(InKr, MidpointOfInPointsNeverOut) {
    Rng rng(8);
    const auto body = ConvexBody::cube(2, 1.0);
    const double r = 0.05;
    int pairs = 0;
    while (pairs < 100) {
        const Vector u = uniform_in_body(body, rng);
        const Vector v = uniform_in_body(body, rng);
        if (in_K_r(body, u, r, 4000, rng).verdict != KrMembership::in) continue;
        if (in_K_r(body, v, r, 4000, rng).verdict != KrMembership::in) continue;
        EXPECT_NE(in_K_r(body, 0.5 * (u + v), r, 4000, rng).verdict, KrMembership::out);
        ++pairs;
    }
}

TEST(IsotropicRescale, BoxMap) {
    Rng rng(9);
    const auto body = ConvexBody::box(v2(-2 * std::sqrt(3.0), -std::sqrt(3.0)), v2(2 * std::sqrt(3.0), std::sqrt(3.0)));
    PointList xs(100000);
    for (auto& x : xs) x = uniform_in_body(body, rng);
    const AffineMap map = isotropic_rescale(xs);
    // Box half-width a has variance a^2 / 3: 4 and 1.
    EXPECT_NEAR(map.linear()(0, 0), 0.5, 0.01);
    EXPECT_NEAR(map.linear()(1, 1), 1.0, 0.02);
    EXPECT_NEAR(map.linear()(0, 1), 0.0, 0.01);

    PointList mapped;
    for (const auto& x : xs) mapped.push_back(map.apply(x));
    const Eigen::SelfAdjointEigenSolver<Matrix> es(stats::sample_covariance(mapped));
    for (int k = 0; k < 2; ++k) {
        EXPECT_GE(es.eigenvalues()[k], 0.97);
        EXPECT_LE(es.eigenvalues()[k], 1.03);
    }
    EXPECT_NEAR(stats::sample_mean(mapped).norm(), 0.0, 1e-10);
}

TEST(IsotropicRescale, AlreadyIsotropic) {
    Rng rng(10);
    const auto body = ConvexBody::isotropic_cube(3);
    PointList xs(50000);
    for (auto& x : xs) x = uniform_in_body(body, rng);
    const AffineMap map = isotropic_rescale(xs);
    EXPECT_LT((map.linear() - Matrix::Identity(3, 3)).norm(), 0.05);
}

TEST(IsotropicRescale, DegenerateSamples) {
    PointList xs;
    for (int i = 0; i < 10; ++i) xs.push_back(v2(i, 2.0 * i));
    EXPECT_THROW(isotropic_rescale(xs), DegenerateDataError);
    EXPECT_THROW(isotropic_rescale({v2(0, 0), v2(1, 0)}), DegenerateDataError);
}

TEST(AffineMap, InverseRoundTrip) {
    Matrix a(2, 2);
    a << 2, 1, 0, 3;
    const AffineMap m(a, v2(1, -1));
    const Vector x = v2(0.3, 0.7);
    EXPECT_LT((m.inverse().apply(m.apply(x)) - x).norm(), 1e-14);
    EXPECT_THROW(AffineMap(Matrix::Zero(2, 2), v2(0, 0)), DegenerateDataError);
}

TEST(UniformInBody, StaysInsideAndCentroid) {
    Rng rng(11);
    for (const auto& body : zoo()) {
        for (int k = 0; k < 2000; ++k) ASSERT_TRUE(body.contains(uniform_in_body(body, rng)));
    }
    // Simplex centroid is scale / (n + 1) per coordinate.
    const auto simplex = ConvexBody::simplex(3, 2.0);
    PointList xs(100000);
    for (auto& x : xs) x = uniform_in_body(simplex, rng);
    const Vector m = stats::sample_mean(xs);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(m[k], 0.5, 0.01);
}
