#include "hitrun/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "hitrun/errors.hpp"
#include "overloaded.hpp"

namespace hitrun {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Two-sided 99% standard normal quantile.
constexpr double kZ99 = 2.5758293035489004;

void check_dim(const ConvexBody& body, const Vector& x, const char* what) {
    if (x.size() != body.dim()) {
        throw UsageError(std::string(what) + ": point has dimension " + std::to_string(x.size()) +
                         ", body has dimension " + std::to_string(body.dim()));
    }
}

/// Running intersection of t-intervals from halfspaces a.(u + t theta) <= b.
struct Clip {
    double lo = -kInf;
    double hi = kInf;

    void add(double slack, double rate) {
        // slack = b - a.u >= 0 when u is inside; clamp rounding noise.
        slack = std::max(slack, 0.0);
        if (rate > 0.0) {
            hi = std::min(hi, slack / rate);
        } else if (rate < 0.0) {
            lo = std::max(lo, slack / rate);
        }
    }
};

/// Roots of a t^2 + 2 b t + c = 0 with a > 0 and c <= 0 (u inside the quadric).
std::pair<double, double> quadric_roots(double a, double b, double c) {
    c = std::min(c, 0.0);
    const double disc = std::sqrt(std::max(b * b - a * c, 0.0));
    const double q = -(b + std::copysign(disc, b));
    if (q == 0.0) return {0.0, 0.0};
    double r1 = q / a;
    double r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    return {std::min(r1, 0.0), std::max(r2, 0.0)};
}

}  // namespace

//---------------------------------------------------------------------------//
// ConvexBody
//---------------------------------------------------------------------------//

ConvexBody::ConvexBody(int dim, BodyShape shape) : dim_(dim), shape_(std::move(shape)) { validate(); }

ConvexBody ConvexBody::ball(Vector center, double radius) {
    const int n = static_cast<int>(center.size());
    return ConvexBody(n, BallShape{std::move(center), radius});
}

ConvexBody ConvexBody::box(Vector lower, Vector upper) {
    const int n = static_cast<int>(lower.size());
    return ConvexBody(n, BoxShape{std::move(lower), std::move(upper)});
}

ConvexBody ConvexBody::cube(int dim, double half_width) {
    if (dim < 1) throw UsageError("cube: dimension must be positive");
    return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
}

ConvexBody ConvexBody::isotropic_cube(int dim) { return cube(dim, std::sqrt(3.0)); }

ConvexBody ConvexBody::simplex(int dim, double scale) { return ConvexBody(dim, SimplexShape{dim, scale}); }

ConvexBody ConvexBody::hpolytope(Matrix rows, Vector offsets, Vector interior) {
    const int n = static_cast<int>(rows.cols());
    return ConvexBody(n, HPolytopeShape{std::move(rows), std::move(offsets), std::move(interior)});
}

ConvexBody ConvexBody::ellipsoid(Vector center, Matrix shape) {
    const int n = static_cast<int>(center.size());
    return ConvexBody(n, EllipsoidShape{std::move(center), std::move(shape)});
}

ConvexBody ConvexBody::with_hints(std::optional<double> r_inscribed, std::optional<double> R_circum) const {
    if (r_inscribed && !(*r_inscribed > 0.0)) throw UsageError("r_inscribed hint must be positive");
    if (R_circum && !(*R_circum > 0.0)) throw UsageError("R_circum hint must be positive");
    if (r_inscribed && R_circum && *r_inscribed > *R_circum) {
        throw UsageError("r_inscribed hint exceeds R_circum hint");
    }
    ConvexBody copy = *this;
    copy.r_hint_ = r_inscribed;
    copy.R_hint_ = R_circum;
    return copy;
}

void ConvexBody::validate() const {
    if (dim_ < 1) throw UsageError("convex body: dimension must be positive");
    std::visit(Overloaded{
                   [&](const BallShape& s) {
                       if (!(s.radius > 0.0) || !std::isfinite(s.radius)) {
                           throw UsageError("ball: radius must be positive and finite");
                       }
                   },
                   [&](const BoxShape& s) {
                       if (s.upper.size() != dim_) throw UsageError("box: lower and upper differ in dimension");
                       for (int i = 0; i < dim_; ++i) {
                           if (!(s.lower[i] < s.upper[i]) || !std::isfinite(s.lower[i]) ||
                               !std::isfinite(s.upper[i])) {
                               throw UsageError("box: need finite lower < upper on every axis");
                           }
                       }
                   },
                   [&](const SimplexShape& s) {
                       if (!(s.scale > 0.0) || !std::isfinite(s.scale)) {
                           throw UsageError("simplex: scale must be positive and finite");
                       }
                   },
                   [&](const HPolytopeShape& s) {
                       if (s.rows.rows() < 1) throw UsageError("hpolytope: no constraints");
                       if (s.offsets.size() != s.rows.rows()) {
                           throw UsageError("hpolytope: offsets length differs from row count");
                       }
                       if (s.interior.size() != dim_) throw UsageError("hpolytope: interior point has wrong dimension");
                       for (Eigen::Index i = 0; i < s.rows.rows(); ++i) {
                           if (s.rows.row(i).norm() == 0.0) {
                               throw UsageError("hpolytope: row " + std::to_string(i) + " has zero normal");
                           }
                       }
                       if (((s.rows * s.interior - s.offsets).array() > 0.0).any()) {
                           throw UsageError("hpolytope: interior point violates a constraint");
                       }
                   },
                   [&](const EllipsoidShape& s) {
                       if (s.shape.rows() != dim_ || s.shape.cols() != dim_) {
                           throw UsageError("ellipsoid: shape matrix must be n x n");
                       }
                       if (!s.shape.isApprox(s.shape.transpose(), 1e-12)) {
                           throw UsageError("ellipsoid: shape matrix must be symmetric");
                       }
                       Eigen::LLT<Matrix> llt(s.shape);
                       if (llt.info() != Eigen::Success) {
                           throw UsageError("ellipsoid: shape matrix must be positive definite");
                       }
                   },
               },
               shape_);
}

Vector ConvexBody::center() const {
    return std::visit(Overloaded{
                          [](const BallShape& s) -> Vector { return s.center; },
                          [](const BoxShape& s) -> Vector { return 0.5 * (s.lower + s.upper); },
                          [](const SimplexShape& s) -> Vector {
                              return Vector::Constant(s.dim, s.scale / (s.dim + 1.0));
                          },
                          [](const HPolytopeShape& s) -> Vector { return s.interior; },
                          [](const EllipsoidShape& s) -> Vector { return s.center; },
                      },
                      shape_);
}

bool ConvexBody::contains(const Vector& x) const {
    return std::visit(Overloaded{
                          [&](const BallShape& s) { return (x - s.center).squaredNorm() <= s.radius * s.radius; },
                          [&](const BoxShape& s) {
                              return (x.array() >= s.lower.array()).all() && (x.array() <= s.upper.array()).all();
                          },
                          [&](const SimplexShape& s) { return (x.array() >= 0.0).all() && x.sum() <= s.scale; },
                          [&](const HPolytopeShape& s) { return ((s.rows * x - s.offsets).array() <= 0.0).all(); },
                          [&](const EllipsoidShape& s) {
                              const Vector d = x - s.center;
                              return d.dot(s.shape * d) <= 1.0;
                          },
                      },
                      shape_);
}

double ConvexBody::inscribed_radius() const {
    if (r_hint_) return *r_hint_;
    return std::visit(Overloaded{
                          [](const BallShape& s) { return s.radius; },
                          [](const BoxShape& s) { return 0.5 * (s.upper - s.lower).minCoeff(); },
                          [](const SimplexShape& s) { return s.scale / (s.dim + std::sqrt(double(s.dim))); },
                          [](const HPolytopeShape& s) {
                              const Vector slack = s.offsets - s.rows * s.interior;
                              return (slack.array() / s.rows.rowwise().norm().array()).minCoeff();
                          },
                          [](const EllipsoidShape& s) {
                              Eigen::SelfAdjointEigenSolver<Matrix> es(s.shape, Eigen::EigenvaluesOnly);
                              return 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
                          },
                      },
                      shape_);
}

double ConvexBody::circum_radius() const {
    if (R_hint_) return *R_hint_;
    return std::visit(Overloaded{
                          [](const BallShape& s) { return s.radius; },
                          [](const BoxShape& s) { return 0.5 * (s.upper - s.lower).norm(); },
                          [](const SimplexShape& s) { return s.scale; },
                          [this](const HPolytopeShape&) { return std::max(1.0, inscribed_radius()); },
                          [](const EllipsoidShape& s) {
                              Eigen::SelfAdjointEigenSolver<Matrix> es(s.shape, Eigen::EigenvaluesOnly);
                              return 1.0 / std::sqrt(es.eigenvalues().minCoeff());
                          },
                      },
                      shape_);
}

bool ConvexBody::has_bounding_box() const {
    return !std::holds_alternative<HPolytopeShape>(shape_) || R_hint_.has_value();
}

AxisBox ConvexBody::bounding_box() const {
    return std::visit(Overloaded{
                          [](const BallShape& s) {
                              return AxisBox{s.center.array() - s.radius, s.center.array() + s.radius};
                          },
                          [](const BoxShape& s) { return AxisBox{s.lower, s.upper}; },
                          [](const SimplexShape& s) {
                              return AxisBox{Vector::Zero(s.dim), Vector::Constant(s.dim, s.scale)};
                          },
                          [this](const HPolytopeShape& s) {
                              if (!R_hint_) {
                                  throw UsageError("hpolytope: bounding box needs an R_circum hint");
                              }
                              // K lies in a ball of radius R, so every point is within 2R of `interior`.
                              const double w = 2.0 * *R_hint_;
                              return AxisBox{s.interior.array() - w, s.interior.array() + w};
                          },
                          [](const EllipsoidShape& s) {
                              const Vector half = s.shape.inverse().diagonal().cwiseSqrt();
                              return AxisBox{s.center - half, s.center + half};
                          },
                      },
                      shape_);
}

ConvexBody ConvexBody::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw UsageError("scaled: factor must be positive");
    ConvexBody out = std::visit(
        Overloaded{
            [&](const BallShape& s) { return ball(factor * s.center, factor * s.radius); },
            [&](const BoxShape& s) { return box(factor * s.lower, factor * s.upper); },
            [&](const SimplexShape& s) { return simplex(s.dim, factor * s.scale); },
            [&](const HPolytopeShape& s) { return hpolytope(s.rows, factor * s.offsets, factor * s.interior); },
            [&](const EllipsoidShape& s) { return ellipsoid(factor * s.center, s.shape / (factor * factor)); },
        },
        shape_);
    if (r_hint_) out.r_hint_ = factor * *r_hint_;
    if (R_hint_) out.R_hint_ = factor * *R_hint_;
    return out;
}

//---------------------------------------------------------------------------//
// AffineMap
//---------------------------------------------------------------------------//

AffineMap::AffineMap(Matrix linear, Vector shift) : linear_(std::move(linear)), shift_(std::move(shift)) {
    if (linear_.rows() != linear_.cols() || linear_.rows() != shift_.size()) {
        throw UsageError("AffineMap: linear part must be n x n with an n-vector shift");
    }
    Eigen::JacobiSVD<Matrix> svd(linear_);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv.minCoeff() > 1e-12 * sv.maxCoeff())) {
        throw DegenerateDataError("AffineMap: linear part is singular or ill-conditioned");
    }
}

AffineMap AffineMap::inverse() const {
    Matrix inv = linear_.inverse();
    Vector s = -inv * shift_;
    return AffineMap(std::move(inv), std::move(s));
}

//---------------------------------------------------------------------------//
// Oracles
//---------------------------------------------------------------------------//

bool membership(const ConvexBody& body, const Vector& x) {
    check_dim(body, x, "membership");
    return body.contains(x);
}

Chord chord(const ConvexBody& body, const Vector& u, const Vector& theta) {
    check_dim(body, u, "chord");
    check_dim(body, theta, "chord");
    const double norm = theta.norm();
    if (norm == 0.0) throw UsageError("chord: zero direction");
    if (std::abs(norm - 1.0) > 1e-9) throw UsageError("chord: direction is not a unit vector");
    if (!body.contains(u)) throw DomainError("chord: base point is outside the body");

    Chord c{u, theta, 0.0, 0.0};
    std::visit(Overloaded{
                   [&](const BallShape& s) {
                       const Vector d = u - s.center;
                       std::tie(c.t_minus, c.t_plus) =
                           quadric_roots(1.0, d.dot(theta), d.squaredNorm() - s.radius * s.radius);
                   },
                   [&](const EllipsoidShape& s) {
                       const Vector d = u - s.center;
                       const Vector qt = s.shape * theta;
                       std::tie(c.t_minus, c.t_plus) =
                           quadric_roots(theta.dot(qt), d.dot(qt), d.dot(s.shape * d) - 1.0);
                   },
                   [&](const BoxShape& s) {
                       Clip clip;
                       for (int i = 0; i < body.dim(); ++i) {
                           clip.add(s.upper[i] - u[i], theta[i]);
                           clip.add(u[i] - s.lower[i], -theta[i]);
                       }
                       c.t_minus = clip.lo;
                       c.t_plus = clip.hi;
                   },
                   [&](const SimplexShape& s) {
                       Clip clip;
                       for (int i = 0; i < body.dim(); ++i) clip.add(u[i], -theta[i]);
                       clip.add(s.scale - u.sum(), theta.sum());
                       c.t_minus = clip.lo;
                       c.t_plus = clip.hi;
                   },
                   [&](const HPolytopeShape& s) {
                       const Vector slack = s.offsets - s.rows * u;
                       const Vector rate = s.rows * theta;
                       Clip clip;
                       for (Eigen::Index i = 0; i < slack.size(); ++i) clip.add(slack[i], rate[i]);
                       if (!std::isfinite(clip.lo) || !std::isfinite(clip.hi)) {
                           throw DomainError("chord: hpolytope is unbounded along this direction");
                       }
                       c.t_minus = clip.lo;
                       c.t_plus = clip.hi;
                   },
               },
               body.shape());
    return c;
}

Vector uniform_direction(Rng& rng, int n) {
    if (n < 1) throw UsageError("uniform_direction: dimension must be positive");
    Vector v(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
}

Vector uniform_in_ball(Rng& rng, const Vector& center, double radius) {
    const int n = static_cast<int>(center.size());
    const double rho = radius * std::pow(rng.uniform(), 1.0 / n);
    return center + rho * uniform_direction(rng, n);
}

Vector uniform_in_body(const ConvexBody& body, Rng& rng, std::size_t max_tries) {
    const int n = body.dim();
    if (const auto* s = std::get_if<BoxShape>(&body.shape())) {
        Vector x(n);
        for (int i = 0; i < n; ++i) x[i] = s->lower[i] + (s->upper[i] - s->lower[i]) * rng.uniform();
        return x;
    }
    if (const auto* s = std::get_if<BallShape>(&body.shape())) {
        return uniform_in_ball(rng, s->center, s->radius);
    }
    if (const auto* s = std::get_if<SimplexShape>(&body.shape())) {
        // Normalized exponential spacings give a uniform point of the simplex.
        Vector e(n + 1);
        for (int i = 0; i <= n; ++i) e[i] = -std::log(rng.uniform_open());
        return s->scale * e.head(n) / e.sum();
    }
    if (const auto* s = std::get_if<EllipsoidShape>(&body.shape())) {
        // Q = L L^T, x = c + L^{-T} z maps the unit ball onto the ellipsoid.
        const Eigen::LLT<Matrix> llt(s->shape);
        const Vector z = uniform_in_ball(rng, Vector::Zero(n), 1.0);
        return s->center + llt.matrixU().solve(z);
    }
    const AxisBox bb = body.bounding_box();
    Vector x(n);
    for (std::size_t k = 0; k < max_tries; ++k) {
        for (int i = 0; i < n; ++i) x[i] = bb.lower[i] + (bb.upper[i] - bb.lower[i]) * rng.uniform();
        if (body.contains(x)) return x;
    }
    throw EfficiencyError("uniform_in_body: rejection from the bounding box exceeded its iteration cap");
}

Estimate cap_fraction(int n, double cos_phi, std::size_t n_samples, Rng& rng) {
    if (n_samples == 0) throw UsageError("cap_fraction: n_samples must be positive");
    if (!(cos_phi > 0.0 && cos_phi <= 1.0)) throw UsageError("cap_fraction: cos_phi must lie in (0, 1]");
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        if (uniform_direction(rng, n)[0] >= cos_phi) ++hits;
    }
    return proportion(hits, n_samples);
}

double cap_area_bound(int n, double cos_phi) { return std::exp(-0.5 * n * cos_phi * cos_phi); }

Estimate lambda_fraction(const ConvexBody& body, const Vector& u, double t, std::size_t n_samples, Rng& rng) {
    check_dim(body, u, "lambda_fraction");
    if (!(t > 0.0)) throw UsageError("lambda_fraction: radius must be positive");
    if (n_samples == 0) throw UsageError("lambda_fraction: n_samples must be positive");
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        if (body.contains(uniform_in_ball(rng, u, t))) ++hits;
    }
    return proportion(hits, n_samples);
}

KrDecision in_K_r(const ConvexBody& body, const Vector& u, double r, std::size_t n_samples, Rng& rng) {
    check_dim(body, u, "in_K_r");
    if (!(r > 0.0)) throw UsageError("in_K_r: r must be positive");
    if (!body.contains(u)) throw DomainError("in_K_r: point is outside the body");
    KrDecision d;
    d.lambda = lambda_fraction(body, u, 2.0 * r, n_samples, rng);

    // Wilson score interval; stays informative when every draw lands inside.
    const double nn = static_cast<double>(n_samples);
    const double p = d.lambda.value;
    const double z2 = kZ99 * kZ99;
    const double mid = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = kZ99 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
    if (mid - half >= kKrThreshold) {
        d.verdict = KrMembership::in;
    } else if (mid + half < kKrThreshold) {
        d.verdict = KrMembership::out;
    } else {
        d.verdict = KrMembership::undecided;
    }
    return d;
}

AffineMap isotropic_rescale(const PointList& samples) {
    if (samples.empty()) throw DegenerateDataError("isotropic_rescale: no samples");
    const auto n = samples.front().size();
    if (static_cast<Eigen::Index>(samples.size()) < n + 1) {
        throw DegenerateDataError("isotropic_rescale: need at least n + 1 samples");
    }
    Vector mean = Vector::Zero(n);
    for (const auto& x : samples) {
        if (x.size() != n) throw UsageError("isotropic_rescale: samples differ in dimension");
        mean += x;
    }
    mean /= static_cast<double>(samples.size());
    Matrix cov = Matrix::Zero(n, n);
    for (const auto& x : samples) {
        const Vector d = x - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(samples.size() - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    const Vector& ev = es.eigenvalues();
    if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff()) || !(ev.maxCoeff() > 0.0)) {
        throw DegenerateDataError("isotropic_rescale: empirical covariance is singular");
    }
    const Matrix& v = es.eigenvectors();
    Matrix linear = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    Vector shift = -linear * mean;
    return AffineMap(std::move(linear), std::move(shift));
}

}  // namespace hitrun
