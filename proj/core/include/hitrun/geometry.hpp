#pragma once

#include <optional>
#include <variant>

#include "hitrun/rng.hpp"
#include "hitrun/types.hpp"

namespace hitrun {

//---------------------------------------------------------------------------//
// Body descriptors
//---------------------------------------------------------------------------//

struct BallShape {
    Vector center;
    double radius = 1.0;
};

struct BoxShape {
    Vector lower;
    Vector upper;
};

/// { x : x_i >= 0, sum_i x_i <= scale }
struct SimplexShape {
    int dim = 1;
    double scale = 1.0;
};

/// { x : A x <= b }. `interior` is a point strictly inside the body.
struct HPolytopeShape {
    Matrix rows;
    Vector offsets;
    Vector interior;
};

/// { x : (x - center)^T shape (x - center) <= 1 } with `shape` positive definite.
struct EllipsoidShape {
    Vector center;
    Matrix shape;
};

using BodyShape = std::variant<BallShape, BoxShape, SimplexShape, HPolytopeShape, EllipsoidShape>;

struct AxisBox {
    Vector lower;
    Vector upper;
};

/// Compact convex body with closed-form membership and chord oracles.
///
/// Bodies are immutable once built and may be shared between threads.
/// Membership treats the body as a closed set: boundary points are inside.
class ConvexBody {
  public:
    static ConvexBody ball(Vector center, double radius);
    static ConvexBody box(Vector lower, Vector upper);
    /// Axis-aligned cube [-half_width, half_width]^dim.
    static ConvexBody cube(int dim, double half_width);
    /// Cube with uniform measure of identity covariance: half width sqrt(3).
    static ConvexBody isotropic_cube(int dim);
    static ConvexBody simplex(int dim, double scale = 1.0);
    static ConvexBody hpolytope(Matrix rows, Vector offsets, Vector interior);
    static ConvexBody ellipsoid(Vector center, Matrix shape);

    /// Copy with radius hints attached; validates r <= R.
    ConvexBody with_hints(std::optional<double> r_inscribed, std::optional<double> R_circum) const;

    int dim() const { return dim_; }
    const BodyShape& shape() const { return shape_; }
    std::optional<double> r_inscribed_hint() const { return r_hint_; }
    std::optional<double> R_circum_hint() const { return R_hint_; }

    /// Distinguished interior point of the kind (center, centroid, or the
    /// supplied interior point).
    Vector center() const;

    bool contains(const Vector& x) const;

    /// Radius of a ball known to lie inside K (hint if given, else computed
    /// from the kind; a lower bound for h-polytopes).
    double inscribed_radius() const;
    /// Scale of the body used for relative tolerances.
    double circum_radius() const;

    /// Axis-aligned box containing K. H-polytopes need an R_circum hint.
    AxisBox bounding_box() const;
    bool has_bounding_box() const;

    /// Image of K under x -> factor * x.
    ConvexBody scaled(double factor) const;

  private:
    ConvexBody(int dim, BodyShape shape);
    void validate() const;

    int dim_ = 0;
    BodyShape shape_;
    std::optional<double> r_hint_;
    std::optional<double> R_hint_;
};

/// The intersection { base + t direction : t in [t_minus, t_plus] } of a line with K.
struct Chord {
    Vector base;
    Vector direction;
    double t_minus = 0.0;
    double t_plus = 0.0;

    double length() const { return t_plus - t_minus; }
    Vector at(double t) const { return base + t * direction; }
};

/// Invertible affine map x -> linear x + shift.
class AffineMap {
  public:
    AffineMap(Matrix linear, Vector shift);

    const Matrix& linear() const { return linear_; }
    const Vector& shift() const { return shift_; }

    Vector apply(const Vector& x) const { return linear_ * x + shift_; }
    AffineMap inverse() const;

  private:
    Matrix linear_;
    Vector shift_;
};

//---------------------------------------------------------------------------//
// Oracles and estimators
//---------------------------------------------------------------------------//

bool membership(const ConvexBody& body, const Vector& x);

/// Exact chord endpoints through u in unit direction theta.
/// Throws DomainError if u is outside K, UsageError for a zero or
/// non-unit direction.
Chord chord(const ConvexBody& body, const Vector& u, const Vector& theta);

Vector uniform_direction(Rng& rng, int n);

/// Uniform point in the ball of given center and radius.
Vector uniform_in_ball(Rng& rng, const Vector& center, double radius);

/// Exact uniform sample from K: direct for boxes and balls, rejection from
/// the bounding box otherwise. Throws EfficiencyError after `max_tries`.
Vector uniform_in_body(const ConvexBody& body, Rng& rng, std::size_t max_tries = 10'000'000);

/// Fraction of sphere directions within the cap { <theta, e> >= cos_phi }.
Estimate cap_fraction(int n, double cos_phi, std::size_t n_samples, Rng& rng);

/// Upper bound exp(-n cos^2(phi) / 2) on the normalized cap area.
double cap_area_bound(int n, double cos_phi);

/// vol(K intersect B(u, t)) / vol(B(0, t)) by uniform sampling in B(u, t).
Estimate lambda_fraction(const ConvexBody& body, const Vector& u, double t, std::size_t n_samples, Rng& rng);

inline constexpr double kKrThreshold = 63.0 / 64.0;

enum class KrMembership { in, out, undecided };

struct KrDecision {
    KrMembership verdict = KrMembership::undecided;
    Estimate lambda;
};

/// Classifies u against { x in K : lambda(x, 2r) >= 63/64 } using a 99%
/// two-sided band around the Monte Carlo estimate of lambda(u, 2r).
KrDecision in_K_r(const ConvexBody& body, const Vector& u, double r, std::size_t n_samples, Rng& rng);

/// Map x -> Sigma^{-1/2} (x - m) from the empirical mean and covariance.
AffineMap isotropic_rescale(const PointList& samples);

}  // namespace hitrun
