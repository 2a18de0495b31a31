#pragma once

#include <memory>
#include <variant>

#include "hitrun/geometry.hpp"
#include "hitrun/rng.hpp"
#include "hitrun/types.hpp"

namespace hitrun {

struct UniformLaw {};

/// nu_{beta,m}(x) proportional to exp(-(m/2)|x - beta|^2) on K.
struct TruncatedGaussianLaw {
    Vector beta;
    double m = 1.0;
};

using TargetLaw = std::variant<UniformLaw, TruncatedGaussianLaw>;

/// Density on a convex body. The unnormalized convention is used throughout:
/// the uniform density is 1 on K and the truncated Gaussian omits its
/// normalizing constant.
class Target {
  public:
    static Target uniform(ConvexBody body);
    static Target truncated_gaussian(ConvexBody body, Vector beta, double m);
    static Target uniform(std::shared_ptr<const ConvexBody> body);
    static Target truncated_gaussian(std::shared_ptr<const ConvexBody> body, Vector beta, double m);

    const ConvexBody& body() const { return *body_; }
    const std::shared_ptr<const ConvexBody>& body_ptr() const { return body_; }
    const TargetLaw& law() const { return law_; }
    int dim() const { return body_->dim(); }
    bool is_uniform() const { return std::holds_alternative<UniformLaw>(law_); }

  private:
    Target(std::shared_ptr<const ConvexBody> body, TargetLaw law);

    std::shared_ptr<const ConvexBody> body_;
    TargetLaw law_;
};

/// Law of t on [a, b], uniform.
struct UniformSegment {
    double a = 0.0;
    double b = 0.0;
};

/// Law of t on [a, b] proportional to exp(-(t - center)^2 / (2 std^2)).
/// `log_offset` carries the part of the log-density that is constant along
/// the chord, so that chord masses share the normalization of
/// `log_density_unnormalized`.
struct TruncGauss1D {
    double center = 0.0;
    double std = 1.0;
    double a = 0.0;
    double b = 0.0;
    double log_offset = 0.0;
};

using ChordLawParams = std::variant<UniformSegment, TruncGauss1D>;

/// 0 (uniform) or -(m/2)|x - beta|^2 inside K, -infinity outside.
double log_density_unnormalized(const Target& target, const Vector& x);

/// Conditional law of the chord parameter t given the line through
/// chord.base. Throws DegenerateChordError for numerically zero-length chords.
ChordLawParams restrict_to_chord(const Target& target, const Chord& chord);

double sample_chord(const ChordLawParams& params, Rng& rng);

/// Integral of the unnormalized density along the chord.
double chord_mass(const ChordLawParams& params);
double log_chord_mass(const ChordLawParams& params);

/// Unnormalized log-density of the chord law at t (-infinity outside [a, b]).
double chord_log_density(const ChordLawParams& params, double t);

/// Cumulative distribution of the chord law.
double chord_cdf(const ChordLawParams& params, double t);

/// Chords shorter than this fraction of the body scale are degenerate.
inline constexpr double kDegenerateChordRatio = 1e-12;

bool is_degenerate(const ConvexBody& body, const Chord& chord);

/// Independent exact draw from the target.
///
/// Uniform targets go through `uniform_in_body`. Truncated Gaussians on a box
/// are sampled per axis; on other bodies Gaussian proposals are rejected until
/// one lands in K. Throws EfficiencyError after `max_tries` rejections.
Vector exact_sample(const Target& target, Rng& rng, std::size_t max_tries = 10'000'000);

}  // namespace hitrun
