#include "hitrun/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hitrun/errors.hpp"
#include "hitrun/normal.hpp"
#include "overloaded.hpp"

namespace hitrun {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Target::Target(std::shared_ptr<const ConvexBody> body, TargetLaw law) : body_(std::move(body)), law_(std::move(law)) {
    if (!body_) throw UsageError("Target: null body");
    if (const auto* g = std::get_if<TruncatedGaussianLaw>(&law_)) {
        if (!(g->m > 0.0) || !std::isfinite(g->m)) throw UsageError("truncated Gaussian: m must be positive");
        if (g->beta.size() != body_->dim()) throw UsageError("truncated Gaussian: beta has wrong dimension");
        if (!g->beta.allFinite()) throw UsageError("truncated Gaussian: beta must be finite");
    }
}

Target Target::uniform(ConvexBody body) { return uniform(std::make_shared<const ConvexBody>(std::move(body))); }

Target Target::truncated_gaussian(ConvexBody body, Vector beta, double m) {
    return truncated_gaussian(std::make_shared<const ConvexBody>(std::move(body)), std::move(beta), m);
}

Target Target::uniform(std::shared_ptr<const ConvexBody> body) { return Target(std::move(body), UniformLaw{}); }

Target Target::truncated_gaussian(std::shared_ptr<const ConvexBody> body, Vector beta, double m) {
    return Target(std::move(body), TruncatedGaussianLaw{std::move(beta), m});
}

double log_density_unnormalized(const Target& target, const Vector& x) {
    if (x.size() != target.dim()) throw UsageError("log_density_unnormalized: dimension mismatch");
    if (!target.body().contains(x)) return kNegInf;
    if (const auto* g = std::get_if<TruncatedGaussianLaw>(&target.law())) {
        return -0.5 * g->m * (x - g->beta).squaredNorm();
    }
    return 0.0;
}

bool is_degenerate(const ConvexBody& body, const Chord& chord) {
    return !(chord.length() >= kDegenerateChordRatio * body.circum_radius());
}

ChordLawParams restrict_to_chord(const Target& target, const Chord& chord) {
    if (is_degenerate(target.body(), chord)) throw DegenerateChordError("restrict_to_chord: degenerate chord");
    if (const auto* g = std::get_if<TruncatedGaussianLaw>(&target.law())) {
        const Vector d = g->beta - chord.base;
        const double c = d.dot(chord.direction);
        const double perp2 = std::max((d - c * chord.direction).squaredNorm(), 0.0);
        return TruncGauss1D{c, 1.0 / std::sqrt(g->m), chord.t_minus, chord.t_plus, -0.5 * g->m * perp2};
    }
    return UniformSegment{chord.t_minus, chord.t_plus};
}

double sample_chord(const ChordLawParams& params, Rng& rng) {
    return std::visit(Overloaded{
                          [&](const UniformSegment& p) { return p.a + (p.b - p.a) * rng.uniform(); },
                          [&](const TruncGauss1D& p) {
                              const double z = normal::sample_truncated((p.a - p.center) / p.std,
                                                                        (p.b - p.center) / p.std, rng);
                              return std::clamp(p.center + p.std * z, p.a, p.b);
                          },
                      },
                      params);
}

double log_chord_mass(const ChordLawParams& params) {
    return std::visit(Overloaded{
                          [](const UniformSegment& p) { return std::log(p.b - p.a); },
                          [](const TruncGauss1D& p) {
                              const double lo = (p.a - p.center) / p.std;
                              const double hi = (p.b - p.center) / p.std;
                              return p.log_offset + std::log(p.std) + normal::kLogSqrt2Pi +
                                     normal::log_interval_mass(lo, hi);
                          },
                      },
                      params);
}

double chord_mass(const ChordLawParams& params) {
    return std::visit(Overloaded{
                          [](const UniformSegment& p) { return p.b - p.a; },
                          [](const TruncGauss1D& p) {
                              const double lo = (p.a - p.center) / p.std;
                              const double hi = (p.b - p.center) / p.std;
                              return std::exp(p.log_offset) * p.std * normal::kSqrt2Pi *
                                     normal::interval_mass(lo, hi);
                          },
                      },
                      params);
}

double chord_log_density(const ChordLawParams& params, double t) {
    return std::visit(Overloaded{
                          [&](const UniformSegment& p) { return (t < p.a || t > p.b) ? kNegInf : 0.0; },
                          [&](const TruncGauss1D& p) {
                              if (t < p.a || t > p.b) return kNegInf;
                              const double z = (t - p.center) / p.std;
                              return p.log_offset - 0.5 * z * z;
                          },
                      },
                      params);
}

double chord_cdf(const ChordLawParams& params, double t) {
    return std::visit(Overloaded{
                          [&](const UniformSegment& p) { return std::clamp((t - p.a) / (p.b - p.a), 0.0, 1.0); },
                          [&](const TruncGauss1D& p) {
                              if (t <= p.a) return 0.0;
                              if (t >= p.b) return 1.0;
                              const double lo = (p.a - p.center) / p.std;
                              const double hi = (p.b - p.center) / p.std;
                              const double z = (t - p.center) / p.std;
                              return std::exp(normal::log_interval_mass(lo, z) - normal::log_interval_mass(lo, hi));
                          },
                      },
                      params);
}

Vector exact_sample(const Target& target, Rng& rng, std::size_t max_tries) {
    const ConvexBody& body = target.body();
    const int n = body.dim();
    const auto* g = std::get_if<TruncatedGaussianLaw>(&target.law());
    if (!g) return uniform_in_body(body, rng, max_tries);

    const double s = 1.0 / std::sqrt(g->m);
    if (const auto* box = std::get_if<BoxShape>(&body.shape())) {
        // The truncated Gaussian on a box is a product of 1-D truncated normals.
        Vector x(n);
        for (int i = 0; i < n; ++i) {
            const double z = normal::sample_truncated((box->lower[i] - g->beta[i]) / s,
                                                      (box->upper[i] - g->beta[i]) / s, rng);
            x[i] = std::clamp(g->beta[i] + s * z, box->lower[i], box->upper[i]);
        }
        return x;
    }
    Vector x(n);
    for (std::size_t k = 0; k < max_tries; ++k) {
        for (int i = 0; i < n; ++i) x[i] = g->beta[i] + s * rng.normal();
        if (body.contains(x)) return x;
    }
    throw EfficiencyError("exact_sample: Gaussian proposal rejection exceeded its iteration cap");
}

}  // namespace hitrun
