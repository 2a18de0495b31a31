#include "hitrun/logconcave1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "hitrun/errors.hpp"
#include "hitrun/normal.hpp"
#include "overloaded.hpp"

namespace hitrun::lc1d {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Unbounded supports are cut at mean +- kSpan standard deviations.
constexpr double kSpan = 60.0;
constexpr int kScanPoints = 24001;
constexpr int kQuadPanels = 4000;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {-0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
                                            -0.18343464249564980, 0.18343464249564980,  0.52553240991632899,
                                            0.79666647741362674,  0.96028985649753623};
constexpr std::array<double, 8> kGlWeights = {0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
                                              0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
                                              0.22238103445337447, 0.10122853629037626};

double finite_lo(const Density1D& d) {
    return std::isfinite(d.lo()) ? d.lo() : d.mean() - kSpan * std::sqrt(d.variance());
}

double finite_hi(const Density1D& d) {
    return std::isfinite(d.hi()) ? d.hi() : d.mean() + kSpan * std::sqrt(d.variance());
}

// Points where the density is not smooth.
void add_breakpoints(const Density1D& d, std::vector<double>& pts) {
    std::visit(Overloaded{
                   [&](const Gaussian&) {},
                   [&](const Uniform& u) {
                       pts.push_back(u.a);
                       pts.push_back(u.b);
                   },
                   [&](const Laplace& l) { pts.push_back(l.mean); },
                   [&](const Logistic&) {},
                   [&](const GridDensity& g) {
                       for (std::size_t i = 0; i <= g.grid.n_cells(); ++i) {
                           pts.push_back(g.grid.z_min() + static_cast<double>(i) * g.grid.spacing());
                       }
                   },
               },
               d.kind());
}

// Composite Gauss-Legendre over [lo, hi] split at `breaks` and into equal panels.
template <class F>
double integrate(F&& f, double lo, double hi, std::vector<double> breaks) {
    for (int k = 0; k <= kQuadPanels; ++k) breaks.push_back(lo + (hi - lo) * k / kQuadPanels);
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return x < lo || x > hi; }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double mid = 0.5 * (breaks[s] + breaks[s + 1]);
        const double half = 0.5 * (breaks[s + 1] - breaks[s]);
        double part = 0.0;
        for (std::size_t q = 0; q < kGlNodes.size(); ++q) part += kGlWeights[q] * f(mid + half * kGlNodes[q]);
        acc += half * part;
    }
    return acc;
}

void require_isotropic(const Density1D& d, const char* what) {
    if (!d.isotropic(1e-6)) {
        throw UsageError(std::string(what) + ": density must be isotropic (mean 0, variance 1); standardize first");
    }
}

// Central difference where possible; grid densities difference across a cell.
double slope(const Density1D& d, double x) {
    double h = 1e-6 * std::max(1.0, std::abs(x));
    if (const auto* g = std::get_if<GridDensity>(&d.kind())) h = g->grid.spacing();
    const double lo = d.lo();
    const double hi = d.hi();
    if (x - h >= lo && x + h <= hi) return (d.pdf(x + h) - d.pdf(x - h)) / (2.0 * h);
    if (x + h <= hi) return (d.pdf(x + h) - d.pdf(x)) / h;
    return (d.pdf(x) - d.pdf(x - h)) / h;
}

}  // namespace

//---------------------------------------------------------------------------//
// Density1D
//---------------------------------------------------------------------------//

Density1D::Density1D(Kind kind) : kind_(std::move(kind)) {}

Density1D Density1D::gaussian(double mean, double sd) {
    if (!(sd > 0.0)) throw UsageError("gaussian: sd must be positive");
    return Density1D(Gaussian{mean, sd});
}

Density1D Density1D::uniform(double a, double b) {
    if (!(a < b)) throw UsageError("uniform: need a < b");
    return Density1D(Uniform{a, b});
}

Density1D Density1D::laplace(double mean, double scale) {
    if (!(scale > 0.0)) throw UsageError("laplace: scale must be positive");
    return Density1D(Laplace{mean, scale});
}

Density1D Density1D::logistic(double mean, double scale) {
    if (!(scale > 0.0)) throw UsageError("logistic: scale must be positive");
    return Density1D(Logistic{mean, scale});
}

Density1D Density1D::from_grid(Grid1D grid) {
    const std::size_t n = grid.n_cells();
    std::vector<double> cum(n + 1, 0.0);
    std::vector<double> up(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + grid.mass()[i];
    for (std::size_t i = n; i-- > 0;) up[i] = up[i + 1] + grid.mass()[i];
    return Density1D(GridDensity{std::move(grid), std::move(cum), std::move(up)});
}

std::string Density1D::name() const {
    return std::visit(Overloaded{
                          [](const Gaussian&) { return std::string("gaussian"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const Laplace&) { return std::string("laplace"); },
                          [](const Logistic&) { return std::string("logistic"); },
                          [](const GridDensity&) { return std::string("grid"); },
                      },
                      kind_);
}

double Density1D::pdf(double x) const {
    return std::visit(Overloaded{
                          [&](const Gaussian& g) { return normal::pdf((x - g.mean) / g.sd) / g.sd; },
                          [&](const Uniform& u) { return (x < u.a || x > u.b) ? 0.0 : 1.0 / (u.b - u.a); },
                          [&](const Laplace& l) { return std::exp(-std::abs(x - l.mean) / l.scale) / (2.0 * l.scale); },
                          [&](const Logistic& l) {
                              const double e = std::exp(-std::abs(x - l.mean) / l.scale);
                              return e / (l.scale * (1.0 + e) * (1.0 + e));
                          },
                          [&](const GridDensity& g) {
                              if (x < g.grid.z_min() || x > g.grid.z_max()) return 0.0;
                              const double h = g.grid.spacing();
                              const auto i = std::min(static_cast<std::size_t>((x - g.grid.z_min()) / h),
                                                      g.grid.n_cells() - 1);
                              return g.grid.mass()[i] / h;
                          },
                      },
                      kind_);
}

double Density1D::cdf(double x) const {
    return std::visit(Overloaded{
                          [&](const Gaussian& g) { return normal::cdf((x - g.mean) / g.sd); },
                          [&](const Uniform& u) { return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0); },
                          [&](const Laplace& l) {
                              const double z = (x - l.mean) / l.scale;
                              return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
                          },
                          [&](const Logistic& l) { return 1.0 / (1.0 + std::exp(-(x - l.mean) / l.scale)); },
                          [&](const GridDensity& g) {
                              if (x <= g.grid.z_min()) return 0.0;
                              if (x >= g.grid.z_max()) return 1.0;
                              const double h = g.grid.spacing();
                              const double pos = (x - g.grid.z_min()) / h;
                              const auto i = std::min(static_cast<std::size_t>(pos), g.grid.n_cells() - 1);
                              return g.cumulative[i] + g.grid.mass()[i] * (pos - static_cast<double>(i));
                          },
                      },
                      kind_);
}

double Density1D::sf(double x) const {
    return std::visit(Overloaded{
                          [&](const Gaussian& g) { return normal::sf((x - g.mean) / g.sd); },
                          [&](const Uniform& u) { return std::clamp((u.b - x) / (u.b - u.a), 0.0, 1.0); },
                          [&](const Laplace& l) {
                              const double z = (x - l.mean) / l.scale;
                              return z > 0.0 ? 0.5 * std::exp(-z) : 1.0 - 0.5 * std::exp(z);
                          },
                          [&](const Logistic& l) { return 1.0 / (1.0 + std::exp((x - l.mean) / l.scale)); },
                          [&](const GridDensity& g) {
                              if (x <= g.grid.z_min()) return 1.0;
                              if (x >= g.grid.z_max()) return 0.0;
                              const double h = g.grid.spacing();
                              const double pos = (x - g.grid.z_min()) / h;
                              const auto i = std::min(static_cast<std::size_t>(pos), g.grid.n_cells() - 1);
                              return g.upper[i + 1] + g.grid.mass()[i] * (static_cast<double>(i + 1) - pos);
                          },
                      },
                      kind_);
}

double Density1D::mean() const {
    return std::visit(Overloaded{
                          [](const Gaussian& g) { return g.mean; },
                          [](const Uniform& u) { return 0.5 * (u.a + u.b); },
                          [](const Laplace& l) { return l.mean; },
                          [](const Logistic& l) { return l.mean; },
                          [](const GridDensity& g) { return g.grid.mean(); },
                      },
                      kind_);
}

double Density1D::variance() const {
    return std::visit(Overloaded{
                          [](const Gaussian& g) { return g.sd * g.sd; },
                          [](const Uniform& u) { return (u.b - u.a) * (u.b - u.a) / 12.0; },
                          [](const Laplace& l) { return 2.0 * l.scale * l.scale; },
                          [](const Logistic& l) { return std::numbers::pi * std::numbers::pi * l.scale * l.scale / 3.0; },
                          [](const GridDensity& g) {
                              // Within-cell uniform spread adds h^2/12.
                              const double h = g.grid.spacing();
                              return g.grid.variance() + h * h / 12.0;
                          },
                      },
                      kind_);
}

double Density1D::lo() const {
    if (const auto* u = std::get_if<Uniform>(&kind_)) return u->a;
    if (const auto* g = std::get_if<GridDensity>(&kind_)) return g->grid.z_min();
    return -kInf;
}

double Density1D::hi() const {
    if (const auto* u = std::get_if<Uniform>(&kind_)) return u->b;
    if (const auto* g = std::get_if<GridDensity>(&kind_)) return g->grid.z_max();
    return kInf;
}

bool Density1D::isotropic(double tol) const { return std::abs(mean()) <= tol && std::abs(variance() - 1.0) <= tol; }

double Density1D::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("quantile: p must lie in (0, 1)");
    // Bracket from the logconcave tail bound P(|X - m| >= t sd) <= e^{1 - t}.
    const double sd = std::sqrt(variance());
    const double t0 = 1.0 + std::log(1.0 / std::min(p, 1.0 - p));
    double a = std::isfinite(lo()) ? lo() : mean() - t0 * sd;
    double b = std::isfinite(hi()) ? hi() : mean() + t0 * sd;
    while (cdf(a) > p) a -= (b - a);
    while (cdf(b) < p) b += (b - a);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (a + b);
        const double f = cdf(mid);
        if (std::abs(f - p) <= 1e-12 || mid == a || mid == b) return mid;
        if (f < p) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

Density1D standardize(const Density1D& d) {
    const double var = d.variance();
    if (!(var > 0.0) || !std::isfinite(var)) throw DegenerateDataError("standardize: variance is zero or not finite");
    const double m = d.mean();
    const double sd = std::sqrt(var);
    return std::visit(Overloaded{
                          [](const Gaussian&) { return Density1D::gaussian(0.0, 1.0); },
                          [&](const Uniform& u) { return Density1D::uniform((u.a - m) / sd, (u.b - m) / sd); },
                          [](const Laplace&) { return Density1D::laplace(0.0, 1.0 / std::sqrt(2.0)); },
                          [](const Logistic&) { return Density1D::logistic(0.0, std::sqrt(3.0) / std::numbers::pi); },
                          [&](const GridDensity& g) {
                              return Density1D::from_grid(
                                  Grid1D((g.grid.z_min() - m) / sd, (g.grid.z_max() - m) / sd, g.grid.mass()));
                          },
                      },
                      d.kind());
}

std::vector<Density1D> standard_library() {
    return {standardize(Density1D::gaussian(0.0, 1.0)), standardize(Density1D::uniform(0.0, 1.0)),
            standardize(Density1D::laplace(0.0, 1.0)), standardize(Density1D::logistic(0.0, 1.0))};
}

Density1D fit_grid(const Density1D& d, std::size_t n_cells) {
    if (n_cells < Grid1D::kMinCells) throw UsageError("fit_grid: need at least 64 cells");
    const double lo = std::isfinite(d.lo()) ? d.lo() : d.quantile(1e-12);
    const double hi = std::isfinite(d.hi()) ? d.hi() : d.quantile(1.0 - 1e-12);
    const double h = (hi - lo) / static_cast<double>(n_cells);
    std::vector<double> mass(n_cells);
    double total = 0.0;
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double left = lo + static_cast<double>(i) * h;
        // Upper-tail cells difference the survival function to avoid cancellation near 1.
        const double diff = left >= d.mean() ? d.sf(left) - d.sf(left + h) : d.cdf(left + h) - d.cdf(left);
        mass[i] = std::max(0.0, diff);
        total += mass[i];
    }
    for (double& m : mass) m /= total;
    return Density1D::from_grid(Grid1D(lo, hi, std::move(mass)));
}

double total_mass(const Density1D& d) {
    std::vector<double> breaks;
    add_breakpoints(d, breaks);
    return integrate([&](double x) { return d.pdf(x); }, finite_lo(d), finite_hi(d), std::move(breaks));
}

double max_log_second_difference(const Density1D& d, std::size_t n_points) {
    if (n_points < 3) throw UsageError("max_log_second_difference: need at least 3 points");
    const double lo = std::isfinite(d.lo()) ? d.lo() : d.quantile(1e-6);
    const double hi = std::isfinite(d.hi()) ? d.hi() : d.quantile(1.0 - 1e-6);
    const double h = (hi - lo) / static_cast<double>(n_points + 1);
    double worst = -kInf;
    for (std::size_t i = 2; i < n_points; ++i) {
        const double x = lo + static_cast<double>(i) * h;
        const double v = std::log(d.pdf(x + h)) - 2.0 * std::log(d.pdf(x)) + std::log(d.pdf(x - h));
        worst = std::max(worst, v);
    }
    return worst;
}

//---------------------------------------------------------------------------//
// Checks
//---------------------------------------------------------------------------//

CheckResult check_max_density(const Density1D& d) {
    require_isotropic(d, "check_max_density");
    const double lo = std::max(finite_lo(d), -12.0);
    const double hi = std::min(finite_hi(d), 12.0);
    CheckResult r{"max_density", -kInf, 1.0, 0.0, false};
    for (int k = 0; k < kScanPoints; ++k) {
        const double x = lo + (hi - lo) * k / (kScanPoints - 1);
        const double p = d.pdf(x);
        if (p > r.value) {
            r.value = p;
            r.at = x;
        }
    }
    r.pass = r.value <= r.bound + kClosedFormTol;
    return r;
}

CheckResult check_density_at_zero(const Density1D& d) {
    require_isotropic(d, "check_density_at_zero");
    CheckResult r{"density_at_zero", d.pdf(0.0), 0.125, 0.0, false};
    r.pass = r.value >= r.bound - kClosedFormTol;
    return r;
}

CheckResult check_tail(const Density1D& d, std::span<const double> t_grid) {
    require_isotropic(d, "check_tail");
    if (t_grid.empty()) throw UsageError("check_tail: empty t grid");
    CheckResult r{"tail", 0.0, 0.0, 0.0, true};
    double worst_margin = kInf;
    for (double t : t_grid) {
        if (!(t >= 0.0)) throw UsageError("check_tail: t must be nonnegative");
        const double mass = std::min(1.0, d.cdf(-t) + d.sf(t));
        const double bound = std::exp(1.0 - t);
        if (bound - mass < worst_margin) {
            worst_margin = bound - mass;
            r.value = mass;
            r.bound = bound;
            r.at = t;
        }
        if (mass > bound + kClosedFormTol) r.pass = false;
    }
    return r;
}

QuantileCheck check_quantile_density(const Density1D& d, double delta) {
    if (!(delta > 0.0 && delta <= 1.0 / std::numbers::e)) throw UsageError("check_quantile_density: need 0 < delta <= 1/e");
    require_isotropic(d, "check_quantile_density");
    QuantileCheck q;
    q.a = d.quantile(delta);
    q.b = d.quantile(1.0 - delta);

    q.density = CheckResult{"quantile_density", kInf, delta / (8.0 * std::numbers::e), q.a, false};
    constexpr int kPoints = 2001;
    for (int k = 0; k < kPoints; ++k) {
        const double x = q.a + (q.b - q.a) * k / (kPoints - 1);
        const double p = d.pdf(x);
        if (p < q.density.value) {
            q.density.value = p;
            q.density.at = x;
        }
    }
    q.density.pass = q.density.value >= q.density.bound - kClosedFormTol;

    const double sa = std::abs(slope(d, q.a));
    const double sb = std::abs(slope(d, q.b));
    q.derivative = CheckResult{"quantile_derivative", std::max(sa, sb), 2.0 / delta, sa >= sb ? q.a : q.b, false};
    q.derivative.pass = q.derivative.value <= q.derivative.bound + kQuadratureTol;
    return q;
}

CheckResult cheeger_1d(const Density1D& d) {
    require_isotropic(d, "cheeger_1d");
    const double lo = std::isfinite(d.lo()) ? d.lo() : d.quantile(1e-9);
    const double hi = std::isfinite(d.hi()) ? d.hi() : d.quantile(1.0 - 1e-9);
    CheckResult r{"cheeger", kInf, std::log(2.0) / 2.0, 0.0, false};
    for (int k = 1; k < kScanPoints - 1; ++k) {
        const double c = lo + (hi - lo) * k / (kScanPoints - 1);
        const double m = std::min(d.cdf(c), d.sf(c));
        if (!(m > 0.0)) continue;
        const double ratio = d.pdf(c) / m;
        if (ratio < r.value) {
            r.value = ratio;
            r.at = c;
        }
    }
    r.pass = r.value >= r.bound - kQuadratureTol;
    return r;
}

double tv_distance(const Density1D& p, const Density1D& q) {
    std::vector<double> breaks;
    add_breakpoints(p, breaks);
    add_breakpoints(q, breaks);
    const double lo = std::min(finite_lo(p), finite_lo(q));
    const double hi = std::max(finite_hi(p), finite_hi(q));
    // |p - q| has a kink wherever the densities cross; locate crossings on the
    // panel grid and refine them by bisection.
    auto diff = [&](double x) { return p.pdf(x) - q.pdf(x); };
    double x0 = lo;
    double f0 = diff(x0);
    for (int k = 1; k <= kQuadPanels; ++k) {
        const double x1 = lo + (hi - lo) * k / kQuadPanels;
        const double f1 = diff(x1);
        if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
            double a = x0, b = x1, fa = f0;
            for (int it = 0; it < 100 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = diff(mid);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            breaks.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    return 0.5 * integrate([&](double x) { return std::abs(diff(x)); }, lo, hi, std::move(breaks));
}

OverlapCheck interval_overlap_check(const Density1D& p, const Density1D& p_tilde, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw UsageError("interval_overlap_check: need 0 < delta < 1/2");
    require_isotropic(p, "interval_overlap_check");
    OverlapCheck out;
    out.tv = tv_distance(p, p_tilde);
    out.tv_limit = delta * delta / 1e5;
    if (!(out.tv < out.tv_limit)) {
        throw PreconditionError("interval_overlap_check: TV " + std::to_string(out.tv) + " is not below delta^2/1e5");
    }
    out.a = p.quantile(delta);
    out.b = p.quantile(1.0 - delta);
    out.min_ratio = kInf;
    constexpr int kPoints = 2001;
    for (int k = 0; k < kPoints; ++k) {
        const double z = out.a + (out.b - out.a) * k / (kPoints - 1);
        out.min_ratio = std::min(out.min_ratio, p_tilde.pdf(z) / p.pdf(z));
    }
    out.pass = out.min_ratio > 0.9;
    return out;
}

}  // namespace hitrun::lc1d
