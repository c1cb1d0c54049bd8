#include "bclab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bclab {

namespace {

constexpr double kClampTol = 1e-9;
constexpr double kMonotoneTol = 1e-9;
constexpr double kStopGap = 1e-10;
// angle_from_point extrapolates, so it can stop on a much smaller gap.
constexpr double kExtrapolatedGap = 1e-14;
constexpr double kRoundoffFloor = 1e-9;
constexpr std::size_t kMaxOrder = 3;
constexpr int kMaxHalvings = 48;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double clamp_cos(double v, bool* clamped) {
    if (clamped && std::abs(v) > 1.0 + kClampTol) *clamped = true;
    return std::clamp(v, -1.0, 1.0);
}

double arccos_budget(double num, bool* clamped) { return std::acos(clamp_cos(1.0 - num, clamped)); }

}  // namespace

double comparison_cosine(double a, double b, double c, bool* clamped) {
    // (a^2 + b^2 - c^2) / 2ab written to keep the near-degenerate cases accurate.
    const double v = ((a - c) * (a + c) + b * b) / (2.0 * a * b);
    return clamp_cos(v, clamped);
}

double comparison_angle(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0)) throw DegenerateError("comparison_angle: vertex side of zero length");
    // Kahan's needle-safe form; acos loses half the digits near 0 and pi.
    if (a < b) std::swap(a, b);
    if (c >= a + b) return kPi;
    if (c <= a - b) return 0.0;
    const double mu = (b >= c) ? c - (a - b) : b - (a - c);
    const double num = ((a - b) + c) * mu, den = (a + (b + c)) * ((a - c) + b);
    if (!(den > 0.0)) return kPi;
    return 2.0 * std::atan(std::sqrt(std::max(0.0, num) / den));
}

std::array<double, 3> ComparisonTriangle::angles() const {
    // a = |xy|, b = |xz|, c = |yz|
    const double ax = comparison_angle(a, b, c);
    const double ay = comparison_angle(a, c, b);
    const double az = comparison_angle(b, c, a);
    return {ax, ay, az};
}

double delta_S(double S, double t, double d, bool* clamped) {
    return arccos_budget((S - 1.0) * t / (2.0 * d), clamped);
}

double delta_C(double C, double t, double d, bool* clamped) {
    return arccos_budget((C + 1.0) * t / (2.0 * d), clamped);
}

double bar_delta_S(double S, double r, double d, bool* clamped) { return arccos_budget(S * r / (2.0 * d), clamped); }

double bar_delta_SC(double S, double C, double r, double t, bool* clamped) {
    return arccos_budget((S + C) * r / (2.0 * t), clamped);
}

ErrorBudget error_functions(const CurvatureParams& params, double t, double d) {
    if (!(d > 0.0)) throw DomainError("error_functions: d must be > 0");
    if (!(t >= 0.0)) throw DomainError("error_functions: t must be >= 0");
    ErrorBudget e;
    e.delta_S = delta_S(params.S, t, d, &e.clamped);
    e.delta_C = delta_C(params.C, t, d, &e.clamped);
    e.bar_delta_S = bar_delta_S(params.S, t, d, &e.clamped);
    e.bar_delta_SC = bar_delta_SC(params.S, params.C, t, d, &e.clamped);
    return e;
}

AngleEstimate angle_from_point(const Space& space, const CurvatureParams& params, const Point& p,
                               const GeodesicSegment& xi, AngleMode mode) {
    const Point& x = xi.start;
    const double a = space.distance(p, x);
    if (!(a > 0.0)) throw DegenerateError("angle_from_point: p coincides with the geodesic start");
    if (!(xi.length > 0.0)) throw DegenerateError("angle_from_point: degenerate geodesic");
    if (mode == AngleMode::semi_convex && !(a < params.D))
        throw DomainError("angle_from_point: |px| must be below the semi-convexity radius");

    const double coef = (mode == AngleMode::s_concave) ? params.S : -params.C;
    const double t0 = std::min(xi.length, 0.25 * a);
    double coord = 0.0;
    for (double v : p) coord = std::max(coord, std::abs(v));
    for (double v : x) coord = std::max(coord, std::abs(v));

    AngleEstimate est;
    // Neville table for an expansion in integer powers of t, capped at
    // order kMaxOrder; its diagonal is the running limit estimate.
    std::vector<double> prev_row, row;
    double limit = 0.0, gap = std::numeric_limits<double>::infinity(), cos_error = 0.0;
    for (int j = 0; j <= kMaxHalvings; ++j) {
        const double t = std::ldexp(t0, -j);
        const double b = space.distance(p, xi.at_arclength(t));
        const double q = ((a - b) * (a + b) + coef * t * t) / (2.0 * t * a);
        if (!est.cosines.empty()) {
            const double prev = est.cosines.back();
            const bool ok = (mode == AngleMode::s_concave) ? (q <= prev + kMonotoneTol) : (q >= prev - kMonotoneTol);
            if (!ok) {
                est.monotone_ok = false;
                throw CurvatureViolation("angle_from_point: cosine quotient not monotone; declared curvature "
                                         "parameters fail at this configuration");
            }
        }
        est.grid.push_back(t);
        est.cosines.push_back(q);
        row.assign(1, q);
        for (std::size_t m = 1; m <= prev_row.size() && m <= kMaxOrder; ++m) {
            const double f = std::ldexp(1.0, static_cast<int>(m));
            row.push_back((f * row[m - 1] - prev_row[m - 1]) / (f - 1.0));
        }
        const double next = row.back();
        if (j > 0) gap = std::abs(next - limit);
        limit = next;
        prev_row.swap(row);
        // Roundoff of the quotient: distances carry a few ulps of |px| plus
        // the chart coordinates they were computed from.
        const double noise = 8.0 * kEps * (a + coord) / t;
        cos_error = noise;
        if (j >= 2 && gap < std::max(kExtrapolatedGap, 10.0 * noise)) break;
        if (noise > kRoundoffFloor) break;
    }
    est.residual = std::isfinite(gap) ? gap : 0.0;
    est.value = std::acos(clamp_cos(limit, &est.clamped));
    // acos is square-root singular at 0 and pi.
    const double e = cos_error + est.residual;
    est.uncertainty = std::min(std::sqrt(2.0 * e), e / std::max(std::sin(est.value), 1e-300));
    return est;
}

FixedScaleTrace fixed_scale_trace(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                                  double t, double s) {
    if (!(t > 0.0) || !(s > 0.0)) throw InputError("angle_fixed_scale: scales must be > 0");
    if (space.distance(gamma.start, eta.start) > 1e-12)
        throw InputError("angle_fixed_scale: geodesics must share their start point");
    if (!(gamma.length > 0.0) || !(eta.length > 0.0)) throw DegenerateError("angle_fixed_scale: degenerate geodesic");
    const double theta0 = std::min({1.0, gamma.length / t, eta.length / s});
    FixedScaleTrace tr;
    for (int j = 0; j <= kMaxHalvings; ++j) {
        const double th = std::ldexp(theta0, -j);
        const double c = space.distance(gamma.at_arclength(th * t), eta.at_arclength(th * s));
        const double ratio = c / th;
        const double cs = comparison_cosine(t, s, ratio, &tr.clamped);
        if (!tr.cosine.empty() && cs > tr.cosine.back() + kMonotoneTol) tr.monotone_ok = false;
        tr.theta.push_back(th);
        tr.ratio.push_back(ratio);
        tr.cosine.push_back(cs);
        if (tr.cosine.size() >= 2 && std::abs(cs - tr.cosine[tr.cosine.size() - 2]) < kStopGap) break;
    }
    return tr;
}

AngleEstimate angle_fixed_scale(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                                double t, double s) {
    const FixedScaleTrace tr = fixed_scale_trace(space, gamma, eta, t, s);
    if (!tr.monotone_ok)
        throw CurvatureViolation("angle_fixed_scale: comparison angle decreased under rescaling; Busemann "
                                 "concavity fails at this configuration");
    AngleEstimate est;
    est.grid = tr.theta;
    est.cosines = tr.cosine;
    est.clamped = tr.clamped;
    const std::size_t n = tr.cosine.size();
    est.residual = n >= 2 ? std::abs(tr.cosine[n - 1] - tr.cosine[n - 2]) : 0.0;
    est.value = comparison_angle(t, s, tr.ratio.back());
    return est;
}

DerivativeEstimate distance_derivative(const Space& space, const CurvatureParams& params, const Point& p,
                                       const GeodesicSegment& xi, AngleMode mode) {
    const AngleEstimate ang = angle_from_point(space, params, p, xi, mode);
    DerivativeEstimate out;
    out.value = -std::cos(ang.value);

    const double f0 = space.distance(p, xi.start);
    auto diff = [&](double h) { return (space.distance(p, xi.at_arclength(2.0 * h)) - f0) / (2.0 * h); };
    const double h0 = std::min(0.125 * xi.length, 0.0625 * f0);
    double prev_d = diff(h0), prev_r = prev_d, best = prev_d;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 30; ++k) {
        const double h = std::ldexp(h0, -k);
        if (4.0 * kEps * f0 / h > 1e-9) break;
        const double d = diff(h);
        const double r = 2.0 * d - prev_d;
        const double g = std::abs(r - prev_r);
        if (k >= 2 && g < best_gap) {
            best_gap = g;
            best = r;
        }
        prev_d = d;
        prev_r = r;
    }
    out.finite_difference = best;
    out.mismatch = std::abs(out.finite_difference - out.value) > 1e-5;
    return out;
}

}  // namespace bclab
