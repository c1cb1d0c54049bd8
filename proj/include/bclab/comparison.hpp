#pragma once

#include <array>
#include <vector>

#include "bclab/spaces.hpp"

namespace bclab {

// Sides of a Euclidean comparison triangle with vertex x:
// a = |xy|, b = |xz|, c = |yz|.
struct ComparisonTriangle {
    double a = 0.0, b = 0.0, c = 0.0;

    // Angles at x, y, z.
    std::array<double, 3> angles() const;
};

// Cosine of the angle at the vertex between sides a and b, clamped to
// [-1, 1].  `clamped` is set when the raw value left [-1-1e-9, 1+1e-9].
double comparison_cosine(double a, double b, double c, bool* clamped = nullptr);
// Throws DegenerateError when a or b vanishes.
double comparison_angle(double a, double b, double c);

struct ErrorBudget {
    double delta_S = 0.0;
    double delta_C = 0.0;
    double bar_delta_S = 0.0;
    double bar_delta_SC = 0.0;
    bool clamped = false;
};

double delta_S(double S, double t, double d, bool* clamped = nullptr);
double delta_C(double C, double t, double d, bool* clamped = nullptr);
double bar_delta_S(double S, double r, double d, bool* clamped = nullptr);
double bar_delta_SC(double S, double C, double r, double t, bool* clamped = nullptr);
// All four budgets evaluated at the same (t, d); throws DomainError for d = 0.
ErrorBudget error_functions(const CurvatureParams& params, double t, double d);

enum class AngleMode { s_concave, semi_convex };

struct AngleEstimate {
    double value = 0.0;
    std::vector<double> grid;
    std::vector<double> cosines;
    double residual = 0.0;
    // Error bar on value from roundoff and the last extrapolation gap.
    double uncertainty = 0.0;
    bool monotone_ok = true;
    bool clamped = false;
};

// Angle at xi(0) between the geodesic xi and the point p, as the monotone
// limit of the curvature-adjusted cosine quotient.
AngleEstimate angle_from_point(const Space& space, const CurvatureParams& params, const Point& p,
                               const GeodesicSegment& xi, AngleMode mode = AngleMode::s_concave);

// Limit of comparison angles at the common start of gamma and eta under
// simultaneous rescaling of the side lengths t and s.
AngleEstimate angle_fixed_scale(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                                double t, double s);

struct FixedScaleTrace {
    std::vector<double> theta;
    std::vector<double> ratio;  // |gamma(theta t) eta(theta s)| / theta
    std::vector<double> cosine;
    bool monotone_ok = true;
    bool clamped = false;
};

FixedScaleTrace fixed_scale_trace(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                                  double t, double s);

struct DerivativeEstimate {
    double value = 0.0;
    double finite_difference = 0.0;
    bool mismatch = false;
};

DerivativeEstimate distance_derivative(const Space& space, const CurvatureParams& params, const Point& p,
                                       const GeodesicSegment& xi, AngleMode mode = AngleMode::s_concave);

}  // namespace bclab
