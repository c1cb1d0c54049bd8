#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bclab/curvature.hpp"
#include "bclab/spaces.hpp"

namespace bclab {

// Pairwise distances of a finite pointed metric space, row-major.
struct FinitePointedSample {
    std::size_t n = 0;
    std::size_t base = 0;
    std::vector<double> d;

    double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    double diameter() const;
    // Throws InputError unless square, symmetric, zero-diagonal and metric within 1e-9.
    void validate() const;
    FinitePointedSample scaled(double lambda) const;

    static FinitePointedSample from_points(const Space& space, const std::vector<Point>& pts, std::size_t base,
                                           double scale = 1.0);
    std::string to_csv() const;
    static FinitePointedSample from_csv(const std::string& text);
};

// Base point first, then count - 1 points of B(x, lambda radius); distances divided by lambda.
FinitePointedSample blowup_sample(const Space& space, const Point& x, double lambda, std::size_t count, double radius,
                                  std::uint64_t seed);

struct GhBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
    std::vector<std::size_t> correspondence;  // a index -> b index after padding
};

GhBounds gh_distance_bounds(const FinitePointedSample& a, const FinitePointedSample& b, std::size_t exact_limit = 8,
                            Exec exec = Exec::parallel);

struct IsometryVerdict {
    bool base = false;
    bool distortion = false;
    bool net = false;
    bool ok() const { return base && distortion && net; }
};

IsometryVerdict eps_isometry_check(const std::vector<std::size_t>& map, const FinitePointedSample& a,
                                   const FinitePointedSample& b, double eps);

struct DirectionWithLength {
    GeodesicSegment geodesic;
    double length = 1.0;
};

struct TangentDistance {
    double value = 0.0;
    double angle = 0.0;
    // |value^2 - (t^2 + s^2 - 2ts cos angle)|
    double relation_error = 0.0;
    std::vector<double> ratios;
};

// Blow-up metric between (gamma, t) and (eta, s); throws CurvatureViolation
// when the rescaled ratios fail to be monotone.
TangentDistance tangent_metric(const Space& space, const DirectionWithLength& u, const DirectionWithLength& v);

double direction_angle_metric(const Space& space, const DirectionWithLength& u, const DirectionWithLength& v);

struct DirectionPacking {
    std::size_t count = 0;
    std::size_t sampled = 0;
    double doubling = 0.0;
    // Doubling-constant bound on the eps/4 covering number.
    double bound = 0.0;
    // Greedy eps/4 net of the same samples.
    std::size_t direct = 0;
    bool within_bound = false;
};

DirectionPacking packing_directions(const Space& space, const Point& x, double l, double eps, std::size_t budget,
                                    std::uint64_t seed, Exec exec = Exec::parallel);

class FittedNorm {
public:
    int dim = 0;
    std::vector<Point> directions;  // unit chart vectors
    std::vector<double> radius;     // boundary of the unit ball along each direction
    std::vector<std::vector<double>> radius_by_scale;
    double drift = 0.0;
    double symmetry_error = 0.0;
    double convexity_excess = 0.0;
    // Relative error of the interpolant at held-out directions.
    double interpolation_error = 0.0;
    bool conical = true;
    bool symmetric = true;
    bool convex = true;

    double norm(std::span<const double> w) const;
    double radius_at(std::span<const double> u) const;
    NormFn as_function() const;

    void build_interpolant();

private:
    double inverse_radius(std::span<const double> u) const;
    std::vector<double> cos_coef_, sin_coef_;
    std::vector<double> sh_coef_;  // real spherical harmonics, dim 3
    double phase0_ = 0.0;
};

FittedNorm fit_norm(const Space& space, const Point& x, const std::vector<double>& scales, std::size_t directions,
                    std::uint64_t seed);

struct ConvexHypothesis {
    double p = 2.0;
    double constant = 1.0;
};

struct NormCertification {
    ResidualReport smooth;
    std::optional<ResidualReport> convex;
    // Residual shifts the interpolation error can cause; subtracted from the pass threshold.
    double smooth_allowance = 0.0;
    double convex_allowance = 0.0;
    bool smooth_ok = false;
    bool convex_ok = true;
};

NormCertification certify_norm(const FittedNorm& norm, double S, std::optional<ConvexHypothesis> convex,
                               std::size_t trials, std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace bclab
