#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bclab/curvature.hpp"
#include "bclab/spaces.hpp"
#include "bclab/strainers.hpp"
#include "bclab/tangent.hpp"

namespace bclab {

struct BallVolumeCurve {
    std::vector<double> radii;
    std::vector<double> volumes;
    std::vector<double> stderrs;
};

// Hit fraction against the enclosing region of each radius.  Chunked
// seeding makes the result independent of the thread count.
BallVolumeCurve mc_ball_volume(const Space& space, const Point& x, const std::vector<double>& radii,
                               std::size_t samples, std::uint64_t seed, Exec exec = Exec::parallel);

// v(r)/r^n non-increasing up to 3 combined standard errors between successive radii.
ResidualReport bishop_gromov_check(const BallVolumeCurve& curve, int n);

struct PackingCurve {
    std::vector<double> radii;
    std::vector<std::size_t> counts;
};

// Greedy maximal r-separated subset (pairwise distance >= r) in index order.
std::vector<std::size_t> greedy_packing(const Space& space, const std::vector<Point>& pts, double r);
std::size_t packing_number(const Space& space, const std::vector<Point>& pts, double r);
std::size_t packing_number(const FinitePointedSample& sample, double r);
PackingCurve packing_curve(const Space& space, const std::vector<Point>& pts, const std::vector<double>& radii);
// Packs samples of B(center, window + max r) and counts only members inside
// B(center, window), which removes the boundary term; pooled over replicates.
PackingCurve windowed_packing_curve(const Space& space, const Point& center, double window,
                                   const std::vector<double>& radii, std::size_t samples, std::size_t replicates,
                                   std::uint64_t seed);
// Least-squares slope of log count against log(1/r).
double rough_dimension(const PackingCurve& curve);

struct HausdorffEstimate {
    double value = 0.0;
    std::vector<double> by_level;
    std::size_t balls = 0;
    std::size_t cells = 0;
};

struct Box2 {
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
};

// Covering-sum estimate of the 2-dimensional Hausdorff measure of a region
// of the plane under the lp metric.  Disjoint lp balls are packed greedily
// on successively finer lattices, and the remainder is covered by grid cells.
// Only cells not yet inside a single ball are refined.
HausdorffEstimate hausdorff_measure_2d(const std::function<bool(double, double)>& inside, const Box2& box, double p,
                                       int levels);

struct ThresholdConstants {
    double L0 = 0.0;
    double S0 = 0.0;
    double L1 = 0.0;
    double S1 = 0.0;
    int N0 = 0;
    int M = 0;
    double C = 0.0;
    double K_bar = 0.0;
    double K = 0.0;
};

ThresholdConstants threshold_constants(double delta, double L_bar, int N0, double C);

struct ChainResult {
    bool found = false;
    std::vector<std::size_t> indices;
};

bool verify_chain(const FinitePointedSample& s, const std::vector<std::size_t>& chain, double L);
ChainResult geometric_chain(const FinitePointedSample& s, double L, int M);

// Covering constant: subsets of diameter D/(2L) needed for sampled sets of
// diameter D, measured by greedy covers of ball samples at two scales.
double measure_covering_constant(const Space& space, const Point& x, double L, const std::vector<double>& radii,
                                 std::size_t samples, std::uint64_t seed);

struct CylinderRegion {
    Point base;
    double rx = 0.0;
    double r = 0.0;
    std::vector<int> m;
    Strainer strainer;

    // Largest R for which the strainer is R-long at the base.
    double long_range(const Space& space) const;
    void validate(const Space& space) const;
};

bool cylinder_membership(const Space& space, const CylinderRegion& region, const Point& z);

struct SingularPacking {
    std::size_t sampled = 0;
    std::size_t members = 0;
    std::size_t strained = 0;
    std::size_t not_found = 0;
    std::size_t packing = 0;
    double bound = 0.0;
    bool within_bound = false;
};

SingularPacking singular_packing(const Space& space, const CurvatureParams& params, const CylinderRegion& region,
                                 double delta, std::size_t samples, std::uint64_t seed, double bound,
                                 Exec exec = Exec::parallel);

struct StrataSummary {
    std::size_t sampled = 0;
    std::size_t strained = 0;
    std::vector<Point> not_found;
    double fraction() const { return sampled ? static_cast<double>(strained) / static_cast<double>(sampled) : 0.0; }
};

// Operational membership in A(k, delta): find_strainer succeeds at each point.
StrataSummary strained_fraction(const Space& space, const CurvatureParams& params, const Point& center,
                                double radius, int k, double delta, double scale, std::size_t samples,
                                std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace bclab
