#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bclab/core.hpp"

namespace bclab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CurvatureParams {
    double S = 1.0;
    double C = 0.0;
    double D = kInf;
    int n = 1;

    void validate() const;
};

enum class SpaceKind { lp, cone, sphere, product };

std::string kind_name(SpaceKind kind);

struct GeodesicSegment {
    Point start;
    Point end;
    double length = 0.0;
    // False when another minimizing segment with the same endpoints exists.
    bool unique = true;
    std::function<Point(double)> eval;

    Point at(double s) const;
    Point at_arclength(double t) const { return at(t / length); }
};

// A set of known measure containing some metric ball, with an exact sampler
// for its normalized measure.  Used by sample_ball (rejection) and by the
// Monte-Carlo volume estimator (hit fraction times measure).
struct Region {
    double measure = 0.0;
    std::function<Point(Rng&)> sample;
};

class Space {
public:
    virtual ~Space() = default;

    virtual SpaceKind kind() const = 0;
    virtual std::string label() const = 0;
    virtual std::size_t chart_dim() const = 0;
    virtual int dimension() const = 0;
    virtual CurvatureParams declared() const = 0;

    // Throws InputError on a malformed chart.
    virtual void validate(const Point& x) const = 0;
    // Unchecked hot path; use bclab::distance for validated access.
    virtual double distance(const Point& x, const Point& y) const = 0;
    // Throws DegenerateError when x == y.
    virtual GeodesicSegment geodesic(const Point& x, const Point& y) const = 0;

    virtual Point base_point() const = 0;
    // A random point of the region used for randomized configurations.
    virtual Point random_point(Rng& rng) const = 0;
    // A point at distance exactly d from x in a random direction, when one
    // is available inside the chart.
    virtual std::optional<Point> point_at_distance(const Point& x, double d, Rng& rng) const = 0;
    // Points at distance d from x in an ordered sweep of directions when the
    // tangent space is two-dimensional, random directions otherwise.
    virtual std::vector<Point> direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const;
    // Continues the geodesic from p through x by d past x.
    virtual std::optional<Point> extend(const Point& p, const Point& x, double d) const = 0;
    virtual Region region(const Point& center, double r) const = 0;
    // Largest radius whose ball around c stays inside the model.
    virtual double valid_radius(const Point& c) const { (void)c; return kInf; }

    // Linear tangent chart at a regular point: the point reached from x by
    // the chart vector w.  Empty at singular points.
    virtual std::optional<Point> chart_exp(const Point& x, std::span<const double> w) const = 0;
    virtual int tangent_dim() const { return dimension(); }
};

using SpacePtr = std::shared_ptr<const Space>;

class LpSpace final : public Space {
public:
    LpSpace(double p, int n);

    SpaceKind kind() const override { return SpaceKind::lp; }
    std::string label() const override;
    std::size_t chart_dim() const override { return static_cast<std::size_t>(n_); }
    int dimension() const override { return n_; }
    CurvatureParams declared() const override;
    void validate(const Point& x) const override;
    double distance(const Point& x, const Point& y) const override;
    GeodesicSegment geodesic(const Point& x, const Point& y) const override;
    Point base_point() const override { return Point(chart_dim(), 0.0); }
    Point random_point(Rng& rng) const override;
    std::optional<Point> point_at_distance(const Point& x, double d, Rng& rng) const override;
    std::vector<Point> direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const override;
    std::optional<Point> extend(const Point& p, const Point& x, double d) const override;
    Region region(const Point& center, double r) const override;
    std::optional<Point> chart_exp(const Point& x, std::span<const double> w) const override;

    double p() const { return p_; }
    double norm(std::span<const double> v) const { return lp_norm(v.data(), v.size(), p_); }

private:
    double p_;
    int n_;
};

class ConeSpace final : public Space {
public:
    explicit ConeSpace(double theta);

    SpaceKind kind() const override { return SpaceKind::cone; }
    std::string label() const override;
    std::size_t chart_dim() const override { return 2; }
    int dimension() const override { return 2; }
    CurvatureParams declared() const override { return {1.0, 0.0, kInf, 2}; }
    void validate(const Point& x) const override;
    double distance(const Point& x, const Point& y) const override;
    GeodesicSegment geodesic(const Point& x, const Point& y) const override;
    Point base_point() const override { return {0.0, 0.0}; }
    Point random_point(Rng& rng) const override;
    std::optional<Point> point_at_distance(const Point& x, double d, Rng& rng) const override;
    std::vector<Point> direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const override;
    std::optional<Point> extend(const Point& p, const Point& x, double d) const override;
    Region region(const Point& center, double r) const override;
    std::optional<Point> chart_exp(const Point& x, std::span<const double> w) const override;

    double theta() const { return theta_; }
    double wrap(double a) const;
    // Signed angular offset from a to b in (-theta/2, theta/2].
    double signed_gap(double a, double b) const;
    // Point of the development plane (x at polar angle 0) back on the cone.
    Point refold(const Point& x, double px, double py) const;

private:
    double theta_;
};

class SphereCap final : public Space {
public:
    explicit SphereCap(double cap_radius, double C = 0.0);

    SpaceKind kind() const override { return SpaceKind::sphere; }
    std::string label() const override;
    std::size_t chart_dim() const override { return 3; }
    int dimension() const override { return 2; }
    CurvatureParams declared() const override { return {1.0, C_, cap_, 2}; }
    void validate(const Point& x) const override;
    double distance(const Point& x, const Point& y) const override;
    GeodesicSegment geodesic(const Point& x, const Point& y) const override;
    Point base_point() const override { return {0.0, 0.0, 1.0}; }
    Point random_point(Rng& rng) const override;
    std::optional<Point> point_at_distance(const Point& x, double d, Rng& rng) const override;
    std::vector<Point> direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const override;
    std::optional<Point> extend(const Point& p, const Point& x, double d) const override;
    Region region(const Point& center, double r) const override;
    double valid_radius(const Point& c) const override;
    std::optional<Point> chart_exp(const Point& x, std::span<const double> w) const override;

    double cap_radius() const { return cap_; }
    double semiconvexity_constant() const { return C_; }
    bool inside(const Point& x) const;
    // Orthonormal tangent frame at x, fixed per point.
    void frame(const Point& x, Point& e1, Point& e2) const;
    Point exp(const Point& x, const Point& v) const;

private:
    double cap_;
    double C_;
};

class ProductSpace final : public Space {
public:
    explicit ProductSpace(std::vector<SpacePtr> factors);

    SpaceKind kind() const override { return SpaceKind::product; }
    std::string label() const override;
    std::size_t chart_dim() const override { return chart_dim_; }
    int dimension() const override;
    CurvatureParams declared() const override;
    void validate(const Point& x) const override;
    double distance(const Point& x, const Point& y) const override;
    GeodesicSegment geodesic(const Point& x, const Point& y) const override;
    Point base_point() const override;
    Point random_point(Rng& rng) const override;
    std::optional<Point> point_at_distance(const Point& x, double d, Rng& rng) const override;
    std::optional<Point> extend(const Point& p, const Point& x, double d) const override;
    Region region(const Point& center, double r) const override;
    double valid_radius(const Point& c) const override;
    std::optional<Point> chart_exp(const Point& x, std::span<const double> w) const override;

    const std::vector<SpacePtr>& factors() const { return factors_; }
    Point slice(const Point& x, std::size_t i) const;
    Point join(const std::vector<Point>& parts) const;

private:
    std::vector<SpacePtr> factors_;
    std::vector<std::size_t> offsets_;
    std::size_t chart_dim_ = 0;
};

SpacePtr make_lp(double p, int n);
SpacePtr make_euclidean(int n);
SpacePtr make_cone(double theta);
SpacePtr make_sphere_cap(double cap_radius, double C = 0.0);
SpacePtr make_product(SpacePtr a, SpacePtr b);

// Validated entry points.
double distance(const Space& space, const Point& x, const Point& y);
GeodesicSegment geodesic(const Space& space, const Point& x, const Point& y);
std::vector<Point> sample_ball(const Space& space, const Point& center, double r, std::size_t count,
                               std::uint64_t seed);

}  // namespace bclab
