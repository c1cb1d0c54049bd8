#include <gtest/gtest.h>

#include <cmath>

#include "bclab/spaces.hpp"

using namespace bclab;

namespace {

std::vector<SpacePtr> all_models() {
    return {make_euclidean(1), make_euclidean(2), make_lp(3, 2), make_lp(4, 3), make_cone(3.0), make_cone(4.0),
            make_cone(5.0), make_sphere_cap(1.0, 0.5), make_product(make_lp(3, 1), make_cone(4.0))};
}

double chord_angle(const Point& x, const Point& y) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return 2.0 * std::asin(0.5 * std::sqrt(s));
}

}  // namespace

TEST(LpSpace, DistanceMatchesCoordinateFormula) {
    Rng rng(3);
    for (double p : {2.0, 3.0, 4.0, 7.5}) {
        auto s = make_lp(p, 3);
        for (int i = 0; i < 200; ++i) {
            Point x = s->random_point(rng), y = s->random_point(rng);
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += std::pow(std::abs(x[k] - y[k]), p);
            EXPECT_NEAR(s->distance(x, y), std::pow(acc, 1.0 / p), 1e-13);
        }
    }
}

TEST(LpSpace, RejectsBadParameters) {
    EXPECT_THROW(make_lp(1.5, 2), InputError);
    EXPECT_THROW(make_lp(3.0, 0), InputError);
    EXPECT_THROW(make_lp(INFINITY, 2), InputError);
}

TEST(ConeSpace, DistanceMatchesDevelopment) {
    const double theta = 4.0;
    auto s = make_cone(theta);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        Point x = s->random_point(rng), y = s->random_point(rng);
        double g = std::abs(x[1] - y[1]);
        g = std::min(g, theta - g);
        const double expect = g >= kPi ? x[0] + y[0]
                                       : std::sqrt(x[0] * x[0] + y[0] * y[0] - 2.0 * x[0] * y[0] * std::cos(g));
        EXPECT_NEAR(s->distance(x, y), expect, 1e-12);
    }
}

TEST(ConeSpace, ApexDistanceIsRadius) {
    auto s = make_cone(3.0);
    EXPECT_DOUBLE_EQ(s->distance({0.0, 0.0}, {2.5, 1.0}), 2.5);
}

TEST(ConeSpace, OppositePointsHaveTwoSegments) {
    auto s = make_cone(5.0);
    EXPECT_FALSE(geodesic(*s, {1.0, 0.0}, {1.0, 2.5}).unique);
    EXPECT_TRUE(geodesic(*s, {1.0, 0.0}, {1.0, 1.0}).unique);
}

TEST(ConeSpace, ValidatesChart) {
    auto s = make_cone(4.0);
    EXPECT_THROW(s->validate({-1.0, 0.0}), InputError);
    EXPECT_THROW(s->validate({1.0, 4.0}), InputError);
    EXPECT_THROW(make_cone(7.0), InputError);
}

TEST(SphereCap, DistanceMatchesChordFormula) {
    auto s = make_sphere_cap(1.2);
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        Point x = s->random_point(rng), y = s->random_point(rng);
        EXPECT_NEAR(s->distance(x, y), chord_angle(x, y), 1e-12);
    }
}

TEST(SphereCap, RejectsPointsOutsideCap) {
    auto s = make_sphere_cap(0.5);
    EXPECT_THROW(s->validate({1.0, 0.0, 0.0}), InputError);
    EXPECT_THROW(s->validate({0.0, 0.0, 2.0}), InputError);
    EXPECT_THROW(sample_ball(*s, s->base_point(), 0.8, 10, 1), RangeError);
}

TEST(ProductSpace, DistanceIsPythagorean) {
    auto a = make_lp(3, 1);
    auto b = make_cone(4.0);
    auto s = make_product(a, b);
    auto* prod = dynamic_cast<const ProductSpace*>(s.get());
    ASSERT_NE(prod, nullptr);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        Point x = s->random_point(rng), y = s->random_point(rng);
        const double d1 = a->distance(prod->slice(x, 0), prod->slice(y, 0));
        const double d2 = b->distance(prod->slice(x, 1), prod->slice(y, 1));
        EXPECT_NEAR(s->distance(x, y), std::hypot(d1, d2), 1e-12);
    }
    EXPECT_EQ(s->dimension(), 3);
}

TEST(AllModels, TriangleInequalityAndSymmetry) {
    for (const auto& s : all_models()) {
        Rng rng(17);
        for (int i = 0; i < 300; ++i) {
            Point x = s->random_point(rng), y = s->random_point(rng), z = s->random_point(rng);
            const double xy = s->distance(x, y), yz = s->distance(y, z), xz = s->distance(x, z);
            EXPECT_LE(xz, xy + yz + 1e-12) << s->label();
            EXPECT_NEAR(xy, s->distance(y, x), 1e-13) << s->label();
            EXPECT_EQ(s->distance(x, x), 0.0) << s->label();
        }
    }
}

TEST(AllModels, GeodesicsAreDistanceMinimizing) {
    for (const auto& s : all_models()) {
        Rng rng(23);
        for (int i = 0; i < 100; ++i) {
            Point x = s->random_point(rng), y = s->random_point(rng);
            const auto g = geodesic(*s, x, y);
            EXPECT_NEAR(g.length, s->distance(x, y), 1e-13);
            for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
                const Point m = g.at(t);
                EXPECT_NEAR(s->distance(x, m), t * g.length, 1e-10 * (1.0 + g.length)) << s->label();
                EXPECT_NEAR(s->distance(m, y), (1.0 - t) * g.length, 1e-10 * (1.0 + g.length)) << s->label();
            }
        }
    }
}

TEST(AllModels, DegenerateGeodesicThrows) {
    for (const auto& s : all_models()) {
        const Point x = s->base_point();
        EXPECT_THROW(geodesic(*s, x, x), DegenerateError) << s->label();
    }
}

TEST(AllModels, PointAtDistanceAndExtend) {
    for (const auto& s : all_models()) {
        Rng rng(29);
        const Point x = s->base_point();
        for (int i = 0; i < 50; ++i) {
            const double d = uniform(rng, 0.01, 0.2);
            auto y = s->point_at_distance(x, d, rng);
            if (!y) continue;
            EXPECT_NEAR(s->distance(x, *y), d, 1e-12) << s->label();
        }
        Point p = s->random_point(rng);
        Point q = s->random_point(rng);
        if (s->distance(p, q) < 1e-6) continue;
        auto e = s->extend(p, q, 0.05);
        if (!e) continue;
        EXPECT_NEAR(s->distance(p, *e), s->distance(p, q) + 0.05, 1e-10) << s->label();
    }
}

TEST(AllModels, SampleBallStaysInsideAndIsSeeded) {
    for (const auto& s : all_models()) {
        const Point c = s->base_point();
        const double r = std::min(0.3, 0.9 * s->valid_radius(c));
        const auto a = sample_ball(*s, c, r, 200, 41);
        const auto b = sample_ball(*s, c, r, 200, 41);
        ASSERT_EQ(a.size(), 200u);
        EXPECT_EQ(a, b);
        for (const auto& x : a) {
            EXPECT_LE(s->distance(c, x), r * (1.0 + 1e-12)) << s->label();
            EXPECT_NO_THROW(s->validate(x));
        }
    }
}

TEST(AllModels, RegionEnclosesBallMeasure) {
    // Euclidean ball areas are an independent lower bound for the enclosing region.
    const auto e2 = make_euclidean(2);
    EXPECT_GE(e2->region({0.0, 0.0}, 1.0).measure, kPi - 1e-12);
    const auto cone = make_cone(4.0);
    EXPECT_GE(cone->region({0.0, 0.0}, 1.0).measure, 2.0 - 1e-12);
}

TEST(Spaces, ValidatedDistanceChecksInput) {
    auto s = make_lp(3, 2);
    EXPECT_THROW(distance(*s, {0.0}, {0.0, 1.0}), InputError);
    EXPECT_THROW(distance(*s, {NAN, 0.0}, {0.0, 1.0}), InputError);
    EXPECT_NEAR(distance(*s, {0.0, 0.0}, {1.0, 1.0}), std::cbrt(2.0), 1e-15);
}

TEST(CurvatureParams, Validation) {
    EXPECT_THROW((CurvatureParams{0.5, 0.0, kInf, 2}.validate()), InputError);
    EXPECT_THROW((CurvatureParams{1.0, -1.0, kInf, 2}.validate()), InputError);
    EXPECT_THROW((CurvatureParams{1.0, 0.0, 0.0, 2}.validate()), InputError);
    EXPECT_NO_THROW((CurvatureParams{3.0, 0.0, kInf, 2}.validate()));
}

TEST(Core, ParallelAndSerialAgree) {
    std::vector<double> a(1000), b(1000);
    for_each_index(a.size(), Exec::serial, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
    for_each_index(b.size(), Exec::parallel, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
    EXPECT_EQ(a, b);
    EXPECT_THROW(for_each_index(10, Exec::parallel, [](std::size_t i) { if (i == 3) throw DomainError("x"); }),
                 DomainError);
}

TEST(Core, SeedDerivationIsDeterministicAndSpread) {
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}
