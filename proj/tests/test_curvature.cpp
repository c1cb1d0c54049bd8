#include <gtest/gtest.h>

#include <cmath>

#include "bclab/curvature.hpp"

using namespace bclab;

namespace {

CurvatureParams with_S(double S, int n = 2) { return {S, 0.0, kInf, n}; }

void expect_replays(const Space& space, const ResidualReport& r) {
    EXPECT_NEAR(evaluate_witness(&space, r.worst_witness), r.worst_residual, 1e-12) << r.check;
}

}  // namespace

TEST(SConcavity, EuclideanIdentity) {
    auto s = make_euclidean(3);
    const auto r = check_s_concavity(*s, with_S(1.0, 3), 5000, 1);
    EXPECT_NEAR(r.worst_residual, 0.0, 1e-10);
    EXPECT_EQ(r.trials, 5000u);
}

TEST(SConcavity, ResidualMatchesParallelogramOracle) {
    auto s = make_euclidean(2);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const Point p = s->random_point(rng), a = s->random_point(rng), b = s->random_point(rng);
        const auto xi = geodesic(*s, a, b);
        const double t = uniform01(rng);
        // |p xi(t)|^2 = (1-t)|pa|^2 + t|pb|^2 - t(1-t)|ab|^2 exactly in an inner-product space;
        // residuals are reported relative to the squared configuration scale
        const double S = 2.0;
        const double L = s->distance(a, b);
        const double scale = std::max({s->distance(p, a), s->distance(p, b), L});
        const double expect = (S - 1.0) * t * (1 - t) * L * L / (scale * scale);
        EXPECT_NEAR(s_concavity_residual(*s, p, xi, t, S), expect, 1e-12);
    }
}

TEST(SConcavity, LpPassesAtSmoothnessConstant) {
    for (double p : {3.0, 4.0}) {
        auto s = make_lp(p, 2);
        const auto r = check_s_concavity(*s, with_S(p - 1.0), 20000, 2);
        EXPECT_GE(r.worst_residual, kViolationThreshold) << p;
        expect_replays(*s, r);
    }
}

TEST(SConcavity, LpFourViolatedBelowThree) {
    auto s = make_lp(4, 2);
    const auto r = check_s_concavity(*s, with_S(2.5), 20000, 2);
    EXPECT_LT(r.worst_residual, kViolationThreshold);
    expect_replays(*s, r);
}

TEST(SConcavity, SerialAndParallelAgree) {
    auto s = make_cone(4.0);
    CheckOptions serial{Exec::serial, true}, parallel{Exec::parallel, true};
    const auto a = check_s_concavity(*s, with_S(1.0), 3000, 8, serial);
    const auto b = check_s_concavity(*s, with_S(1.0), 3000, 8, parallel);
    EXPECT_EQ(a.worst_residual, b.worst_residual);
    EXPECT_EQ(a.worst_witness.points, b.worst_witness.points);
}

TEST(SConcavity, ConeIsNonNegativelyCurved) {
    for (double theta : {3.0, 4.0, 5.0}) {
        auto s = make_cone(theta);
        EXPECT_GE(check_s_concavity(*s, with_S(1.0), 10000, 5).worst_residual, kViolationThreshold) << theta;
    }
}

TEST(Semiconvexity, NormsAreConvex) {
    for (double p : {2.0, 3.0, 4.0}) {
        auto s = make_lp(p, 2);
        const auto r = check_local_semiconvexity(*s, with_S(p - 1.0), 10000, 4);
        EXPECT_GE(r.worst_residual, kViolationThreshold) << p;
        expect_replays(*s, r);
    }
}

TEST(Semiconvexity, SphereCapAtEstimatedConstant) {
    // Inside the cap the squared distance has Hessian at most 2, so no positive constant is needed.
    auto s = make_sphere_cap(1.0);
    const double C = estimate_best_C(*s, 1.0, 10000, 6);
    EXPECT_GE(C, 0.0);
    EXPECT_LT(C, 1e-6);
    const auto r = check_local_semiconvexity(*s, {1.0, C, 1.0, 2}, 10000, 7);
    EXPECT_GE(r.worst_residual, kViolationThreshold);
}

TEST(Busemann, EuclideanRatioConstant) {
    auto s = make_euclidean(2);
    EXPECT_NEAR(check_busemann_monotone(*s, BusemannDirection::concave, 2000, 1).worst_residual, 0.0, 1e-10);
}

TEST(Busemann, ConcaveOnConesAndNorms) {
    for (auto s : {make_cone(3.0), make_cone(4.0), make_cone(5.0), make_lp(3, 2), make_lp(4, 3)}) {
        const auto r = check_busemann_monotone(*s, BusemannDirection::concave, 5000, 3);
        EXPECT_GE(r.worst_residual, kViolationThreshold) << s->label();
        expect_replays(*s, r);
    }
}

TEST(Busemann, SphereIsNotConvex) {
    // Positive curvature makes the ratio strictly decrease.
    auto s = make_sphere_cap(1.0);
    EXPECT_LT(check_busemann_monotone(*s, BusemannDirection::convex, 5000, 3).worst_residual, kViolationThreshold);
}

TEST(NormUniform, ParallelogramIdentity) {
    const auto r = check_norm_uniform(2.0, UniformMode::convex, 2.0, 1.0, 5000, 1);
    EXPECT_NEAR(r.worst_residual, 0.0, 1e-12);
    const auto q = check_norm_uniform(2.0, UniformMode::smooth, 2.0, 1.0, 5000, 1);
    EXPECT_NEAR(q.worst_residual, 0.0, 1e-12);
}

TEST(NormUniform, AxisPairHandComputed) {
    const NormFn l4 = [](std::span<const double> v) { return lp_norm(v.data(), v.size(), 4.0); };
    const double u[2] = {1.0, 0.0}, v[2] = {0.0, 1.0};
    // |(u+v)/2|^2 = 8^(-1/2), |u|^2 = |v|^2 = 1, |u-v|^2 = 2^(1/2)
    const double mid = 1.0 / std::sqrt(8.0), diff = std::sqrt(2.0);
    EXPECT_NEAR(norm_uniform_residual(l4, UniformMode::smooth, 2.0, 3.0, u, v), mid - (1.0 - 3.0 * diff / 4.0), 1e-14);
    EXPECT_NEAR(norm_uniform_residual(l4, UniformMode::convex, 2.0, 3.0, u, v), (1.0 - diff / 12.0) - mid, 1e-14);
}

TEST(NormUniform, LpSmoothnessConstantIsSharp) {
    EXPECT_GE(check_norm_uniform(4.0, UniformMode::smooth, 2.0, 3.0, 20000, 2).worst_residual, kViolationThreshold);
    EXPECT_LT(check_norm_uniform(4.0, UniformMode::smooth, 2.0, 2.5, 20000, 2).worst_residual, kViolationThreshold);
}

TEST(NormUniform, WitnessReplaysWithExponent) {
    const auto r = check_norm_uniform(3.0, UniformMode::smooth, 2.0, 1.5, 5000, 4);
    EXPECT_NEAR(evaluate_witness(nullptr, r.worst_witness), r.worst_residual, 1e-12);
}

TEST(BestConstants, EstimatesBracketKnownValues) {
    const double S4 = estimate_best_S(*make_lp(4, 2), 20000, 9);
    EXPECT_GT(S4, 2.5);
    EXPECT_LE(S4, 3.0 + 1e-6);
    EXPECT_NEAR(estimate_best_S(*make_euclidean(2), 5000, 9), 1.0, 1e-4);
}
