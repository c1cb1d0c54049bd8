#include <gtest/gtest.h>

#include <cmath>

#include "bclab/strainers.hpp"

using namespace bclab;

namespace {

const CurvatureParams kFlat{1.0, 0.0, kInf, 2};

Strainer axis_strainer(double delta) {
    Strainer s;
    s.delta = delta;
    s.base = {0.0, 0.0};
    s.pairs = {{{1.0, 0.0}, {-0.004, 0.0}}, {{0.0, 0.004}, {0.0, -2e-5}}};
    return s;
}

// Radius used by the strainer suite: strained ball inside half the nearest strainer distance.
double openness_radius(const Space& space, const Strainer& s) {
    double inner = kInf;
    for (const auto& pr : s.pairs) inner = std::min({inner, space.distance(pr.p, s.base), space.distance(pr.q, s.base)});
    return strained_radius(space, space.declared(), s, 0.5 * inner, 64, 2);
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

}  // namespace

TEST(StrainerConstants, ClosedForms) {
    EXPECT_DOUBLE_EQ(strainer_constants(1, 0.1).delta_k, 1.0 / 8.0);
    for (int k = 1; k <= 6; ++k) {
        const auto c = strainer_constants(k, 0.05);
        EXPECT_EQ(c.delta_k, 1.0 / (k * std::pow(2.0, 2 * k + 1)));
        EXPECT_DOUBLE_EQ(c.epsilon_k, 0.9 / std::pow(4.0, k - 1));
        EXPECT_DOUBLE_EQ(c.bar_epsilon_k, c.epsilon_k / std::sqrt(k));
    }
    EXPECT_DOUBLE_EQ(strainer_constants(1, 0.0).epsilon_k, 1.0);
    EXPECT_NEAR(strainer_constants(3, 0.1).epsilon_k, 0.05, 1e-15);
    EXPECT_THROW(strainer_constants(0, 0.1), InputError);
    EXPECT_THROW(strainer_constants(1, 0.6), InputError);
}

TEST(OneStrainer, CollinearOppositePoint) {
    auto s = make_euclidean(2);
    const auto r = is_one_strainer(*s, kFlat, {1.0, 0.0}, {0.0, 0.0}, {-0.004, 0.0}, 0.1);
    EXPECT_TRUE(r.ok);
    EXPECT_NEAR(r.angle, kPi, 1e-12);
    EXPECT_NEAR(r.ratio_margin, 0.1 - std::acos(1.0 - 0.002), 1e-12);
    EXPECT_FALSE(is_one_strainer(*s, kFlat, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.004}, 0.1).ok);
}

TEST(OneStrainer, ConeApexAnglesBoundedByHalfTheta) {
    const double theta = 4.0;
    auto s = make_cone(theta);
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const Point p{uniform(rng, 0.1, 2), uniform(rng, 0, theta)};
        const Point q{uniform(rng, 0.001, 0.1), uniform(rng, 0, theta)};
        const auto r = is_one_strainer(*s, kFlat, p, {0.0, 0.0}, q, 0.5);
        EXPECT_FALSE(r.ok);
        EXPECT_LE(r.angle, theta / 2 + 1e-12);
    }
}

TEST(KStrainer, AxisStrainerVerifies) {
    auto s = make_euclidean(2);
    const auto c = is_k_strainer(*s, kFlat, axis_strainer(0.1));
    EXPECT_TRUE(c.ok);
    EXPECT_EQ(c.failing_level, 0);
    EXPECT_EQ(c.reading, "inductive");
    ASSERT_EQ(c.levels.size(), 2u);
    EXPECT_NEAR(c.levels[1].hierarchy_margin, 0.1 - std::acos(1.0 - 0.002), 1e-12);
}

TEST(KStrainer, RotatedSecondPairFailsOrthogonality) {
    auto s = make_euclidean(2);
    auto st = axis_strainer(0.1);
    st.pairs[1] = {{0.004, 0.0}, {-2e-5, 0.0}};
    const auto c = is_k_strainer(*s, kFlat, st);
    EXPECT_FALSE(c.ok);
    EXPECT_EQ(c.failing_level, 2);
    EXPECT_TRUE(c.failing == StrainerCondition::orthogonal_p || c.failing == StrainerCondition::orthogonal_q);
    EXPECT_EQ(c.failing_index(), 3);
}

TEST(KStrainer, EqualDistancesFailHierarchy) {
    auto s = make_euclidean(2);
    Strainer st;
    st.delta = 0.1;
    st.base = {0.0, 0.0};
    st.pairs = {{{1.0, 0.0}, {-0.004, 0.0}}, {{0.0, 1.0}, {0.0, -0.004}}};
    const auto c = is_k_strainer(*s, kFlat, st);
    EXPECT_FALSE(c.ok);
    EXPECT_EQ(c.failing, StrainerCondition::hierarchy);
    EXPECT_NEAR(c.levels[1].hierarchy_margin, 0.1 - kPi / 3, 1e-12);
}

TEST(KStrainer, ReorderedPairsFail) {
    auto s = make_euclidean(2);
    auto st = axis_strainer(0.1);
    std::swap(st.pairs[0], st.pairs[1]);
    EXPECT_FALSE(is_k_strainer(*s, kFlat, st).ok);
}

TEST(KStrainer, StrainedSetIsOpen) {
    auto s = make_euclidean(2);
    const auto st = axis_strainer(0.1);
    const double r = strained_radius(*s, kFlat, st, 1e-3, 64, 3);
    EXPECT_GT(r, 0.0);
    for (const auto& y : sample_ball(*s, st.base, r, 64, 99)) EXPECT_TRUE(is_k_strainer_at(*s, kFlat, st, y).ok);
}

TEST(FindStrainer, EuclideanAndLpSucceed) {
    for (auto [space, k] : std::vector<std::pair<SpacePtr, int>>{{make_euclidean(2), 2}, {make_lp(3, 3), 3}}) {
        const CurvatureParams prm = space->declared();
        const auto r = find_strainer(*space, prm, space->base_point(), k, 0.05, 0.5, 7);
        ASSERT_TRUE(r.strainer.has_value()) << space->label();
        EXPECT_EQ(r.strainer->k(), static_cast<std::size_t>(k));
        EXPECT_TRUE(is_k_strainer(*space, prm, *r.strainer).ok);
    }
}

TEST(FindStrainer, ConeApexHasNone) {
    auto s = make_cone(4.0);
    const auto r = find_strainer(*s, s->declared(), {0.0, 0.0}, 1, 0.4, 0.5, 3);
    EXPECT_FALSE(r.strainer.has_value());
    EXPECT_FALSE(r.check.ok);
}

TEST(FindStrainer, AlmostOrthogonalityConsequence) {
    auto s = make_euclidean(3);
    const double delta = 0.05;
    const auto r = find_strainer(*s, s->declared(), s->base_point(), 3, delta, 0.5, 11);
    ASSERT_TRUE(r.strainer);
    const auto& st = *r.strainer;
    for (std::size_t j = 1; j < st.k(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            for (const Point* target : {&st.pairs[j].p, &st.pairs[j].q}) {
                const double a = std::acos(
                    ((st.pairs[i].p[0]) * (*target)[0] + st.pairs[i].p[1] * (*target)[1] +
                     st.pairs[i].p[2] * (*target)[2]) /
                    (norm2(st.pairs[i].p) * norm2(*target)));
                EXPECT_LT(std::abs(a - kPi / 2), 2 * delta + 1e-6);
            }
}

TEST(StrainerMap, LipschitzAndBaseValues) {
    auto s = make_lp(3, 2);
    const auto r = find_strainer(*s, s->declared(), s->base_point(), 2, 0.05, 0.5, 5);
    ASSERT_TRUE(r.strainer);
    const auto& st = *r.strainer;
    const auto f0 = strainer_map(*s, st, st.base);
    for (std::size_t i = 0; i < st.k(); ++i) EXPECT_EQ(f0[i], s->distance(st.pairs[i].p, st.base));
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const Point x = s->random_point(rng), y = s->random_point(rng);
        EXPECT_LE(l1(strainer_map(*s, st, x), strainer_map(*s, st, y)), 2.0 * s->distance(x, y) + 1e-12);
    }
}

TEST(Openness, EuclideanFloors) {
    auto s = make_euclidean(2);
    for (int k = 1; k <= 2; ++k) {
        const auto r = find_strainer(*s, kFlat, s->base_point(), k, 0.05, 0.5, 13);
        ASSERT_TRUE(r.strainer);
        const double radius = openness_radius(*s, *r.strainer);
        const auto o = verify_openness(*s, *r.strainer, radius, 200, 17);
        EXPECT_EQ(o.failures, 0u);
        EXPECT_GE(o.achieved_epsilon, strainer_constants(k, 0.05).epsilon_k - 1e-6);
    }
}

TEST(Openness, UnreachableTargetCountsAsFailure) {
    auto s = make_euclidean(2);
    const auto st = axis_strainer(0.1);
    const auto o = verify_openness_target(*s, st, 1e-3, {5.0, 5.0});
    EXPECT_EQ(o.failures, 1u);
    EXPECT_FALSE(o.failed_target.empty());
    EXPECT_THROW(verify_openness_target(*s, st, 1e-3, {1.0}), InputError);
}

TEST(SolveTarget, ReachesNearbyTarget) {
    auto s = make_euclidean(2);
    const auto st = axis_strainer(0.1);
    auto v = strainer_map(*s, st, st.base);
    v[0] += 1e-4;
    v[1] -= 5e-5;
    const auto r = solve_strainer_target(*s, st, st.base, v, 1e-12);
    EXPECT_TRUE(r.ok);
    EXPECT_LE(l1(strainer_map(*s, st, r.y), v), 1e-12);
}

TEST(BiLipschitz, EuclideanChartNearIsometry) {
    auto s = make_euclidean(2);
    const auto st = axis_strainer(0.1);
    const auto b = estimate_bilipschitz(*s, st, openness_radius(*s, st), 2000, 5);
    EXPECT_GT(b.lower, 0.8);
    EXPECT_LE(b.upper, 2.0 + 1e-9);
    EXPECT_LE(b.lower, b.upper);
}

TEST(Improve, ImprovesEuclideanStrainerAtOrigin) {
    auto s = make_euclidean(2);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = find_strainer(*s, kFlat, s->base_point(), 2, 0.1, 0.5, seed);
        ASSERT_TRUE(f.strainer);
        const auto im = improve_strainer(*s, kFlat, *f.strainer, 0.05, seed);
        if (!im.ok) continue;
        ++ok;
        EXPECT_TRUE(is_k_strainer(*s, kFlat, im.strainer).ok);
        EXPECT_DOUBLE_EQ(im.strainer.delta, 0.05);
        EXPECT_LE(im.base_shift, 2 * im.r1);
        EXPECT_NEAR(s->distance(im.strainer.base, f.strainer->base), im.base_shift, 1e-15);
    }
    EXPECT_GE(ok, 19);
}

TEST(Improve, OneStrainerMovesTowardP) {
    auto s = make_euclidean(2);
    Strainer st;
    st.delta = 0.1;
    st.base = {0.0, 0.0};
    st.pairs = {{{1.0, 0.0}, {-0.004, 0.0}}};
    const auto im = improve_strainer(*s, kFlat, st, 0.05, 1);
    ASSERT_TRUE(im.ok);
    EXPECT_EQ(im.strainer.pairs[0].q, st.base);
    EXPECT_GT(im.strainer.base[0], 0.0);
}

TEST(StrainerNumber, MatchesDimension) {
    for (int n = 1; n <= 3; ++n) {
        auto s = make_lp(3, n);
        const auto r = strainer_number(*s, s->declared(), s->base_point(), 0.01, {0.5, 0.25}, 3, 5, 4);
        EXPECT_EQ(r.number, n) << n;
    }
}
