#include "bclab/measure.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <numeric>

namespace bclab {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr std::size_t kPivots = 3;
constexpr int kOffsets = 27;  // 3^kPivots

}  // namespace

BallVolumeCurve mc_ball_volume(const Space& space, const Point& x, const std::vector<double>& radii,
                               std::size_t samples, std::uint64_t seed, Exec exec) {
    if (radii.empty()) throw InputError("mc_ball_volume: no radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw InputError("mc_ball_volume: radii must be > 0");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InputError("mc_ball_volume: radii must increase");
    }
    if (samples < 1000) throw InputError("mc_ball_volume: at least 1000 samples required");
    space.validate(x);
    BallVolumeCurve c;
    c.radii = radii;
    const std::size_t chunks = (samples + kChunk - 1) / kChunk;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const double r = radii[ri];
        if (r > space.valid_radius(x) * (1.0 + 1e-12)) throw RangeError("mc_ball_volume: ball escapes the model");
        const Region reg = space.region(x, r);
        std::vector<std::size_t> hits(chunks, 0);
        for_each_index(chunks, exec, [&](std::size_t ch) {
            Rng rng(derive_seed(seed, ri, ch));
            const std::size_t n = std::min(kChunk, samples - ch * kChunk);
            std::size_t h = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (space.distance(x, reg.sample(rng)) <= r) ++h;
            hits[ch] = h;
        });
        const double total = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::size_t{0}));
        const double frac = total / static_cast<double>(samples);
        c.volumes.push_back(reg.measure * frac);
        c.stderrs.push_back(reg.measure * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples)));
    }
    return c;
}

ResidualReport bishop_gromov_check(const BallVolumeCurve& curve, int n) {
    if (n < 1) throw InputError("bishop_gromov_check: n must be >= 1");
    if (curve.radii.size() != curve.volumes.size() || curve.radii.size() != curve.stderrs.size())
        throw InputError("bishop_gromov_check: malformed curve");
    ResidualReport rep;
    rep.check = "bishop_gromov";
    rep.trials = curve.radii.size() > 0 ? curve.radii.size() - 1 : 0;
    if (curve.radii.empty()) return rep;
    const double scale = curve.volumes[0] / std::pow(curve.radii[0], n);
    for (std::size_t i = 0; i + 1 < curve.radii.size(); ++i) {
        const double ra = std::pow(curve.radii[i], n), rb = std::pow(curve.radii[i + 1], n);
        const double qa = curve.volumes[i] / ra, qb = curve.volumes[i + 1] / rb;
        const double sa = curve.stderrs[i] / ra, sb = curve.stderrs[i + 1] / rb;
        const double resid = (qa - qb + 3.0 * std::sqrt(sa * sa + sb * sb)) / (scale > 0.0 ? scale : 1.0);
        if (resid < rep.worst_residual) {
            rep.worst_residual = resid;
            rep.worst_witness = {"bishop_gromov",
                                 {},
                                 {curve.radii[i], curve.radii[i + 1], curve.volumes[i], curve.volumes[i + 1],
                                  curve.stderrs[i], curve.stderrs[i + 1], static_cast<double>(n)}};
        }
    }
    return rep;
}

std::vector<std::size_t> greedy_packing(const Space& space, const std::vector<Point>& pts, double r) {
    if (pts.empty()) throw InputError("packing_number: no points");
    if (!(r > 0.0)) throw InputError("packing_number: r must be > 0");
    // Pivot distances bound the metric from below, so two points closer than r
    // sit in adjacent buckets of each pivot coordinate.
    const std::size_t n = pts.size();
    std::array<std::size_t, kPivots> piv{};
    std::vector<std::array<double, kPivots>> pd(n);
    std::vector<double> nearest(n, kInf);
    for (std::size_t k = 0; k < kPivots; ++k) {
        if (k > 0) piv[k] = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
        for (std::size_t i = 0; i < n; ++i) {
            pd[i][k] = space.distance(pts[i], pts[piv[k]]);
            nearest[i] = std::min(nearest[i], pd[i][k]);
        }
    }
    using Key = std::array<std::int64_t, kPivots>;
    auto key_of = [&](std::size_t i) {
        Key key;
        for (std::size_t k = 0; k < kPivots; ++k) key[k] = static_cast<std::int64_t>(std::floor(pd[i][k] / r));
        return key;
    };
    std::map<Key, std::vector<std::size_t>> buckets;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n; ++i) {
        const Key key = key_of(i);
        bool far = true;
        for (int off = 0; off < kOffsets && far; ++off) {
            Key nb = key;
            for (std::size_t k = 0, o = static_cast<std::size_t>(off); k < kPivots; ++k, o /= 3)
                nb[k] += static_cast<std::int64_t>(o % 3) - 1;
            auto it = buckets.find(nb);
            if (it == buckets.end()) continue;
            for (std::size_t j : it->second)
                if (space.distance(pts[i], pts[j]) < r) {
                    far = false;
                    break;
                }
        }
        if (far) {
            chosen.push_back(i);
            buckets[key].push_back(i);
        }
    }
    return chosen;
}

std::size_t packing_number(const Space& space, const std::vector<Point>& pts, double r) {
    return greedy_packing(space, pts, r).size();
}

std::size_t packing_number(const FinitePointedSample& s, double r) {
    if (s.n == 0) throw InputError("packing_number: empty sample");
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < s.n; ++i) {
        bool far = true;
        for (std::size_t j : chosen)
            if (s.at(i, j) < r) {
                far = false;
                break;
            }
        if (far) chosen.push_back(i);
    }
    return chosen.size();
}

PackingCurve packing_curve(const Space& space, const std::vector<Point>& pts, const std::vector<double>& radii) {
    PackingCurve c;
    c.radii = radii;
    for (double r : radii) c.counts.push_back(packing_number(space, pts, r));
    return c;
}

PackingCurve windowed_packing_curve(const Space& space, const Point& center, double window,
                                   const std::vector<double>& radii, std::size_t samples, std::size_t replicates,
                                   std::uint64_t seed) {
    if (radii.empty()) throw InputError("windowed_packing_curve: no radii");
    if (!(window > 0.0)) throw InputError("windowed_packing_curve: window must be > 0");
    if (samples < 1 || replicates < 1) throw InputError("windowed_packing_curve: empty sample");
    const double outer = window + *std::max_element(radii.begin(), radii.end());
    PackingCurve c;
    c.radii = radii;
    c.counts.assign(radii.size(), 0);
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        const auto pts = sample_ball(space, center, outer, samples, derive_seed(seed, rep));
        std::vector<char> inside(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) inside[i] = space.distance(pts[i], center) < window;
        for (std::size_t k = 0; k < radii.size(); ++k)
            for (std::size_t i : greedy_packing(space, pts, radii[k])) c.counts[k] += inside[i];
    }
    return c;
}

double rough_dimension(const PackingCurve& curve) {
    if (curve.radii.size() < 3 || curve.counts.size() != curve.radii.size())
        throw InputError("rough_dimension: at least three radii required");
    const std::size_t n = curve.radii.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(curve.radii[i] > 0.0) || curve.counts[i] == 0) throw InputError("rough_dimension: invalid curve");
        xs[i] = -std::log(curve.radii[i]);
        ys[i] = std::log(static_cast<double>(curve.counts[i]));
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (!(sxx > 0.0)) throw InputError("rough_dimension: radii must be distinct");
    return sxy / sxx;
}

ThresholdConstants threshold_constants(double delta, double L_bar, int N0, double C) {
    if (delta >= 1.0) throw DomainError("threshold_constants: delta must be < 1");
    if (!(delta > 0.0)) throw InputError("threshold_constants: delta must be > 0");
    if (N0 < 0) throw InputError("threshold_constants: N0 must be >= 0");
    if (!(C >= 1.0)) throw InputError("threshold_constants: covering constant must be >= 1");
    ThresholdConstants t;
    double L = std::max(2.0 / (1.0 - std::cos(delta)) + 1.0, 1.0 / std::sin(delta));
    while (!(std::acos(1.0 - 2.0 / (L - 1.0)) < delta && std::asin(1.0 / L) < delta)) L = std::nextafter(L, kInf);
    t.L0 = L;
    if (!(L_bar >= t.L0)) throw InputError("threshold_constants: L_bar must be >= L0");
    const double gap = std::cos(delta) - std::cos(2.0 * delta);
    t.S0 = std::min(4.0, 1.0 + 2.0 * gap / (L_bar - 1.0));
    t.L1 = t.L0 + 2.0;
    t.S1 = std::min(4.0, 1.0 + 2.0 * gap / (t.L1 - 1.0));
    t.N0 = N0;
    t.M = N0 + 2;
    t.C = C;
    t.K_bar = std::pow(C, t.M - 1);
    t.K = t.K_bar;
    return t;
}

bool verify_chain(const FinitePointedSample& s, const std::vector<std::size_t>& chain, double L) {
    if (chain.empty()) return false;
    for (std::size_t i : chain)
        if (i >= s.n) return false;
    const std::size_t x0 = chain[0];
    for (std::size_t i = 1; i + 1 < chain.size(); ++i)
        if (!(s.at(chain[i + 1], x0) >= L * s.at(chain[i], x0))) return false;
    return true;
}

namespace {

double subset_diameter(const FinitePointedSample& s, const std::vector<std::size_t>& E) {
    double d = 0.0;
    for (std::size_t a = 0; a < E.size(); ++a)
        for (std::size_t b = a + 1; b < E.size(); ++b) d = std::max(d, s.at(E[a], E[b]));
    return d;
}

std::vector<std::size_t> chain_rec(const FinitePointedSample& s, const std::vector<std::size_t>& E, double L, int M) {
    if (M <= 1 || E.size() <= 1) return {E.front()};
    const double D = subset_diameter(s, E);
    if (!(D > 0.0)) return {E.front()};
    // Greedy cover by subsets of diameter at most D/(2L).
    std::vector<char> used(E.size(), 0);
    std::vector<std::size_t> best;
    for (std::size_t a = 0; a < E.size(); ++a) {
        if (used[a]) continue;
        std::vector<std::size_t> cluster;
        for (std::size_t b = a; b < E.size(); ++b)
            if (!used[b] && s.at(E[a], E[b]) <= D / (4.0 * L)) {
                used[b] = 1;
                cluster.push_back(E[b]);
            }
        if (cluster.size() > best.size()) best = std::move(cluster);
    }
    std::vector<std::size_t> sub = chain_rec(s, best, L, M - 1);
    const std::size_t x0 = sub.front();
    for (std::size_t e : E)
        if (s.at(e, x0) >= 0.5 * D) {
            sub.push_back(e);
            break;
        }
    return sub;
}

}  // namespace

ChainResult geometric_chain(const FinitePointedSample& s, double L, int M) {
    if (!(L >= 1.0)) throw InputError("geometric_chain: L must be >= 1");
    if (M < 1) throw InputError("geometric_chain: M must be >= 1");
    if (s.n == 0) throw InputError("geometric_chain: empty sample");
    std::vector<std::size_t> all(s.n);
    std::iota(all.begin(), all.end(), 0);
    ChainResult r;
    r.indices = chain_rec(s, all, L, M);
    r.found = static_cast<int>(r.indices.size()) == M && verify_chain(s, r.indices, L);
    return r;
}

double measure_covering_constant(const Space& space, const Point& x, double L, const std::vector<double>& radii,
                                 std::size_t samples, std::uint64_t seed) {
    if (!(L >= 1.0)) throw InputError("measure_covering_constant: L must be >= 1");
    double C = 1.0;
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        const auto pts = sample_ball(space, x, radii[ri], samples, derive_seed(seed, ri));
        double D = 0.0;
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b) D = std::max(D, space.distance(pts[a], pts[b]));
        std::vector<char> used(pts.size(), 0);
        std::size_t count = 0;
        for (std::size_t a = 0; a < pts.size(); ++a) {
            if (used[a]) continue;
            ++count;
            for (std::size_t b = a; b < pts.size(); ++b)
                if (!used[b] && space.distance(pts[a], pts[b]) <= D / (4.0 * L)) used[b] = 1;
        }
        C = std::max(C, static_cast<double>(count));
    }
    return C;
}

double CylinderRegion::long_range(const Space& space) const {
    double m = kInf;
    for (const auto& pr : strainer.pairs)
        m = std::min({m, space.distance(pr.p, base), space.distance(pr.q, base)});
    return strainer.delta * m;
}

void CylinderRegion::validate(const Space& space) const {
    if (strainer.pairs.empty()) throw InputError("cylinder: strainer has no pairs");
    if (m.size() != strainer.pairs.size()) throw InputError("cylinder: index vector must have one entry per pair");
    if (!(rx > 0.0) || !(r > 0.0)) throw InputError("cylinder: radii must be > 0");
    space.validate(base);
    const double d = strainer.delta;
    if (r > std::min(d * long_range(space), d * rx) * (1.0 + 1e-12))
        throw InputError("cylinder: step r must not exceed min(delta R, delta r_x)");
}

bool cylinder_membership(const Space& space, const CylinderRegion& region, const Point& z) {
    if (!(space.distance(region.base, z) < region.rx)) return false;
    for (std::size_t i = 0; i < region.m.size(); ++i) {
        const Point& p = region.strainer.pairs[i].p;
        const double diff = space.distance(p, region.base) - space.distance(p, z);
        const double mi = static_cast<double>(region.m[i]);
        if (!(0.1 * (mi - 1.0) * region.r <= diff && diff <= 0.1 * mi * region.r)) return false;
    }
    return true;
}

SingularPacking singular_packing(const Space& space, const CurvatureParams& params, const CylinderRegion& region,
                                 double delta, std::size_t samples, std::uint64_t seed, double bound, Exec exec) {
    region.validate(space);
    const int k = static_cast<int>(region.strainer.pairs.size());
    const double dp = 10.0 * delta;
    if (!(dp < 0.5)) throw InputError("singular_packing: 10 delta must be below 1/2");
    // The slabs are thin, so draw ball samples in batches until enough
    // members are collected or the draw budget runs out.
    SingularPacking out;
    out.bound = bound;
    std::vector<Point> pts;
    std::vector<std::size_t> members;
    const std::size_t batch = 1 << 16, max_draws = samples * 50000;
    for (std::uint64_t b = 0; members.size() < samples && out.sampled < max_draws; ++b) {
        for (auto& z : sample_ball(space, region.base, region.rx, batch, derive_seed(seed, 0x5a, b))) {
            if (members.size() >= samples) break;
            ++out.sampled;
            if (cylinder_membership(space, region, z)) {
                members.push_back(pts.size());
                pts.push_back(std::move(z));
            }
        }
    }
    out.members = members.size();

    // Scale putting the innermost opposite point beyond (10 delta)^-1 r.
    const double S = params.S, C = params.C;
    const double shrink = std::pow(dp * dp / (2.0 * (S + C)), k);
    const double rho_factor = 2.0 * (1.0 - std::cos(0.5 * dp)) / S;
    const double need = region.r / dp;
    const double scale = 2.0 * need / (shrink * rho_factor);

    std::vector<char> strained(members.size(), 0);
    for_each_index(members.size(), exec, [&](std::size_t i) {
        const Point& z = pts[members[i]];
        const FindResult fr = find_strainer(space, params, z, k + 1, dp, scale, derive_seed(seed, 0x51, i), Exec::serial);
        if (!fr.strainer) return;
        double m = kInf;
        for (const auto& pr : fr.strainer->pairs) m = std::min({m, space.distance(pr.p, z), space.distance(pr.q, z)});
        strained[i] = m > need;
    });
    std::vector<Point> rest;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (strained[i]) ++out.strained;
        else rest.push_back(pts[members[i]]);
    }
    out.not_found = rest.size();
    out.packing = rest.empty() ? 0 : packing_number(space, rest, region.r / delta);
    out.within_bound = static_cast<double>(out.packing) <= bound;
    return out;
}

StrataSummary strained_fraction(const Space& space, const CurvatureParams& params, const Point& center,
                                double radius, int k, double delta, double scale, std::size_t samples,
                                std::uint64_t seed, Exec exec) {
    const auto pts = sample_ball(space, center, radius, samples, seed);
    std::vector<char> ok(pts.size(), 0);
    for_each_index(pts.size(), exec, [&](std::size_t i) {
        ok[i] = find_strainer(space, params, pts[i], k, delta, scale, derive_seed(seed, 0x57, i), Exec::serial)
                    .strainer.has_value();
    });
    StrataSummary s;
    s.sampled = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (ok[i]) ++s.strained;
        else s.not_found.push_back(pts[i]);
    }
    return s;
}

}  // namespace bclab
