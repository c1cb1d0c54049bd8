#include "bclab/strainers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "bclab/comparison.hpp"

namespace bclab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxDescentSteps = 10000;
constexpr int kMaxStalls = 4;

bool holds(double margin) { return margin > kStrainerSlack; }

double safe_angle(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return comparison_angle(a, b, c);
}

// NaN margins (degenerate triangles) count as failures.
double margin_or_fail(double m) { return std::isnan(m) ? -kInf : m; }

double l1_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Magnitude that distance roundoff scales with: the map values and the chart
// coordinates of the base and the strainer points.
double roundoff_scale(const Strainer& s, const std::vector<double>& v) {
    double m = std::max(max_abs(v), max_abs(s.base));
    for (const auto& pr : s.pairs) m = std::max({m, max_abs(pr.p), max_abs(pr.q)});
    return m;
}

// Point reached by the tangent chart vector w rescaled to distance dist.
std::optional<Point> chart_point(const Space& space, const Point& x, const Point& w, double dist) {
    const double nw = norm2(w);
    if (!(nw > 0.0)) return std::nullopt;
    double s = dist / nw;
    std::optional<Point> y;
    Point ws(w.size());
    for (int it = 0; it < 4; ++it) {
        for (std::size_t i = 0; i < w.size(); ++i) ws[i] = w[i] * s;
        y = space.chart_exp(x, ws);
        if (!y) return std::nullopt;
        const double dd = space.distance(x, *y);
        if (!(dd > 0.0)) return std::nullopt;
        s *= dist / dd;
    }
    return y;
}

}  // namespace

StrainerConstants strainer_constants(int k, double delta) {
    if (k < 1) throw InputError("strainer_constants: k must be >= 1");
    if (!(delta >= 0.0 && delta < 0.5)) throw InputError("strainer_constants: delta must lie in [0, 1/2)");
    StrainerConstants c;
    c.delta_k = std::ldexp(1.0, -2 * k - 1) / k;
    c.epsilon_k = (1.0 - 2.0 * delta) / std::pow(4.0, k - 1);
    c.bar_epsilon_k = c.epsilon_k / std::sqrt(static_cast<double>(k));
    return c;
}

OneStrainerCheck is_one_strainer(const Space& space, const CurvatureParams& params, const Point& p, const Point& x,
                                 const Point& q, double delta) {
    OneStrainerCheck r;
    const double px = space.distance(p, x), qx = space.distance(q, x), pq = space.distance(p, q);
    r.angle = safe_angle(px, qx, pq);
    r.angle_margin = margin_or_fail(r.angle - (kPi - delta));
    r.ratio_margin = px > 0.0 ? margin_or_fail(delta - bar_delta_S(params.S, qx, px)) : -kInf;
    r.radius_margin = params.D - px;
    r.ok = holds(r.angle_margin) && holds(r.ratio_margin) && holds(r.radius_margin);
    return r;
}

std::string condition_name(StrainerCondition c) {
    switch (c) {
        case StrainerCondition::none: return "none";
        case StrainerCondition::radius: return "radius";
        case StrainerCondition::opposite_angle: return "opposite_angle";
        case StrainerCondition::opposite_ratio: return "opposite_ratio";
        case StrainerCondition::hierarchy: return "hierarchy";
        case StrainerCondition::orthogonal_p: return "orthogonal_p";
        case StrainerCondition::orthogonal_q: return "orthogonal_q";
    }
    return "unknown";
}

double LevelMargins::min() const {
    return std::min({angle_margin, ratio_margin, hierarchy_margin, orthogonal_p_margin, orthogonal_q_margin});
}

int StrainerCheck::failing_index() const {
    if (ok) return 0;
    if (failing_level < static_cast<int>(levels.size())) return 1;
    if (failing == StrainerCondition::orthogonal_p || failing == StrainerCondition::orthogonal_q) return 3;
    return 2;
}

double StrainerCheck::min_margin() const {
    double m = radius_margin;
    for (const auto& l : levels) m = std::min(m, l.min());
    return m;
}

StrainerCheck is_k_strainer_at(const Space& space, const CurvatureParams& params, const Strainer& cand,
                               const Point& x) {
    if (cand.pairs.empty()) throw InputError("is_k_strainer: no strainer pairs");
    const double delta = cand.delta;
    const std::size_t k = cand.pairs.size();
    std::vector<double> px(k), qx(k);
    for (std::size_t j = 0; j < k; ++j) {
        px[j] = space.distance(cand.pairs[j].p, x);
        qx[j] = space.distance(cand.pairs[j].q, x);
    }
    StrainerCheck r;
    r.radius_margin = params.D - px[0];
    r.levels.resize(k);
    auto fail = [&](int level, StrainerCondition c) {
        if (r.failing == StrainerCondition::none) {
            r.failing_level = level;
            r.failing = c;
        }
    };
    if (!holds(r.radius_margin)) fail(1, StrainerCondition::radius);
    for (std::size_t j = 0; j < k; ++j) {
        LevelMargins& m = r.levels[j];
        const OneStrainerCheck one = is_one_strainer(space, params, cand.pairs[j].p, x, cand.pairs[j].q, delta);
        m.angle_margin = one.angle_margin;
        m.ratio_margin = one.ratio_margin;
        for (std::size_t i = 0; i < j; ++i) {
            const double h = px[i] > 0.0 ? delta - bar_delta_SC(params.S, params.C, px[j], px[i]) : -kInf;
            m.hierarchy_margin = std::min(m.hierarchy_margin, margin_or_fail(h));
            const double ap = safe_angle(px[i], px[j], space.distance(cand.pairs[i].p, cand.pairs[j].p));
            const double aq = safe_angle(px[i], qx[j], space.distance(cand.pairs[i].p, cand.pairs[j].q));
            m.orthogonal_p_margin = std::min(m.orthogonal_p_margin, margin_or_fail(delta - std::abs(ap - 0.5 * kPi)));
            m.orthogonal_q_margin = std::min(m.orthogonal_q_margin, margin_or_fail(delta - std::abs(aq - 0.5 * kPi)));
        }
        const int level = static_cast<int>(j) + 1;
        if (!holds(m.angle_margin)) fail(level, StrainerCondition::opposite_angle);
        if (!holds(m.ratio_margin)) fail(level, StrainerCondition::opposite_ratio);
        if (!holds(m.hierarchy_margin)) fail(level, StrainerCondition::hierarchy);
        if (!holds(m.orthogonal_p_margin)) fail(level, StrainerCondition::orthogonal_p);
        if (!holds(m.orthogonal_q_margin)) fail(level, StrainerCondition::orthogonal_q);
    }
    r.ok = r.failing == StrainerCondition::none;
    return r;
}

StrainerCheck is_k_strainer(const Space& space, const CurvatureParams& params, const Strainer& cand) {
    return is_k_strainer_at(space, params, cand, cand.base);
}

std::vector<double> strainer_map(const Space& space, const Strainer& strainer, const Point& x) {
    std::vector<double> f(strainer.pairs.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = space.distance(strainer.pairs[i].p, x);
    return f;
}

namespace {

struct Candidate {
    Point w;  // tangent chart vector, empty when drawn from the fan
    StrainerPair pair;
    double score = -kInf;
};

std::optional<Point> opposite_point(const Space& space, const CurvatureParams& params, const Point& x,
                                    const Point& p, const Point* w, double rho, double delta, Rng& rng) {
    if (auto q = space.extend(p, x, rho)) return q;
    if (w) {
        Point mw(*w);
        for (double& c : mw) c = -c;
        if (auto q = chart_point(space, x, mw, rho)) return q;
    }
    // No continuation: best sampled opposite point.
    std::optional<Point> best;
    double best_angle = -kInf;
    for (const Point& q : space.direction_fan(x, rho, 64, rng)) {
        const OneStrainerCheck c = is_one_strainer(space, params, p, x, q, delta);
        const double a = std::isnan(c.angle) ? -kInf : c.angle;
        if (a > best_angle) {
            best_angle = a;
            best = q;
        }
    }
    return best;
}

double level_score(const Space& space, const CurvatureParams& params, Strainer& trial, std::size_t j) {
    const StrainerCheck c = is_k_strainer(space, params, trial);
    double s = c.levels[j].min();
    if (j == 0) s = std::min(s, c.radius_margin);
    for (std::size_t i = 0; i < j; ++i) s = std::min(s, c.levels[i].min());
    return s;
}

}  // namespace

FindResult find_strainer(const Space& space, const CurvatureParams& params, const Point& x, int k, double delta,
                         double scale, std::uint64_t seed, Exec exec) {
    if (k < 1) throw InputError("find_strainer: k must be >= 1");
    if (!(scale > 0.0)) throw InputError("find_strainer: scale must be > 0");
    if (!(delta > 0.0 && delta < 0.5)) throw InputError("find_strainer: delta must lie in (0, 1/2)");
    space.validate(x);
    params.validate();
    FindResult out;
    out.delta_below_delta_k = delta < strainer_constants(k, delta).delta_k;

    const double S = params.S, C = params.C;
    double d = std::min(scale, 0.9 * space.valid_radius(x));
    if (std::isfinite(params.D)) d = std::min(d, 0.9 * params.D);

    const Point zero(static_cast<std::size_t>(space.tangent_dim()), 0.0);
    Point probe(zero);
    probe[0] = 1e-3 * d;
    const bool has_chart = space.chart_exp(x, probe).has_value();
    const int tdim = space.tangent_dim();

    Strainer cur;
    cur.delta = delta;
    cur.base = x;
    Rng rng(derive_seed(seed, 0x5747));
    for (int j = 0; j < k; ++j) {
        if (j > 0) d *= delta * delta / (2.0 * (S + C));
        const double rho = 2.0 * d * (1.0 - std::cos(0.5 * delta)) / S;
        Candidate best;
        for (std::size_t count = 64; count <= 512; count *= 2) {
            std::vector<Candidate> cands(count);
            if (has_chart) {
                const double phase = uniform(rng, 0.0, 2.0 * kPi);
                for (std::size_t c = 0; c < count; ++c) {
                    Point w(static_cast<std::size_t>(tdim));
                    if (tdim == 2) {
                        const double a = phase + 2.0 * kPi * static_cast<double>(c) / static_cast<double>(count);
                        w = {std::cos(a), std::sin(a)};
                    } else if (tdim == 1) {
                        w = {c % 2 == 0 ? 1.0 : -1.0};
                    } else {
                        for (double& v : w) v = normal01(rng);
                    }
                    cands[c].w = std::move(w);
                }
            } else {
                std::vector<Point> fan = space.direction_fan(x, d, count, rng);
                cands.resize(fan.size());
                for (std::size_t c = 0; c < fan.size(); ++c) cands[c].pair.p = std::move(fan[c]);
            }
            std::vector<std::uint64_t> seeds(cands.size());
            for (auto& s : seeds) s = rng();

            auto evaluate = [&](Candidate& cand, std::uint64_t s) {
                Rng local(s);
                if (!cand.w.empty()) {
                    auto p = chart_point(space, x, cand.w, d);
                    if (!p) return;
                    cand.pair.p = std::move(*p);
                }
                auto q = opposite_point(space, params, x, cand.pair.p, cand.w.empty() ? nullptr : &cand.w, rho,
                                        delta, local);
                if (!q) return;
                cand.pair.q = std::move(*q);
                Strainer trial = cur;
                trial.pairs.push_back(cand.pair);
                cand.score = level_score(space, params, trial, static_cast<std::size_t>(j));
            };
            for_each_index(cands.size(), exec, [&](std::size_t c) { evaluate(cands[c], seeds[c]); });
            out.directions_tried += static_cast<int>(cands.size());
            for (auto& c : cands)
                if (c.score > best.score) best = c;

            // Local refinement of the best chart direction.
            if (!holds(best.score) && !best.w.empty() && std::isfinite(best.score)) {
                double sigma = 0.25;
                for (int it = 0; it < 48 && sigma > 1e-4; ++it) {
                    std::vector<Candidate> local(8);
                    for (auto& c : local) {
                        c.w = best.w;
                        const double nw = norm2(c.w);
                        for (double& v : c.w) v += sigma * nw * normal01(rng);
                    }
                    std::vector<std::uint64_t> ls(local.size());
                    for (auto& s : ls) s = rng();
                    for_each_index(local.size(), exec, [&](std::size_t c) { evaluate(local[c], ls[c]); });
                    bool improved = false;
                    for (auto& c : local)
                        if (c.score > best.score) {
                            best = c;
                            improved = true;
                        }
                    if (!improved) sigma *= 0.5;
                }
            }
            if (holds(best.score)) break;
        }
        if (best.pair.p.empty()) {
            out.best = cur;
            out.check = cur.pairs.empty() ? StrainerCheck{} : is_k_strainer(space, params, cur);
            return out;
        }
        cur.pairs.push_back(best.pair);
        if (!holds(best.score)) {
            out.best = cur;
            out.check = is_k_strainer(space, params, cur);
            return out;
        }
    }
    out.best = cur;
    out.check = is_k_strainer(space, params, cur);
    if (out.check.ok) out.strainer = cur;
    return out;
}

double strained_radius(const Space& space, const CurvatureParams& params, const Strainer& strainer, double r0,
                       std::size_t samples, std::uint64_t seed) {
    double r = std::min(r0, 0.99 * space.valid_radius(strainer.base));
    for (int i = 0; i < 60 && r > 0.0; ++i, r *= 0.5) {
        const auto pts = sample_ball(space, strainer.base, r, samples, derive_seed(seed, static_cast<std::uint64_t>(i)));
        const bool all = std::all_of(pts.begin(), pts.end(), [&](const Point& y) {
            return is_k_strainer_at(space, params, strainer, y).ok;
        });
        if (all) return r;
    }
    return 0.0;
}

namespace {

class Descent {
public:
    Descent(const Space& space, const Strainer& s, const std::vector<double>& v, double floor)
        : space_(space), s_(s), v_(v), floor_(floor) {}

    int steps = 0;

    double error(const Point& y, std::size_t m) const {
        double e = 0.0;
        for (std::size_t i = 0; i <= m; ++i) e += std::abs(space_.distance(s_.pairs[i].p, y) - v_[i]);
        return e;
    }

    // Brings coordinates 0..m of f(y) to v within tol.
    bool solve(Point& y, std::size_t m, double tol) {
        double best = kInf;
        int stalls = 0;
        for (int round = 0; round < 200; ++round) {
            // Inner levels may bottom out at roundoff; only the error at this level decides.
            if (m > 0) solve(y, m - 1, std::max(0.25 * tol, floor_));
            const double e = error(y, m);
            if (e <= tol) return true;
            if (e >= best && ++stalls > kMaxStalls) return false;
            best = std::min(best, e);
            if (!move(y, m)) return false;
            if (++steps > kMaxDescentSteps) return false;
        }
        return false;
    }

private:
    // Moves along a geodesic toward p_m or q_m until coordinate m hits v_m.
    bool move(Point& y, std::size_t m) {
        const Point& p = s_.pairs[m].p;
        const double fm = space_.distance(p, y);
        const double e = fm - v_[m];
        if (e == 0.0) return true;
        if (e > 0.0) {
            if (!(e < fm)) return false;
            const GeodesicSegment g = space_.geodesic(y, p);
            y = g.at_arclength(e);
            return true;
        }
        const Point& q = s_.pairs[m].q;
        const double L = space_.distance(y, q);
        if (!(L > 0.0)) return false;
        const GeodesicSegment g = space_.geodesic(y, q);
        auto h = [&](double t) { return space_.distance(p, g.at_arclength(t)) - v_[m]; };
        const double hL = h(L);
        if (hL < 0.0) return false;
        if (hL == 0.0) {
            y = g.end;
            return true;
        }
        std::uintmax_t iters = 100;
        const auto r = boost::math::tools::toms748_solve(h, 0.0, L, e, hL, boost::math::tools::eps_tolerance<double>(52),
                                                         iters);
        const double t = 0.5 * (r.first + r.second);
        y = g.at_arclength(t);
        return true;
    }

    const Space& space_;
    const Strainer& s_;
    const std::vector<double>& v_;
    double floor_;
};

}  // namespace

SolveResult solve_strainer_target(const Space& space, const Strainer& strainer, const Point& start,
                                  const std::vector<double>& v, double tol) {
    if (v.size() != strainer.pairs.size()) throw InputError("solve_strainer_target: target size mismatch");
    const double floor = 16.0 * kEps * roundoff_scale(strainer, v);
    Descent d(space, strainer, v, floor);
    SolveResult r;
    r.y = start;
    try {
        d.solve(r.y, v.size() - 1, tol);
        r.ok = true;
    } catch (const DegenerateError&) {
        r.ok = false;
    }
    r.residual = l1_dist(strainer_map(space, strainer, r.y), v);
    r.ok = r.ok && r.residual <= tol;
    r.steps = d.steps;
    return r;
}

namespace {

struct TargetOutcome {
    bool ok = false;
    double ratio = kInf;
    std::vector<double> v;
};

TargetOutcome run_target(const Space& space, const Strainer& strainer, double radius, const std::vector<double>& f0,
                         const std::vector<double>& v) {
    TargetOutcome o;
    o.v = v;
    const double w = l1_dist(f0, v);
    if (!(w > 0.0)) return o;
    const double tol = 1e-6 * w + 64.0 * kEps * roundoff_scale(strainer, v);
    const SolveResult s = solve_strainer_target(space, strainer, strainer.base, v, tol);
    if (!s.ok) return o;
    const double dist = space.distance(strainer.base, s.y);
    if (!(dist <= radius)) return o;
    o.ok = true;
    o.ratio = dist > 0.0 ? w / dist : kInf;
    return o;
}

OpennessReport fold_openness(std::vector<TargetOutcome>& outs) {
    OpennessReport rep;
    rep.targets_tried = outs.size();
    double best = kInf;
    for (auto& o : outs) {
        if (!o.ok) {
            ++rep.failures;
            if (rep.failed_target.empty()) rep.failed_target = o.v;
            continue;
        }
        if (o.ratio < best) {
            best = o.ratio;
            rep.worst_case = o.v;
        }
    }
    rep.achieved_epsilon = std::isfinite(best) ? best : 0.0;
    return rep;
}

}  // namespace

OpennessReport verify_openness(const Space& space, const Strainer& strainer, double radius, std::size_t targets,
                               std::uint64_t seed, Exec exec) {
    if (strainer.pairs.empty()) throw InputError("verify_openness: empty strainer");
    if (!(radius > 0.0)) throw InputError("verify_openness: radius must be > 0");
    if (targets < 1) throw InputError("verify_openness: targets must be >= 1");
    const std::size_t k = strainer.pairs.size();
    const double eps_k = strainer_constants(static_cast<int>(k), strainer.delta).epsilon_k;
    const std::vector<double> f0 = strainer_map(space, strainer, strainer.base);
    const double reach = 0.5 * eps_k * radius;
    std::vector<TargetOutcome> outs(targets);
    for_each_index(targets, exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        std::vector<double> w(k, 0.0);
        if (i < 2 * k) {
            w[i / 2] = (i % 2 == 0 ? 1.0 : -1.0);
        } else {
            for (double& c : w) c = normal01(rng);
        }
        double n1 = 0.0;
        for (double c : w) n1 += std::abs(c);
        const double mag = (i < 2 * k ? 0.5 : uniform(rng, 0.05, 1.0)) * reach;
        std::vector<double> v(f0);
        for (std::size_t j = 0; j < k; ++j) v[j] += w[j] * mag / n1;
        outs[i] = run_target(space, strainer, radius, f0, v);
    });
    return fold_openness(outs);
}

OpennessReport verify_openness_target(const Space& space, const Strainer& strainer, double radius,
                                      const std::vector<double>& v) {
    if (v.size() != strainer.pairs.size()) throw InputError("verify_openness: target size mismatch");
    std::vector<TargetOutcome> outs{run_target(space, strainer, radius, strainer_map(space, strainer, strainer.base), v)};
    return fold_openness(outs);
}

BiLipschitz estimate_bilipschitz(const Space& space, const Strainer& strainer, double radius, std::size_t trials,
                                 std::uint64_t seed, Exec exec) {
    if (trials < 1) throw InputError("estimate_bilipschitz: trials must be >= 1");
    const auto pts = sample_ball(space, strainer.base, radius, 2 * trials, seed);
    std::vector<double> ratio(trials + 1, std::numeric_limits<double>::quiet_NaN());
    auto pair_ratio = [&](const Point& a, const Point& b) {
        const double d = space.distance(a, b);
        if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return l1_dist(strainer_map(space, strainer, a), strainer_map(space, strainer, b)) / d;
    };
    for_each_index(trials, exec, [&](std::size_t i) { ratio[i] = pair_ratio(pts[2 * i], pts[2 * i + 1]); });
    ratio[trials] = pair_ratio(strainer.base, pts[0]);
    BiLipschitz b;
    for (double r : ratio) {
        if (std::isnan(r)) continue;
        b.lower = std::min(b.lower, r);
        b.upper = std::max(b.upper, r);
        ++b.pairs;
    }
    return b;
}

namespace {

Strainer tail(const Strainer& s, std::size_t from, double delta, const Point& base) {
    Strainer t;
    t.pairs.assign(s.pairs.begin() + static_cast<std::ptrdiff_t>(from), s.pairs.end());
    t.delta = delta;
    t.base = base;
    return t;
}

}  // namespace

ImproveResult improve_strainer(const Space& space, const CurvatureParams& params, const Strainer& strainer,
                               double dp, std::uint64_t seed) {
    if (!(dp > 0.0 && dp < strainer.delta)) throw InputError("improve_strainer: need 0 < delta' < delta");
    const StrainerCheck initial = is_k_strainer(space, params, strainer);
    if (!initial.ok) throw InputError("improve_strainer: input is not a strainer at its base");
    const std::size_t k = strainer.pairs.size();
    const double S = params.S, C = params.C;
    ImproveResult res;
    res.delta_below_delta_k = strainer.delta < strainer_constants(static_cast<int>(k), strainer.delta).delta_k;

    if (k == 1) {
        // Step toward p_1; the old base becomes the opposite point.
        const Point& p = strainer.pairs[0].p;
        const Point& x = strainer.base;
        const GeodesicSegment g = space.geodesic(x, p);
        const double L = g.length;
        double t = 0.5 * L;
        while (t > L * 1e-15 && !(bar_delta_S(S, t, L - t) < dp - kStrainerSlack)) t *= 0.5;
        for (int h = 0; h < 20; ++h, t *= 0.5) {
            Strainer out;
            out.pairs = {{p, x}};
            out.delta = dp;
            out.base = g.at_arclength(t);
            const StrainerCheck c = is_k_strainer(space, params, out);
            if (c.ok) {
                res.ok = true;
                res.strainer = std::move(out);
                res.check = c;
                res.r1 = t;
                res.base_shift = space.distance(res.strainer.base, x);
                return res;
            }
        }
        res.failed_stage = 1;
        res.strainer = strainer;
        return res;
    }

    const double eps_k = strainer_constants(static_cast<int>(k), strainer.delta).epsilon_k;
    Strainer cur = strainer;
    const double cos_a = std::cos(dp / 3.0);
    for (std::size_t stage = 0; stage < k; ++stage) {
        const Point x = cur.base;
        double m = kInf;
        for (const auto& pr : cur.pairs) m = std::min(m, space.distance(pr.p, x));
        double r = 0.9 * m * (1.0 - cos_a) / (S + C);
        r = strained_radius(space, params, cur, r, 16, derive_seed(seed, stage));
        if (stage == 0) res.r1 = r;
        else r = std::min(r, std::ldexp(res.r1, -static_cast<int>(stage)));
        res.stage_radius = r;
        bool accepted = false;
        for (int attempt = 0; attempt < 20 && !accepted && r > 0.0; ++attempt, r *= 0.5) {
            std::vector<double> v = strainer_map(space, cur, x);
            const double shift = 0.5 * eps_k * r;
            v[0] -= shift;
            const double tol = 1e-6 * shift + 64.0 * kEps * roundoff_scale(cur, v);
            const SolveResult sol = solve_strainer_target(space, cur, x, v, tol);
            if (!sol.ok) continue;
            const double l = space.distance(x, sol.y);
            if (!(l > 0.0) || l > r) continue;
            const GeodesicSegment g = space.geodesic(x, sol.y);
            const double rhs = std::sin(2.0 * dp / 3.0);
            double t = 0.5 * l;
            while (t > l * 1e-15 && !(bar_delta_SC(S, C, t, l - t) < dp / 8.0 &&
                                      0.1 * dp / 3.0 + 1.1 * t / (l - t) < rhs))
                t *= 0.5;
            for (int h = 0; h < 20; ++h, t *= 0.5) {
                const Point z = g.at_arclength(t);
                Strainer next = tail(cur, 1, strainer.delta, z);
                next.pairs.push_back({sol.y, x});
                const StrainerCheck wide = is_k_strainer(space, params, next);
                const StrainerCheck fine = is_k_strainer(space, params, tail(next, k - stage - 1, dp, z));
                if (wide.ok && fine.ok) {
                    cur = std::move(next);
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            res.failed_stage = static_cast<int>(stage) + 1;
            res.strainer = cur;
            res.base_shift = space.distance(cur.base, strainer.base);
            return res;
        }
    }
    cur.delta = dp;
    res.check = is_k_strainer(space, params, cur);
    res.ok = res.check.ok;
    if (!res.ok) res.failed_stage = static_cast<int>(k);
    res.base_shift = space.distance(cur.base, strainer.base);
    res.strainer = std::move(cur);
    return res;
}

StrainerNumber strainer_number(const Space& space, const CurvatureParams& params, const Point& x, double delta,
                               const std::vector<double>& scales, std::uint64_t seed, int max_k,
                               std::size_t points_per_scale) {
    if (scales.empty()) throw InputError("strainer_number: no scales");
    if (points_per_scale < 1) throw InputError("strainer_number: points_per_scale must be >= 1");
    StrainerNumber out;
    const std::size_t needed = std::min<std::size_t>(2, scales.size());
    for (int k = 1; k <= max_k; ++k) {
        if (!(delta < strainer_constants(k, delta).delta_k)) out.delta_below_delta_k = false;
        std::vector<bool> row;
        std::size_t consecutive = 0;
        bool fails = false;
        for (std::size_t si = 0; si < scales.size(); ++si) {
            const double s = std::min(scales[si], 0.99 * space.valid_radius(x));
            std::vector<Point> pts{x};
            if (points_per_scale > 1) {
                auto more = sample_ball(space, x, s, points_per_scale - 1,
                                        derive_seed(seed, static_cast<std::uint64_t>(k), si));
                pts.insert(pts.end(), more.begin(), more.end());
            }
            bool found = false;
            for (std::size_t pi = 0; pi < pts.size() && !found; ++pi) {
                const FindResult fr = find_strainer(space, params, pts[pi], k, delta, s,
                                                    derive_seed(seed, static_cast<std::uint64_t>(k) * 1000 + si, pi),
                                                    Exec::serial);
                found = fr.strainer.has_value();
            }
            row.push_back(found);
            consecutive = found ? 0 : consecutive + 1;
            if (consecutive >= needed) fails = true;
        }
        out.found.push_back(row);
        if (fails) break;
        out.number = k;
    }
    return out;
}

}  // namespace bclab
