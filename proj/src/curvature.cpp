#include "bclab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace bclab {

namespace {

constexpr double kFixedT[] = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
constexpr int kRandomT = 20;

std::vector<double> trial_ts(Rng& rng) {
    std::vector<double> ts(std::begin(kFixedT), std::end(kFixedT));
    for (int i = 0; i < kRandomT; ++i) {
        double t = uniform01(rng);
        while (t <= 0.0) t = uniform01(rng);
        ts.push_back(t);
    }
    return ts;
}

struct Config {
    Point p, a, b;
};

// Basis vector combination in an lp chart.
Point lp_combo(int n, int i, double ci, int j, double cj) {
    Point v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] += ci;
    v[static_cast<std::size_t>(j)] += cj;
    return v;
}

void axpy(Point& y, double a, const Point& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Symmetric configurations where lp inequalities are tight: short segments
// orthogonal to a diagonal direction, axis-aligned segments seen from
// another axis, and segments between equal-norm points.
std::optional<Config> structured_lp_config(const LpSpace& lp, std::size_t index, Rng& rng) {
    const int n = lp.dimension();
    if (n < 2) return std::nullopt;
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    if (j >= i) ++j;
    const double si = (rng() & 1) ? 1.0 : -1.0, sj = (rng() & 1) ? 1.0 : -1.0;
    Point p = lp.random_point(rng);
    const double rho = uniform(rng, 0.3, 1.0);
    Config c;
    switch (index % 3) {
        case 0: {
            Point diag = lp_combo(n, i, si, j, sj);
            Point anti = lp_combo(n, i, si, j, -sj);
            const double nd = lp.norm(diag), na = lp.norm(anti);
            const double len = rho * log_uniform(rng, 1e-3, 1e-1);
            Point mid = p;
            axpy(mid, rho / nd, diag);
            c.a = mid;
            c.b = mid;
            axpy(c.a, -0.5 * len / na, anti);
            axpy(c.b, 0.5 * len / na, anti);
            break;
        }
        case 1: {
            const double half = rho * log_uniform(rng, 1e-2, 1.0);
            c.a = p;
            c.b = p;
            c.a[static_cast<std::size_t>(i)] -= half;
            c.b[static_cast<std::size_t>(i)] += half;
            p[static_cast<std::size_t>(j)] += sj * rho;
            break;
        }
        default: {
            Point u(static_cast<std::size_t>(n));
            for (double& x : u) x = normal01(rng);
            Point v = u;
            v[static_cast<std::size_t>(i)] = -v[static_cast<std::size_t>(i)];
            const double nu = lp.norm(u), nv = lp.norm(v);
            c.a = p;
            c.b = p;
            axpy(c.a, rho / nu, u);
            axpy(c.b, rho / nv, v);
            break;
        }
    }
    c.p = std::move(p);
    if (lp.distance(c.a, c.b) == 0.0 || lp.distance(c.p, c.a) == 0.0) return std::nullopt;
    return c;
}

std::optional<Config> random_config(const Space& space, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Point a = space.random_point(rng);
        const double len = log_uniform(rng, 1e-3, 1.0);
        auto b = space.point_at_distance(a, len, rng);
        if (!b) continue;
        std::optional<Point> p;
        if (uniform01(rng) < 0.5) p = space.random_point(rng);
        else p = space.point_at_distance(a, log_uniform(rng, 1e-3, 1.0), rng);
        if (!p || space.distance(*p, a) == 0.0 || space.distance(a, *b) == 0.0) continue;
        return Config{std::move(*p), std::move(a), std::move(*b)};
    }
    return std::nullopt;
}

std::optional<Config> trial_config(const Space& space, std::size_t index, std::size_t structured_count, Rng& rng) {
    if (index < structured_count) {
        if (const auto* lp = dynamic_cast<const LpSpace*>(&space)) {
            if (auto c = structured_lp_config(*lp, index, rng)) return c;
        }
    }
    return random_config(space, rng);
}

std::size_t structured_budget(std::size_t trials, const CheckOptions& opts) {
    return opts.structured ? std::min<std::size_t>(trials / 4, 4000) : 0;
}

struct TrialResult {
    double residual = kInf;
    Witness witness;
};

ResidualReport fold(std::string check, std::vector<TrialResult>& results, std::uint64_t seed) {
    ResidualReport rep;
    rep.check = std::move(check);
    rep.trials = results.size();
    rep.seed = seed;
    for (auto& r : results) {
        if (r.residual < rep.worst_residual) {
            rep.worst_residual = r.residual;
            rep.worst_witness = std::move(r.witness);
        }
    }
    return rep;
}

double sup_distance_on_grid(const Space& space, const Point& p, const GeodesicSegment& g) {
    double m = std::max(space.distance(p, g.start), space.distance(p, g.end));
    for (int k = 1; k < 32; ++k) m = std::max(m, space.distance(p, g.at(k / 32.0)));
    return m;
}

// Samples a configuration whose geodesic stays inside B(p, D).
std::optional<Config> config_within(const Space& space, double D, Rng& rng) {
    if (!std::isfinite(D)) return random_config(space, rng);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Point p = space.random_point(rng);
        auto a = space.point_at_distance(p, uniform(rng, 0.0, 0.95) * D, rng);
        if (!a) continue;
        auto b = space.point_at_distance(*a, log_uniform(rng, 1e-3, 1.0) * D, rng);
        if (!b || space.distance(*a, *b) == 0.0 || space.distance(p, *a) == 0.0) continue;
        const GeodesicSegment g = space.geodesic(*a, *b);
        if (sup_distance_on_grid(space, p, g) < D) return Config{std::move(p), std::move(*a), std::move(*b)};
    }
    return std::nullopt;
}

}  // namespace

double s_concavity_residual(const Space& space, const Point& p, const GeodesicSegment& xi, double t, double S) {
    const double a = space.distance(p, xi.start), b = space.distance(p, xi.end), L = xi.length;
    const double m = space.distance(p, xi.at(t));
    const double scale = std::max({a, b, L});
    const double rhs = (1.0 - t) * a * a + t * b * b - S * t * (1.0 - t) * L * L;
    return (m * m - rhs) / (scale * scale);
}

double semiconvexity_residual(const Space& space, const Point& p, const GeodesicSegment& xi, double t, double C) {
    const double a = space.distance(p, xi.start), b = space.distance(p, xi.end), L = xi.length;
    const double m = space.distance(p, xi.at(t));
    const double scale = std::max({a, b, L});
    const double rhs = (1.0 - t) * a * a + t * b * b + C * t * (1.0 - t) * L * L;
    return (rhs - m * m) / (scale * scale);
}

ResidualReport check_s_concavity(const Space& space, const CurvatureParams& params, std::size_t trials,
                                 std::uint64_t seed, const CheckOptions& opts) {
    if (trials < 1) throw InputError("check_s_concavity: trials must be >= 1");
    const std::size_t structured = structured_budget(trials, opts);
    std::vector<TrialResult> results(trials);
    for_each_index(trials, opts.exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        auto cfg = trial_config(space, i, structured, rng);
        if (!cfg) return;
        const GeodesicSegment g = space.geodesic(cfg->a, cfg->b);
        for (double t : trial_ts(rng)) {
            const double r = s_concavity_residual(space, cfg->p, g, t, params.S);
            if (r < results[i].residual) {
                results[i].residual = r;
                results[i].witness = {"s_concavity", {cfg->p, cfg->a, cfg->b}, {t, params.S}};
            }
        }
    });
    return fold("s_concavity", results, seed);
}

ResidualReport check_local_semiconvexity(const Space& space, const CurvatureParams& params, std::size_t trials,
                                         std::uint64_t seed, const CheckOptions& opts) {
    if (trials < 1) throw InputError("check_local_semiconvexity: trials must be >= 1");
    std::vector<TrialResult> results(trials);
    std::vector<char> fitted(trials, 0);
    for_each_index(trials, opts.exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        auto cfg = config_within(space, params.D, rng);
        if (!cfg) return;
        fitted[i] = 1;
        const GeodesicSegment g = space.geodesic(cfg->a, cfg->b);
        for (double t : trial_ts(rng)) {
            const double r = semiconvexity_residual(space, cfg->p, g, t, params.C);
            if (r < results[i].residual) {
                results[i].residual = r;
                results[i].witness = {"semiconvexity", {cfg->p, cfg->a, cfg->b}, {t, params.C}};
            }
        }
    });
    if (std::none_of(fitted.begin(), fitted.end(), [](char c) { return c != 0; }))
        throw DomainError("check_local_semiconvexity: no configuration fits inside the radius D");
    return fold("semiconvexity", results, seed);
}

namespace {

double busemann_ratio(const Space& space, const GeodesicSegment& g, const GeodesicSegment& h, double t) {
    return space.distance(g.at(t), h.at(t)) / t;
}

double busemann_residual(const Space& space, const GeodesicSegment& g, const GeodesicSegment& h, double ta, double tb,
                         double dir) {
    const double scale = std::max(g.length, h.length);
    const double ra = busemann_ratio(space, g, h, ta), rb = busemann_ratio(space, g, h, tb);
    return dir * (rb - ra) / scale;
}

}  // namespace

ResidualReport check_busemann_monotone(const Space& space, BusemannDirection direction, std::size_t trials,
                                       std::uint64_t seed, const CheckOptions& opts) {
    if (trials < 1) throw InputError("check_busemann_monotone: trials must be >= 1");
    const double dir = direction == BusemannDirection::concave ? 1.0 : -1.0;
    std::vector<TrialResult> results(trials);
    for_each_index(trials, opts.exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        for (int attempt = 0; attempt < 100; ++attempt) {
            Point x = space.random_point(rng);
            auto y = space.point_at_distance(x, log_uniform(rng, 1e-3, 1.0), rng);
            auto z = space.point_at_distance(x, log_uniform(rng, 1e-3, 1.0), rng);
            if (!y || !z) continue;
            const GeodesicSegment g = space.geodesic(x, *y), h = space.geodesic(x, *z);
            // Below this parameter the chart coordinates of g(t), h(t) no
            // longer resolve their separation to about 1e-11.
            double coord = 1.0;
            for (double v : x) coord = std::max(coord, 1.0 + std::abs(v));
            const double tmin = std::max(1e-6, 1e-5 * coord / std::min(g.length, h.length));
            std::vector<double> ts;
            for (int j = 0; j <= 15 && std::ldexp(1.0, -j) >= tmin; ++j) ts.push_back(std::ldexp(1.0, -j));
            for (int j = 0; j < 10; ++j) ts.push_back(std::max(uniform01(rng), std::min(tmin, 1.0)));
            std::sort(ts.begin(), ts.end(), std::greater<>());
            for (std::size_t k = 1; k < ts.size(); ++k) {
                if (ts[k] == ts[k - 1]) continue;
                const double r = busemann_residual(space, g, h, ts[k - 1], ts[k], dir);
                if (r < results[i].residual) {
                    results[i].residual = r;
                    results[i].witness = {"busemann", {x, *y, *z}, {ts[k - 1], ts[k], dir}};
                }
            }
            return;
        }
    });
    return fold(direction == BusemannDirection::concave ? "busemann_concave" : "busemann_convex", results, seed);
}

double norm_uniform_residual(const NormFn& norm, UniformMode mode, double power, double constant,
                             std::span<const double> u, std::span<const double> v) {
    const std::size_t n = u.size();
    std::vector<double> m(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = 0.5 * (u[i] + v[i]);
        d[i] = u[i] - v[i];
    }
    const double nu = norm(u), nv = norm(v), nm = norm(m), nd = norm(d);
    const double scale = std::pow(std::max(nu, nv), power);
    const double avg = 0.5 * std::pow(nu, power) + 0.5 * std::pow(nv, power);
    const double mid = std::pow(nm, power), dif = std::pow(nd, power);
    if (mode == UniformMode::smooth) return (mid - (avg - 0.25 * constant * dif)) / scale;
    return ((avg - dif / (4.0 * constant)) - mid) / scale;
}

namespace {

void norm_pair(int n, std::size_t index, bool structured, Rng& rng, std::vector<double>& u, std::vector<double>& v) {
    const auto dim = static_cast<std::size_t>(n);
    u.assign(dim, 0.0);
    v.assign(dim, 0.0);
    const double len = log_uniform(rng, 1e-2, 1e2);
    if (structured) {
        const std::size_t i = rng() % dim;
        std::size_t j = dim > 1 ? rng() % (dim - 1) : 0;
        if (dim > 1 && j >= i) ++j;
        switch (index % 4) {
            case 0:  // u = -v or u = v
                for (auto& c : u) c = normal01(rng) * len;
                for (std::size_t k = 0; k < dim; ++k) v[k] = (index % 8 == 0) ? u[k] : -u[k];
                return;
            case 1:  // axis pair
                u[i] = len;
                v[dim > 1 ? j : i] = (rng() & 1) ? len : -len;
                return;
            case 2: {  // diagonal base with a small anti-diagonal difference
                const double eps = log_uniform(rng, 1e-4, 1e-1) * len;
                u[i] = v[i] = len;
                if (dim > 1) u[j] = v[j] = len;
                u[i] += eps;
                v[i] -= eps;
                if (dim > 1) {
                    u[j] -= eps;
                    v[j] += eps;
                }
                return;
            }
            default:  // equal-norm pair obtained by a coordinate reflection
                for (auto& c : u) c = normal01(rng) * len;
                v = u;
                v[i] = -v[i];
                return;
        }
    }
    for (auto& c : u) c = normal01(rng) * len;
    if (uniform01(rng) < 0.5) {
        for (auto& c : v) c = normal01(rng) * len * log_uniform(rng, 0.1, 10.0);
    } else {
        const double eps = log_uniform(rng, 1e-4, 1.0);
        for (std::size_t k = 0; k < dim; ++k) v[k] = u[k] + eps * len * normal01(rng);
    }
}

}  // namespace

ResidualReport check_norm_uniform(const NormFn& norm, int dim, UniformMode mode, double power, double constant,
                                  std::size_t trials, std::uint64_t seed, const CheckOptions& opts) {
    if (trials < 1) throw InputError("check_norm_uniform: trials must be >= 1");
    if (!(power > 1.0)) throw InputError("check_norm_uniform: power must be > 1");
    if (!(constant >= 1.0)) throw InputError("check_norm_uniform: constant must be >= 1");
    if (dim < 1) throw InputError("check_norm_uniform: dimension must be >= 1");
    const std::size_t structured = structured_budget(trials, opts);
    std::vector<TrialResult> results(trials);
    for_each_index(trials, opts.exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        std::vector<double> u, v;
        norm_pair(dim, i, i < structured, rng, u, v);
        const double r = norm_uniform_residual(norm, mode, power, constant, u, v);
        results[i].residual = r;
        results[i].witness = {"norm_uniform", {u, v},
                              {0.0, mode == UniformMode::smooth ? 1.0 : 0.0, power, constant}};
    });
    return fold(mode == UniformMode::smooth ? "norm_smooth" : "norm_convex", results, seed);
}

ResidualReport check_norm_uniform(double p_norm, UniformMode mode, double power, double constant, std::size_t trials,
                                  std::uint64_t seed, int dim, const CheckOptions& opts) {
    if (!(p_norm >= 2.0)) throw InputError("check_norm_uniform: norm exponent must be >= 2");
    const NormFn norm = [p_norm](std::span<const double> v) { return lp_norm(v.data(), v.size(), p_norm); };
    ResidualReport rep = check_norm_uniform(norm, dim, mode, power, constant, trials, seed, opts);
    if (!rep.worst_witness.scalars.empty()) rep.worst_witness.scalars[0] = p_norm;
    return rep;
}

namespace {

double tight_constant(const Space& space, const Config& c, Rng& rng, bool concave) {
    const GeodesicSegment g = space.geodesic(c.a, c.b);
    const double a = space.distance(c.p, c.a), b = space.distance(c.p, c.b), L = g.length;
    double best = -kInf;
    for (double t : trial_ts(rng)) {
        const double m = space.distance(c.p, g.at(t));
        const double lin = (1.0 - t) * a * a + t * b * b;
        const double k = (concave ? (lin - m * m) : (m * m - lin)) / (t * (1.0 - t) * L * L);
        best = std::max(best, k);
    }
    return best;
}

}  // namespace

double estimate_best_S(const Space& space, std::size_t trials, std::uint64_t seed, const CheckOptions& opts) {
    if (trials < 1) throw InputError("estimate_best_S: trials must be >= 1");
    const std::size_t structured = structured_budget(trials, opts);
    std::vector<double> best(trials, -kInf);
    for_each_index(trials, opts.exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        if (auto cfg = trial_config(space, i, structured, rng)) best[i] = tight_constant(space, *cfg, rng, true);
    });
    return *std::max_element(best.begin(), best.end());
}

double estimate_best_C(const Space& space, double D, std::size_t trials, std::uint64_t seed,
                       const CheckOptions& opts) {
    if (trials < 1) throw InputError("estimate_best_C: trials must be >= 1");
    std::vector<double> best(trials, -kInf);
    for_each_index(trials, opts.exec, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        if (auto cfg = config_within(space, D, rng)) best[i] = tight_constant(space, *cfg, rng, false);
    });
    const double c = *std::max_element(best.begin(), best.end());
    if (c == -kInf) throw DomainError("estimate_best_C: no configuration fits inside the radius D");
    return std::max(0.0, c);
}

double evaluate_witness(const Space* space, const Witness& w, const NormFn* norm) {
    if (w.check == "norm_uniform") {
        if (w.points.size() != 2 || w.scalars.size() != 4) throw InputError("witness: malformed norm_uniform witness");
        const UniformMode mode = w.scalars[1] > 0.5 ? UniformMode::smooth : UniformMode::convex;
        NormFn lp;
        if (!norm) {
            const double p = w.scalars[0];
            if (!(p >= 1.0)) throw InputError("witness: norm_uniform witness needs a norm");
            lp = [p](std::span<const double> v) { return lp_norm(v.data(), v.size(), p); };
            norm = &lp;
        }
        return norm_uniform_residual(*norm, mode, w.scalars[2], w.scalars[3], w.points[0], w.points[1]);
    }
    if (!space) throw InputError("witness: a space is required");
    if (w.points.size() != 3) throw InputError("witness: expected three points");
    for (const auto& p : w.points) space->validate(p);
    if (w.check == "s_concavity" || w.check == "semiconvexity") {
        if (w.scalars.size() != 2) throw InputError("witness: expected (t, constant)");
        const GeodesicSegment g = space->geodesic(w.points[1], w.points[2]);
        return w.check == "s_concavity" ? s_concavity_residual(*space, w.points[0], g, w.scalars[0], w.scalars[1])
                                        : semiconvexity_residual(*space, w.points[0], g, w.scalars[0], w.scalars[1]);
    }
    if (w.check == "busemann") {
        if (w.scalars.size() != 3) throw InputError("witness: expected (t_a, t_b, direction)");
        const GeodesicSegment g = space->geodesic(w.points[0], w.points[1]);
        const GeodesicSegment h = space->geodesic(w.points[0], w.points[2]);
        return busemann_residual(*space, g, h, w.scalars[0], w.scalars[1], w.scalars[2]);
    }
    throw InputError("witness: unknown check '" + w.check + "'");
}

}  // namespace bclab
