#include "bclab/tangent.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bclab/comparison.hpp"

namespace bclab {

namespace {

constexpr double kFitTolerance = 1e-3;
constexpr double kConvexTolerance = 1e-4;
constexpr int kHarmonicDegree = 14;
constexpr int kHeldOut = 64;

// Real spherical harmonics up to degree L at a unit vector, via the fully
// normalized associated Legendre recurrence.
std::vector<double> harmonics(std::span<const double> u, int L) {
    const double z = std::clamp(u[2], -1.0, 1.0), s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = std::atan2(u[1], u[0]);
    const auto idx = [](int l, int m) { return static_cast<std::size_t>(l * l + l + m); };
    std::vector<double> P(static_cast<std::size_t>((L + 1) * (L + 1)), 0.0), Y(P.size(), 0.0);
    P[idx(0, 0)] = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= L; ++m) P[idx(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * P[idx(m - 1, m - 1)];
    for (int m = 0; m < L; ++m) P[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * z * P[idx(m, m)];
    for (int m = 0; m <= L; ++m)
        for (int l = m + 2; l <= L; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
            const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
            P[idx(l, m)] = a * (z * P[idx(l - 1, m)] - b * P[idx(l - 2, m)]);
        }
    for (int l = 0; l <= L; ++l) {
        Y[idx(l, 0)] = P[idx(l, 0)];
        for (int m = 1; m <= l; ++m) {
            Y[idx(l, m)] = std::sqrt(2.0) * P[idx(l, m)] * std::cos(m * phi);
            Y[idx(l, -m)] = std::sqrt(2.0) * P[idx(l, m)] * std::sin(m * phi);
        }
    }
    return Y;
}

}  // namespace

double FinitePointedSample::diameter() const {
    double m = 0.0;
    for (double v : d) m = std::max(m, v);
    return m;
}

void FinitePointedSample::validate() const {
    if (n == 0) throw InputError("sample: empty");
    if (d.size() != n * n) throw InputError("sample: distance matrix is not square");
    if (base >= n) throw InputError("sample: base index out of range");
    for (std::size_t i = 0; i < n; ++i) {
        if (at(i, i) != 0.0) throw InputError("sample: non-zero diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            if (!(at(i, j) >= 0.0) || std::abs(at(i, j) - at(j, i)) > 1e-9) throw InputError("sample: not symmetric");
            for (std::size_t k = 0; k < n; ++k)
                if (at(i, k) > at(i, j) + at(j, k) + 1e-9) throw InputError("sample: triangle inequality fails");
        }
    }
}

FinitePointedSample FinitePointedSample::scaled(double lambda) const {
    FinitePointedSample s = *this;
    for (double& v : s.d) v *= lambda;
    return s;
}

FinitePointedSample FinitePointedSample::from_points(const Space& space, const std::vector<Point>& pts,
                                                     std::size_t base, double scale) {
    FinitePointedSample s;
    s.n = pts.size();
    s.base = base;
    s.d.assign(s.n * s.n, 0.0);
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = i + 1; j < s.n; ++j) s.d[i * s.n + j] = s.d[j * s.n + i] = space.distance(pts[i], pts[j]) * scale;
    return s;
}

std::string FinitePointedSample::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "id";
    for (std::size_t j = 0; j < n; ++j) os << ',' << j;
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        os << i;
        for (std::size_t j = 0; j < n; ++j) os << ',' << at(i, j);
        os << '\n';
    }
    os << "base," << base << '\n';
    return os.str();
}

FinitePointedSample FinitePointedSample::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    if (!std::getline(is, line)) throw InputError("sample csv: missing header");
    const auto header = split(line);
    if (header.empty() || header[0] != "id") throw InputError("sample csv: header must start with 'id'");
    FinitePointedSample s;
    s.n = header.size() - 1;
    s.d.reserve(s.n * s.n);
    bool have_base = false;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        try {
            if (cells[0] == "base") {
                if (cells.size() != 2) throw InputError("sample csv: malformed base row");
                s.base = std::stoul(cells[1]);
                have_base = true;
                continue;
            }
            if (cells.size() != s.n + 1) throw InputError("sample csv: row width mismatch");
            for (std::size_t j = 1; j < cells.size(); ++j) s.d.push_back(std::stod(cells[j]));
        } catch (const std::logic_error&) {
            throw InputError("sample csv: unparsable cell");
        }
        ++rows;
    }
    if (rows != s.n || !have_base) throw InputError("sample csv: expected n rows and a base row");
    s.validate();
    return s;
}

FinitePointedSample blowup_sample(const Space& space, const Point& x, double lambda, std::size_t count, double radius,
                                  std::uint64_t seed) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InputError("blowup_sample: lambda must lie in (0, 1]");
    if (count < 1) throw InputError("blowup_sample: count must be >= 1");
    if (!(radius > 0.0)) throw InputError("blowup_sample: radius must be > 0");
    std::vector<Point> pts{x};
    if (count > 1) {
        auto more = sample_ball(space, x, lambda * radius, count - 1, seed);
        pts.insert(pts.end(), more.begin(), more.end());
    } else {
        space.validate(x);
    }
    return FinitePointedSample::from_points(space, pts, 0, 1.0 / lambda);
}

namespace {

// Pads with copies of the base point.
FinitePointedSample pad(const FinitePointedSample& s, std::size_t n) {
    if (s.n == n) return s;
    FinitePointedSample p;
    p.n = n;
    p.base = s.base;
    p.d.assign(n * n, 0.0);
    auto src = [&](std::size_t i) { return i < s.n ? i : s.base; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p.d[i * n + j] = s.at(src(i), src(j));
    return p;
}

double distortion(const FinitePointedSample& a, const FinitePointedSample& b, const std::vector<std::size_t>& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = i + 1; j < a.n; ++j) worst = std::max(worst, std::abs(a.at(i, j) - b.at(m[i], m[j])));
    return worst;
}

// Branch and bound over base-preserving bijections.
class ExactSearch {
public:
    ExactSearch(const FinitePointedSample& a, const FinitePointedSample& b) : a_(a), b_(b) {
        for (std::size_t i = 0; i < a.n; ++i)
            if (i != a.base) order_.push_back(i);
    }

    const std::vector<std::size_t>& order() const { return order_; }

    // Best completion with order_[0] mapped to `first`.
    std::pair<double, std::vector<std::size_t>> run(std::size_t first) {
        std::vector<std::size_t> m(a_.n, a_.n);
        std::vector<char> used(b_.n, 0);
        m[a_.base] = b_.base;
        used[b_.base] = 1;
        best_ = kInf;
        best_map_.clear();
        if (order_.empty()) return {0.0, m};
        m[order_[0]] = first;
        used[first] = 1;
        const double d0 = std::abs(a_.at(order_[0], a_.base) - b_.at(first, b_.base));
        dfs(1, d0, m, used);
        return {best_, best_map_};
    }

private:
    void dfs(std::size_t level, double cur, std::vector<std::size_t>& m, std::vector<char>& used) {
        if (cur >= best_) return;
        if (level == order_.size()) {
            best_ = cur;
            best_map_ = m;
            return;
        }
        const std::size_t i = order_[level];
        for (std::size_t c = 0; c < b_.n; ++c) {
            if (used[c]) continue;
            double w = std::abs(a_.at(i, a_.base) - b_.at(c, b_.base));
            for (std::size_t l = 0; l < level && w < best_; ++l) {
                const std::size_t j = order_[l];
                w = std::max(w, std::abs(a_.at(i, j) - b_.at(c, m[j])));
            }
            const double next = std::max(cur, w);
            if (next >= best_) continue;
            m[i] = c;
            used[c] = 1;
            dfs(level + 1, next, m, used);
            used[c] = 0;
            m[i] = a_.n;
        }
    }

    const FinitePointedSample& a_;
    const FinitePointedSample& b_;
    std::vector<std::size_t> order_;
    double best_ = kInf;
    std::vector<std::size_t> best_map_;
};

std::vector<std::size_t> greedy_correspondence(const FinitePointedSample& a, const FinitePointedSample& b) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < a.n; ++i)
        if (i != a.base) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a.at(i, a.base) < a.at(j, a.base); });
    std::vector<std::size_t> m(a.n, a.n);
    std::vector<char> used(b.n, 0);
    m[a.base] = b.base;
    used[b.base] = 1;
    std::vector<std::size_t> done{a.base};
    for (std::size_t i : order) {
        std::size_t best = b.n;
        double best_w = kInf;
        for (std::size_t c = 0; c < b.n; ++c) {
            if (used[c]) continue;
            double w = 0.0;
            for (std::size_t j : done) w = std::max(w, std::abs(a.at(i, j) - b.at(c, m[j])));
            if (w < best_w) {
                best_w = w;
                best = c;
            }
        }
        m[i] = best;
        used[best] = 1;
        done.push_back(i);
    }
    double cur = distortion(a, b, m);
    for (int pass = 0; pass < 20; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i < a.n; ++i) {
            if (i == a.base) continue;
            for (std::size_t j = i + 1; j < a.n; ++j) {
                if (j == a.base) continue;
                std::swap(m[i], m[j]);
                const double d = distortion(a, b, m);
                if (d < cur) {
                    cur = d;
                    improved = true;
                } else {
                    std::swap(m[i], m[j]);
                }
            }
        }
        if (!improved) break;
    }
    return m;
}

double base_row_hausdorff(const FinitePointedSample& a, const FinitePointedSample& b) {
    auto one_sided = [](const FinitePointedSample& x, const FinitePointedSample& y) {
        double h = 0.0;
        for (std::size_t i = 0; i < x.n; ++i) {
            double m = kInf;
            for (std::size_t j = 0; j < y.n; ++j) m = std::min(m, std::abs(x.at(i, x.base) - y.at(j, y.base)));
            h = std::max(h, m);
        }
        return h;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace

GhBounds gh_distance_bounds(const FinitePointedSample& a, const FinitePointedSample& b, std::size_t exact_limit,
                            Exec exec) {
    a.validate();
    b.validate();
    GhBounds out;
    out.lower = std::max(0.5 * std::abs(a.diameter() - b.diameter()), 0.5 * base_row_hausdorff(a, b));
    const std::size_t n = std::max(a.n, b.n);
    const FinitePointedSample pa = pad(a, n), pb = pad(b, n);
    if (a.n <= exact_limit && b.n <= exact_limit) {
        ExactSearch probe(pa, pb);
        if (probe.order().empty()) {
            out.upper = 0.0;
            out.exact = true;
            out.correspondence = {pb.base};
            return out;
        }
        std::vector<std::size_t> firsts;
        for (std::size_t c = 0; c < n; ++c)
            if (c != pb.base) firsts.push_back(c);
        std::vector<std::pair<double, std::vector<std::size_t>>> blocks(firsts.size());
        for_each_index(firsts.size(), exec, [&](std::size_t i) {
            ExactSearch s(pa, pb);
            blocks[i] = s.run(firsts[i]);
        });
        std::size_t best = 0;
        for (std::size_t i = 1; i < blocks.size(); ++i)
            if (blocks[i].first < blocks[best].first) best = i;
        out.upper = 0.5 * blocks[best].first;
        out.correspondence = blocks[best].second;
        out.exact = true;
    } else {
        out.correspondence = greedy_correspondence(pa, pb);
        out.upper = 0.5 * distortion(pa, pb, out.correspondence);
    }
    out.lower = std::min(out.lower, out.upper);
    return out;
}

IsometryVerdict eps_isometry_check(const std::vector<std::size_t>& map, const FinitePointedSample& a,
                                   const FinitePointedSample& b, double eps) {
    if (!(eps > 0.0)) throw InputError("eps_isometry_check: eps must be > 0");
    if (map.size() != a.n) throw InputError("eps_isometry_check: map size mismatch");
    for (std::size_t m : map)
        if (m >= b.n) throw InputError("eps_isometry_check: map target out of range");
    IsometryVerdict v;
    v.base = map[a.base] == b.base;
    const double R = 1.0 / eps;
    v.distortion = true;
    for (std::size_t i = 0; i < a.n && v.distortion; ++i) {
        if (!(a.at(a.base, i) < R)) continue;
        for (std::size_t j = 0; j < a.n; ++j) {
            if (!(a.at(a.base, j) < R)) continue;
            if (!(std::abs(a.at(i, j) - b.at(map[i], map[j])) < eps)) {
                v.distortion = false;
                break;
            }
        }
    }
    // For a finite sample the ball inclusion over r < 1/eps reduces to: every
    // w with |yw| + eps < 1/eps is eps-close to the image of some u with
    // |xu| <= |yw| + eps.
    v.net = true;
    for (std::size_t w = 0; w < b.n && v.net; ++w) {
        const double dw = b.at(b.base, w);
        if (!(dw + eps < R)) continue;
        bool covered = false;
        for (std::size_t u = 0; u < a.n && !covered; ++u)
            covered = a.at(a.base, u) <= dw + eps && b.at(map[u], w) < eps;
        v.net = covered;
    }
    return v;
}

TangentDistance tangent_metric(const Space& space, const DirectionWithLength& u, const DirectionWithLength& v) {
    const FixedScaleTrace tr = fixed_scale_trace(space, u.geodesic, v.geodesic, u.length, v.length);
    if (!tr.monotone_ok)
        throw CurvatureViolation("tangent_metric: rescaled distance ratio decreased; Busemann concavity fails");
    TangentDistance out;
    out.ratios = tr.ratio;
    out.value = *std::max_element(tr.ratio.begin(), tr.ratio.end());
    out.angle = comparison_angle(u.length, v.length, tr.ratio.back());
    const double t = u.length, s = v.length;
    const double law = t * t + s * s - 2.0 * t * s * std::cos(out.angle);
    out.relation_error = std::abs(tr.ratio.back() * tr.ratio.back() - law);
    return out;
}

double direction_angle_metric(const Space& space, const DirectionWithLength& u, const DirectionWithLength& v) {
    if (std::abs(u.length - v.length) > 1e-12 * std::max(u.length, v.length))
        throw InputError("direction_angle_metric: directions must share their length");
    return angle_fixed_scale(space, u.geodesic, v.geodesic, u.length, u.length).value;
}

namespace {

std::vector<std::size_t> greedy_separated(const std::vector<double>& ang, std::size_t n, double sep,
                                          const std::vector<std::size_t>& candidates) {
    std::vector<std::size_t> chosen;
    for (std::size_t i : candidates) {
        bool far = true;
        for (std::size_t j : chosen)
            if (ang[i * n + j] < sep) {
                far = false;
                break;
            }
        if (far) chosen.push_back(i);
    }
    return chosen;
}

}  // namespace

DirectionPacking packing_directions(const Space& space, const Point& x, double l, double eps, std::size_t budget,
                                    std::uint64_t seed, Exec exec) {
    if (!(eps > 0.0)) throw InputError("packing_directions: eps must be > 0");
    if (!(l > 0.0)) throw InputError("packing_directions: length must be > 0");
    if (budget < 1) throw InputError("packing_directions: budget must be >= 1");
    space.validate(x);
    Rng rng(seed);
    const double g = std::min(1.0, 0.5 * space.valid_radius(x));
    const std::vector<Point> ends = space.direction_fan(x, g, budget, rng);
    std::vector<DirectionWithLength> dirs;
    for (const Point& e : ends) dirs.push_back({space.geodesic(x, e), l});
    const std::size_t n = dirs.size();
    std::vector<double> ang(n * n, 0.0);
    for_each_index(n, exec, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) ang[i * n + j] = direction_angle_metric(space, dirs[i], dirs[j]);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) ang[i * n + j] = ang[j * n + i];

    DirectionPacking out;
    out.sampled = n;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto packing = greedy_separated(ang, n, eps, all);
    out.count = packing.size();
    out.direct = greedy_separated(ang, n, 0.25 * eps, all).size();

    std::size_t nd = 1;
    const std::size_t centers = std::min<std::size_t>(16, packing.size());
    for (std::size_t c = 0; c < centers; ++c) {
        const std::size_t ci = packing[c];
        for (double rho = kPi; rho >= 0.5 * eps; rho *= 0.5) {
            std::vector<std::size_t> ball;
            for (std::size_t i = 0; i < n; ++i)
                if (ang[ci * n + i] <= rho) ball.push_back(i);
            nd = std::max(nd, greedy_separated(ang, n, 0.5 * rho, ball).size());
        }
    }
    out.doubling = static_cast<double>(nd);
    const double steps = std::ceil(std::log2(4.0 * kPi / eps));
    out.bound = std::pow(out.doubling, std::max(0.0, steps));
    out.within_bound = static_cast<double>(out.count) <= out.bound && out.count <= out.direct;
    return out;
}

double FittedNorm::inverse_radius(std::span<const double> u) const {
    if (dim == 1) return u[0] >= 0.0 ? 1.0 / radius[0] : 1.0 / radius[1];
    if (dim == 2 && !cos_coef_.empty()) {
        const double psi = std::atan2(u[1], u[0]) - phase0_;
        const std::size_t half = cos_coef_.size() - 1;
        double g = 0.5 * cos_coef_[0];
        for (std::size_t k = 1; k < half; ++k) {
            const double kp = static_cast<double>(k) * psi;
            g += cos_coef_[k] * std::cos(kp) + sin_coef_[k] * std::sin(kp);
        }
        g += 0.5 * cos_coef_[half] * std::cos(static_cast<double>(half) * psi);
        return g;
    }
    if (dim == 3 && !sh_coef_.empty()) {
        const std::vector<double> Y = harmonics(u, kHarmonicDegree);
        return std::inner_product(Y.begin(), Y.end(), sh_coef_.begin(), 0.0);
    }
    // Nearest sampled directions, weighted by angular proximity.
    constexpr std::size_t kNear = 6;
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t i = 0; i < directions.size(); ++i) {
        double dot = 0.0;
        for (int c = 0; c < dim; ++c) dot += directions[i][static_cast<std::size_t>(c)] * u[static_cast<std::size_t>(c)];
        near.push_back({-dot, i});
    }
    const std::size_t m = std::min(kNear, near.size());
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(m), near.end());
    double wsum = 0.0, g = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double gap = std::acos(std::clamp(-near[i].first, -1.0, 1.0));
        if (gap < 1e-12) return 1.0 / radius[near[i].second];
        const double w = 1.0 / (gap * gap);
        wsum += w;
        g += w / radius[near[i].second];
    }
    return g / wsum;
}

void FittedNorm::build_interpolant() {
    cos_coef_.clear();
    sin_coef_.clear();
    sh_coef_.clear();
    const std::size_t K = static_cast<std::size_t>((kHarmonicDegree + 1) * (kHarmonicDegree + 1));
    if (dim == 3 && directions.size() >= 2 * K) {
        // Least-squares fit of 1/radius; a tiny ridge keeps the normal equations definite.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
        Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
        for (std::size_t i = 0; i < directions.size(); ++i) {
            const std::vector<double> Y = harmonics(directions[i], kHarmonicDegree);
            const Eigen::Map<const Eigen::VectorXd> y(Y.data(), static_cast<Eigen::Index>(K));
            A.selfadjointView<Eigen::Lower>().rankUpdate(y);
            b += y / radius[i];
        }
        A.diagonal().array() += 1e-12 * static_cast<double>(directions.size());
        const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(A);
        if (llt.info() != Eigen::Success) throw DomainError("fit_norm: harmonic fit is singular");
        const Eigen::VectorXd c = llt.solve(b);
        sh_coef_.assign(c.data(), c.data() + c.size());
        return;
    }
    if (dim != 2 || directions.size() < 4 || directions.size() % 2 != 0) return;
    const std::size_t N = directions.size();
    phase0_ = std::atan2(directions[0][1], directions[0][0]);
    const std::size_t half = N / 2;
    cos_coef_.assign(half + 1, 0.0);
    sin_coef_.assign(half + 1, 0.0);
    for (std::size_t k = 0; k <= half; ++k) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double psi = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(N);
            const double g = 1.0 / radius[i];
            a += g * std::cos(static_cast<double>(k) * psi);
            b += g * std::sin(static_cast<double>(k) * psi);
        }
        cos_coef_[k] = 2.0 * a / static_cast<double>(N);
        sin_coef_[k] = 2.0 * b / static_cast<double>(N);
    }
}

double FittedNorm::radius_at(std::span<const double> u) const {
    const double n = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    std::vector<double> unit(u.begin(), u.end());
    for (double& c : unit) c /= n;
    return 1.0 / inverse_radius(unit);
}

double FittedNorm::norm(std::span<const double> w) const {
    const double n = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (n == 0.0) return 0.0;
    std::vector<double> unit(w.begin(), w.end());
    for (double& c : unit) c /= n;
    return n * inverse_radius(unit);
}

NormFn FittedNorm::as_function() const {
    return [self = *this](std::span<const double> w) { return self.norm(w); };
}

FittedNorm fit_norm(const Space& space, const Point& x, const std::vector<double>& scales, std::size_t count,
                    std::uint64_t seed) {
    if (scales.empty()) throw InputError("fit_norm: no scales");
    for (double s : scales)
        if (!(s > 0.0)) throw InputError("fit_norm: scales must be > 0");
    space.validate(x);
    const int n = space.tangent_dim();
    Point probe(static_cast<std::size_t>(n), 0.0);
    probe[0] = scales.front();
    if (!space.chart_exp(x, probe)) throw DomainError("fit_norm: no linear tangent chart at this point");

    FittedNorm f;
    f.dim = n;
    Rng rng(seed);
    if (n == 1) {
        f.directions = {{1.0}, {-1.0}};
    } else if (n == 2) {
        const std::size_t N = std::max<std::size_t>(4, count + count % 2);
        const double phase = uniform(rng, 0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < N; ++i) {
            const double a = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(N);
            f.directions.push_back({std::cos(a), std::sin(a)});
        }
    } else {
        const std::size_t half = std::max<std::size_t>(1, count / 2);
        std::vector<Point> base;
        if (n == 3) {
            // Fibonacci lattice on a hemisphere under a random rotation.
            Point q(4);
            for (double& c : q) c = normal01(rng);
            const double nq = norm2(q);
            for (double& c : q) c /= nq;
            const double w = q[0], a = q[1], b = q[2], c = q[3];
            const double R[3][3] = {{1 - 2 * (b * b + c * c), 2 * (a * b - w * c), 2 * (a * c + w * b)},
                                    {2 * (a * b + w * c), 1 - 2 * (a * a + c * c), 2 * (b * c - w * a)},
                                    {2 * (a * c - w * b), 2 * (b * c + w * a), 1 - 2 * (a * a + b * b)}};
            const double golden = kPi * (3.0 - std::sqrt(5.0));
            for (std::size_t i = 0; i < half; ++i) {
                const double z = (static_cast<double>(i) + 0.5) / static_cast<double>(half);
                const double rho = std::sqrt(1.0 - z * z), ph = golden * static_cast<double>(i);
                const double v[3] = {rho * std::cos(ph), rho * std::sin(ph), z};
                Point u(3);
                for (int r = 0; r < 3; ++r) u[r] = R[r][0] * v[0] + R[r][1] * v[1] + R[r][2] * v[2];
                base.push_back(u);
            }
        }
        for (std::size_t i = base.size(); i < half; ++i) {
            Point u(static_cast<std::size_t>(n));
            for (double& c : u) c = normal01(rng);
            const double nu = norm2(u);
            for (double& c : u) c /= nu;
            base.push_back(u);
        }
        f.directions = base;
        for (Point u : base) {
            for (double& c : u) c = -c;
            f.directions.push_back(u);
        }
    }

    const std::size_t N = f.directions.size();
    f.radius.assign(N, 0.0);
    f.radius_by_scale.assign(scales.size(), std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<double> r;
        for (std::size_t s = 0; s < scales.size(); ++s) {
            Point w = f.directions[i];
            for (double& c : w) c *= scales[s];
            const auto y = space.chart_exp(x, w);
            if (!y) throw DomainError("fit_norm: chart step leaves the model");
            const double d = space.distance(x, *y);
            f.radius_by_scale[s][i] = scales[s] / d;
            r.push_back(scales[s] / d);
        }
        std::vector<double> sorted = r;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size();
        f.radius[i] = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        f.drift = std::max(f.drift, (sorted.back() - sorted.front()) / f.radius[i]);
    }
    f.conical = f.drift <= kFitTolerance;
    for (std::size_t i = 0; i < N / 2; ++i)
        f.symmetry_error = std::max(f.symmetry_error, std::abs(f.radius[i] - f.radius[i + N / 2]) / f.radius[i]);
    f.symmetric = f.symmetry_error <= kFitTolerance;
    f.build_interpolant();

    // Held-out directions measured at the middle scale.
    const double mid_scale = scales[scales.size() / 2];
    for (int v = 0; v < kHeldOut; ++v) {
        Point u(static_cast<std::size_t>(n));
        for (double& c : u) c = normal01(rng);
        const double nu = norm2(u);
        for (double& c : u) c /= nu;
        Point w = u;
        for (double& c : w) c *= mid_scale;
        const auto y = space.chart_exp(x, w);
        if (!y) throw DomainError("fit_norm: chart step leaves the model");
        const double measured = mid_scale / space.distance(x, *y);
        f.interpolation_error = std::max(f.interpolation_error, std::abs(f.radius_at(u) - measured) / measured);
    }

    // Midpoints of boundary pairs must stay inside the unit ball.
    auto excess = [&](std::size_t i, std::size_t j) {
        Point mid(static_cast<std::size_t>(n));
        for (std::size_t c = 0; c < mid.size(); ++c)
            mid[c] = 0.5 * (f.radius[i] * f.directions[i][c] + f.radius[j] * f.directions[j][c]);
        return f.norm(mid) - 1.0;
    };
    const std::size_t offsets[] = {1, 2, 3, N / 8, N / 4, N / 3, N / 2 - 1};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t o : offsets)
            if (o > 0 && o < N) f.convexity_excess = std::max(f.convexity_excess, excess(i, (i + o) % N));
    for (int t = 0; t < 256; ++t) {
        const std::size_t i = rng() % N, j = rng() % N;
        if (i != j) f.convexity_excess = std::max(f.convexity_excess, excess(i, j));
    }
    f.convex = f.convexity_excess <= kConvexTolerance;
    return f;
}

NormCertification certify_norm(const FittedNorm& norm, double S, std::optional<ConvexHypothesis> convex,
                               std::size_t trials, std::uint64_t seed, Exec exec) {
    CheckOptions opts;
    opts.exec = exec;
    const NormFn fn = norm.as_function();
    NormCertification c;
    c.smooth = check_norm_uniform(fn, norm.dim, UniformMode::smooth, 2.0, S, trials, seed, opts);
    // A relative norm error e moves each power term by about power * e.
    auto allowance = [&](double power, double constant) {
        const double e = norm.interpolation_error;
        return power * e * (2.0 + std::max(constant, 1.0 / constant) * std::pow(2.0, power) / 4.0);
    };
    c.smooth_allowance = allowance(2.0, S);
    c.smooth_ok = c.smooth.worst_residual >= kViolationThreshold - c.smooth_allowance;
    if (convex) {
        c.convex = check_norm_uniform(fn, norm.dim, UniformMode::convex, convex->p, convex->constant, trials,
                                      derive_seed(seed, 1), opts);
        c.convex_allowance = allowance(convex->p, convex->constant);
        c.convex_ok = c.convex->worst_residual >= kViolationThreshold - c.convex_allowance;
    }
    return c;
}

}  // namespace bclab
