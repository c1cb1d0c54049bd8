#include "bclab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bclab {

namespace {

constexpr double kChartTol = 1e-12;

void require_dim(const Point& x, std::size_t n, const char* what) {
    if (x.size() != n) {
        std::ostringstream os;
        os << what << ": chart has " << x.size() << " coordinates, expected " << n;
        throw InputError(os.str());
    }
}

void require_finite(const Point& x, const char* what) {
    for (double c : x)
        if (!std::isfinite(c)) throw InputError(std::string(what) + ": non-finite coordinate");
}

double dot3(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Point cross3(const Point& a, const Point& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

void normalize3(Point& a) {
    const double n = std::sqrt(dot3(a, a));
    for (double& c : a) c /= n;
}

}  // namespace

void CurvatureParams::validate() const {
    if (!(S >= 1.0)) throw InputError("curvature params: S must be >= 1");
    if (!(C >= 0.0)) throw InputError("curvature params: C must be >= 0");
    if (!(D > 0.0)) throw InputError("curvature params: D must be > 0");
    if (n < 1) throw InputError("curvature params: n must be >= 1");
}

std::string kind_name(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::lp: return "lp";
        case SpaceKind::cone: return "cone";
        case SpaceKind::sphere: return "sphere";
        case SpaceKind::product: return "product";
    }
    return "unknown";
}

Point GeodesicSegment::at(double s) const {
    if (s <= 0.0) return start;
    if (s >= 1.0) return end;
    return eval(s);
}

std::vector<Point> Space::direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const {
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        if (auto y = point_at_distance(x, d, rng)) out.push_back(std::move(*y));
    return out;
}

// ---------------------------------------------------------------- lp

LpSpace::LpSpace(double p, int n) : p_(p), n_(n) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw InputError("lp: exponent p must lie in [2, inf)");
    if (n < 1) throw InputError("lp: dimension must be >= 1");
}

std::string LpSpace::label() const {
    std::ostringstream os;
    os << "l^" << p_ << "(R^" << n_ << ")";
    return os.str();
}

CurvatureParams LpSpace::declared() const { return {p_ - 1.0, 0.0, kInf, n_}; }

void LpSpace::validate(const Point& x) const {
    require_dim(x, chart_dim(), "lp");
    require_finite(x, "lp");
}

double LpSpace::distance(const Point& x, const Point& y) const {
    double buf[16];
    std::vector<double> heap;
    double* d = buf;
    if (x.size() > 16) {
        heap.resize(x.size());
        d = heap.data();
    }
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    return lp_norm(d, x.size(), p_);
}

GeodesicSegment LpSpace::geodesic(const Point& x, const Point& y) const {
    const double len = distance(x, y);
    if (len == 0.0) throw DegenerateError("geodesic: endpoints coincide");
    GeodesicSegment g;
    g.start = x;
    g.end = y;
    g.length = len;
    g.eval = [x, y](double s) {
        Point z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + s * (y[i] - x[i]);
        return z;
    };
    return g;
}

Point LpSpace::random_point(Rng& rng) const {
    Point z(chart_dim());
    for (double& c : z) c = uniform(rng, -1.0, 1.0);
    return z;
}

std::optional<Point> LpSpace::point_at_distance(const Point& x, double d, Rng& rng) const {
    Point u(chart_dim());
    double nu = 0.0;
    while (nu == 0.0) {
        for (double& c : u) c = normal01(rng);
        nu = norm(u);
    }
    Point y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += d * u[i] / nu;
    return y;
}

std::vector<Point> LpSpace::direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const {
    if (n_ != 2) {
        if (n_ == 1) {
            std::vector<Point> out;
            for (std::size_t i = 0; i < count; ++i) out.push_back({x[0] + ((i % 2 == 0) ? d : -d)});
            return out;
        }
        return Space::direction_fan(x, d, count, rng);
    }
    const double phase = uniform(rng, 0.0, 2.0 * kPi);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double phi = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
        const double u[2] = {std::cos(phi), std::sin(phi)};
        const double nu = lp_norm(u, 2, p_);
        out.push_back({x[0] + d * u[0] / nu, x[1] + d * u[1] / nu});
    }
    return out;
}

std::optional<Point> LpSpace::extend(const Point& p, const Point& x, double d) const {
    const double len = distance(p, x);
    if (len == 0.0) return std::nullopt;
    Point q(x);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += d * (x[i] - p[i]) / len;
    return q;
}

Region LpSpace::region(const Point& center, double r) const {
    Region reg;
    reg.measure = std::pow(2.0 * r, n_);
    reg.sample = [center, r](Rng& rng) {
        Point z(center);
        for (double& c : z) c += uniform(rng, -r, r);
        return z;
    };
    return reg;
}

std::optional<Point> LpSpace::chart_exp(const Point& x, std::span<const double> w) const {
    Point y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += w[i];
    return y;
}

// ---------------------------------------------------------------- cone

namespace {

double wrap_angle(double a, double theta) {
    double w = std::fmod(a, theta);
    if (w < 0.0) w += theta;
    if (w >= theta) w = 0.0;
    return w;
}

Point refold_point(double theta, double alpha, double px, double py) {
    const double rho = std::hypot(px, py);
    if (rho == 0.0) return {0.0, 0.0};
    return {rho, wrap_angle(alpha + std::atan2(py, px), theta)};
}

Point join_parts(const std::vector<Point>& parts) {
    Point z;
    for (const auto& p : parts) z.insert(z.end(), p.begin(), p.end());
    return z;
}

}  // namespace


ConeSpace::ConeSpace(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < 2.0 * kPi)) throw InputError("cone: angle must lie in (0, 2*pi)");
}

std::string ConeSpace::label() const {
    std::ostringstream os;
    os << "cone(theta=" << theta_ << ")";
    return os.str();
}

double ConeSpace::wrap(double a) const { return wrap_angle(a, theta_); }

double ConeSpace::signed_gap(double a, double b) const {
    const double d = wrap(b - a);
    return d <= 0.5 * theta_ ? d : d - theta_;
}

void ConeSpace::validate(const Point& x) const {
    require_dim(x, 2, "cone");
    require_finite(x, "cone");
    if (x[0] < 0.0) throw InputError("cone: radius must be >= 0");
    if (x[1] < 0.0 || x[1] >= theta_) throw InputError("cone: angle coordinate must lie in [0, theta)");
}

double ConeSpace::distance(const Point& x, const Point& y) const {
    const double r1 = x[0], r2 = y[0];
    if (r1 == 0.0 || r2 == 0.0) return r1 + r2;
    const double g = std::abs(signed_gap(x[1], y[1]));
    if (g >= kPi) return r1 + r2;
    const double s = std::sin(0.5 * g);
    const double dr = r1 - r2;
    return std::sqrt(dr * dr + 4.0 * r1 * r2 * s * s);
}

Point ConeSpace::refold(const Point& x, double px, double py) const { return refold_point(theta_, x[1], px, py); }

GeodesicSegment ConeSpace::geodesic(const Point& x, const Point& y) const {
    const double len = distance(x, y);
    if (len == 0.0) throw DegenerateError("geodesic: endpoints coincide");
    GeodesicSegment g;
    g.start = x;
    g.end = y;
    g.length = len;
    if (x[0] == 0.0) {
        const double a = y[1], r = y[0];
        g.eval = [a, r](double s) { return Point{s * r, a}; };
        return g;
    }
    if (y[0] == 0.0) {
        const double a = x[1], r = x[0];
        g.eval = [a, r](double s) { return Point{(1.0 - s) * r, a}; };
        return g;
    }
    const double sigma = signed_gap(x[1], y[1]);
    g.unique = std::abs(std::abs(sigma) - 0.5 * theta_) > 1e-12 * theta_;
    const double xr = x[0];
    const double yx = y[0] * std::cos(sigma), yy = y[0] * std::sin(sigma);
    const double theta = theta_, alpha = x[1];
    g.eval = [theta, alpha, xr, yx, yy](double s) {
        return refold_point(theta, alpha, (1.0 - s) * xr + s * yx, s * yy);
    };
    return g;
}

Point ConeSpace::random_point(Rng& rng) const {
    return {std::sqrt(uniform01(rng)), theta_ * uniform01(rng) * (1.0 - 1e-16)};
}

std::optional<Point> ConeSpace::point_at_distance(const Point& x, double d, Rng& rng) const {
    if (x[0] == 0.0) return Point{d, wrap(theta_ * uniform01(rng))};
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double phi = uniform(rng, 0.0, 2.0 * kPi);
        const double px = x[0] + d * std::cos(phi), py = d * std::sin(phi);
        if (std::abs(std::atan2(py, px)) < 0.5 * theta_) return refold(x, px, py);
    }
    return std::nullopt;
}

std::vector<Point> ConeSpace::direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const {
    const double phase = uniform01(rng);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double frac = (phase + static_cast<double>(i)) / static_cast<double>(count);
        if (x[0] == 0.0) {
            out.push_back({d, wrap(theta_ * frac)});
            continue;
        }
        const double phi = 2.0 * kPi * frac;
        const double px = x[0] + d * std::cos(phi), py = d * std::sin(phi);
        if (std::abs(std::atan2(py, px)) < 0.5 * theta_) out.push_back(refold(x, px, py));
    }
    return out;
}

std::optional<Point> ConeSpace::extend(const Point& p, const Point& x, double d) const {
    if (x[0] == 0.0) return std::nullopt;
    const double len = distance(p, x);
    if (len == 0.0) return std::nullopt;
    double ppx, ppy;
    if (p[0] == 0.0) {
        ppx = 0.0;
        ppy = 0.0;
    } else {
        const double sigma = signed_gap(x[1], p[1]);
        ppx = p[0] * std::cos(sigma);
        ppy = p[0] * std::sin(sigma);
    }
    const double ux = (x[0] - ppx) / len, uy = -ppy / len;
    const double qx = x[0] + d * ux, qy = d * uy;
    if (std::abs(std::atan2(qy, qx)) >= 0.5 * theta_) return std::nullopt;
    return refold(x, qx, qy);
}

Region ConeSpace::region(const Point& center, double r) const {
    const double rc = center[0];
    const double rmin = std::max(0.0, rc - r), rmax = rc + r;
    double half = 0.5 * theta_;
    if (rc > r) half = std::min(half, std::asin(r / rc));
    const double a0 = center[1];
    const double full = (half >= 0.5 * theta_);
    Region reg;
    reg.measure = half * (rmax * rmax - rmin * rmin);
    const double theta = theta_;
    reg.sample = [theta, rmin, rmax, half, a0, full](Rng& rng) {
        const double rho = std::sqrt(rmin * rmin + uniform01(rng) * (rmax * rmax - rmin * rmin));
        const double a = full ? theta * uniform01(rng) : a0 + uniform(rng, -half, half);
        return Point{rho, wrap_angle(a, theta)};
    };
    return reg;
}

std::optional<Point> ConeSpace::chart_exp(const Point& x, std::span<const double> w) const {
    if (x[0] == 0.0) return std::nullopt;
    const double px = x[0] + w[0], py = w[1];
    if (std::abs(std::atan2(py, px)) >= 0.5 * theta_) return std::nullopt;
    return refold(x, px, py);
}

// ---------------------------------------------------------------- sphere cap

SphereCap::SphereCap(double cap_radius, double C) : cap_(cap_radius), C_(C) {
    if (!(cap_radius > 0.0 && cap_radius < 0.5 * kPi)) throw InputError("sphere: cap radius must lie in (0, pi/2)");
    if (!(C >= 0.0)) throw InputError("sphere: semi-convexity constant must be >= 0");
}

std::string SphereCap::label() const {
    std::ostringstream os;
    os << "sphere-cap(radius=" << cap_ << ")";
    return os.str();
}

bool SphereCap::inside(const Point& x) const {
    return distance(base_point(), x) <= cap_ * (1.0 + kChartTol) + kChartTol;
}

void SphereCap::validate(const Point& x) const {
    require_dim(x, 3, "sphere");
    require_finite(x, "sphere");
    if (std::abs(std::sqrt(dot3(x, x)) - 1.0) > kChartTol) throw InputError("sphere: point is off the unit sphere");
    if (!inside(x)) throw InputError("sphere: point lies outside the cap");
}

double SphereCap::distance(const Point& x, const Point& y) const {
    const Point c = cross3(x, y);
    return std::atan2(std::sqrt(dot3(c, c)), dot3(x, y));
}

GeodesicSegment SphereCap::geodesic(const Point& x, const Point& y) const {
    const double len = distance(x, y);
    if (len == 0.0) throw DegenerateError("geodesic: endpoints coincide");
    GeodesicSegment g;
    g.start = x;
    g.end = y;
    g.length = len;
    const double sl = std::sin(len);
    g.eval = [x, y, len, sl](double s) {
        const double a = std::sin((1.0 - s) * len) / sl, b = std::sin(s * len) / sl;
        Point z{a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]};
        normalize3(z);
        return z;
    };
    return g;
}

void SphereCap::frame(const Point& x, Point& e1, Point& e2) const {
    Point a{0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (std::size_t i = 1; i < 3; ++i)
        if (std::abs(x[i]) < std::abs(x[k])) k = i;
    a[k] = 1.0;
    const double ax = dot3(a, x);
    e1 = {a[0] - ax * x[0], a[1] - ax * x[1], a[2] - ax * x[2]};
    normalize3(e1);
    e2 = cross3(x, e1);
}

Point SphereCap::exp(const Point& x, const Point& v) const {
    const double nv = std::sqrt(dot3(v, v));
    if (nv == 0.0) return x;
    const double c = std::cos(nv), s = std::sin(nv) / nv;
    Point y{c * x[0] + s * v[0], c * x[1] + s * v[1], c * x[2] + s * v[2]};
    normalize3(y);
    return y;
}

Point SphereCap::random_point(Rng& rng) const { return region(base_point(), cap_).sample(rng); }

std::optional<Point> SphereCap::point_at_distance(const Point& x, double d, Rng& rng) const {
    Point e1, e2;
    frame(x, e1, e2);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double phi = uniform(rng, 0.0, 2.0 * kPi);
        const double c = d * std::cos(phi), s = d * std::sin(phi);
        Point y = exp(x, {c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]});
        if (inside(y)) return y;
    }
    return std::nullopt;
}

std::vector<Point> SphereCap::direction_fan(const Point& x, double d, std::size_t count, Rng& rng) const {
    Point e1, e2;
    frame(x, e1, e2);
    const double phase = uniform(rng, 0.0, 2.0 * kPi);
    std::vector<Point> out;
    for (std::size_t i = 0; i < count; ++i) {
        const double phi = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
        const double c = d * std::cos(phi), s = d * std::sin(phi);
        Point y = exp(x, {c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]});
        if (inside(y)) out.push_back(std::move(y));
    }
    return out;
}

std::optional<Point> SphereCap::extend(const Point& p, const Point& x, double d) const {
    const double len = distance(p, x);
    if (len == 0.0) return std::nullopt;
    // Unit tangent at x pointing away from p along the great circle.
    const double c = dot3(p, x);
    Point u{x[0] * c - p[0], x[1] * c - p[1], x[2] * c - p[2]};
    const double nu = std::sqrt(dot3(u, u));
    if (nu == 0.0) return std::nullopt;
    for (double& v : u) v *= d / nu;
    Point q = exp(x, u);
    if (!inside(q)) return std::nullopt;
    return q;
}

double SphereCap::valid_radius(const Point& c) const { return cap_ - distance(base_point(), c); }

Region SphereCap::region(const Point& center, double r) const {
    if (r > valid_radius(center) * (1.0 + kChartTol) + kChartTol)
        throw RangeError("sphere: ball escapes the cap");
    Point e1, e2;
    frame(center, e1, e2);
    const double h = 2.0 * std::sin(0.5 * r) * std::sin(0.5 * r);
    Region reg;
    reg.measure = 2.0 * kPi * h;
    reg.sample = [center, e1, e2, h](Rng& rng) {
        const double z = 1.0 - uniform01(rng) * h;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * kPi * uniform01(rng);
        const double a = rho * std::cos(phi), b = rho * std::sin(phi);
        Point y{z * center[0] + a * e1[0] + b * e2[0], z * center[1] + a * e1[1] + b * e2[1],
                z * center[2] + a * e1[2] + b * e2[2]};
        normalize3(y);
        return y;
    };
    return reg;
}

std::optional<Point> SphereCap::chart_exp(const Point& x, std::span<const double> w) const {
    Point e1, e2;
    frame(x, e1, e2);
    Point y = exp(x, {w[0] * e1[0] + w[1] * e2[0], w[0] * e1[1] + w[1] * e2[1], w[0] * e1[2] + w[1] * e2[2]});
    if (!inside(y)) return std::nullopt;
    return y;
}

// ---------------------------------------------------------------- product

ProductSpace::ProductSpace(std::vector<SpacePtr> factors) : factors_(std::move(factors)) {
    if (factors_.size() < 2) throw InputError("product: needs at least two factors");
    for (const auto& f : factors_) {
        if (!f) throw InputError("product: null factor");
        offsets_.push_back(chart_dim_);
        chart_dim_ += f->chart_dim();
    }
}

std::string ProductSpace::label() const {
    std::string s;
    for (const auto& f : factors_) s += (s.empty() ? "" : " x ") + f->label();
    return s;
}

int ProductSpace::dimension() const {
    int n = 0;
    for (const auto& f : factors_) n += f->dimension();
    return n;
}

CurvatureParams ProductSpace::declared() const {
    CurvatureParams c{1.0, 0.0, kInf, 0};
    for (const auto& f : factors_) {
        const auto d = f->declared();
        c.S = std::max(c.S, d.S);
        c.C = std::max(c.C, d.C);
        c.D = std::min(c.D, d.D);
        c.n += d.n;
    }
    return c;
}

Point ProductSpace::slice(const Point& x, std::size_t i) const {
    const auto b = x.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    return Point(b, b + static_cast<std::ptrdiff_t>(factors_[i]->chart_dim()));
}

Point ProductSpace::join(const std::vector<Point>& parts) const { return join_parts(parts); }

void ProductSpace::validate(const Point& x) const {
    require_dim(x, chart_dim_, "product");
    for (std::size_t i = 0; i < factors_.size(); ++i) factors_[i]->validate(slice(x, i));
}

double ProductSpace::distance(const Point& x, const Point& y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const double d = factors_[i]->distance(slice(x, i), slice(y, i));
        s += d * d;
    }
    return std::sqrt(s);
}

GeodesicSegment ProductSpace::geodesic(const Point& x, const Point& y) const {
    const double len = distance(x, y);
    if (len == 0.0) throw DegenerateError("geodesic: endpoints coincide");
    std::vector<std::optional<GeodesicSegment>> parts;
    std::vector<Point> fixed;
    bool unique = true;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        Point a = slice(x, i), b = slice(y, i);
        if (factors_[i]->distance(a, b) == 0.0) {
            parts.emplace_back(std::nullopt);
        } else {
            parts.emplace_back(factors_[i]->geodesic(a, b));
            unique = unique && parts.back()->unique;
        }
        fixed.push_back(std::move(a));
    }
    GeodesicSegment g;
    g.start = x;
    g.end = y;
    g.length = len;
    g.unique = unique;
    g.eval = [parts, fixed](double s) {
        std::vector<Point> pieces;
        for (std::size_t i = 0; i < parts.size(); ++i) pieces.push_back(parts[i] ? parts[i]->at(s) : fixed[i]);
        return join_parts(pieces);
    };
    return g;
}

Point ProductSpace::base_point() const {
    std::vector<Point> parts;
    for (const auto& f : factors_) parts.push_back(f->base_point());
    return join(parts);
}

Point ProductSpace::random_point(Rng& rng) const {
    std::vector<Point> parts;
    for (const auto& f : factors_) parts.push_back(f->random_point(rng));
    return join(parts);
}

std::optional<Point> ProductSpace::point_at_distance(const Point& x, double d, Rng& rng) const {
    // Split d over the factors along a random direction of the positive orthant.
    std::vector<double> w(factors_.size());
    double nw = 0.0;
    while (nw == 0.0) {
        nw = 0.0;
        for (double& c : w) {
            c = std::abs(normal01(rng));
            nw += c * c;
        }
        nw = std::sqrt(nw);
    }
    std::vector<Point> parts;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const double di = d * w[i] / nw;
        Point xi = slice(x, i);
        if (di == 0.0) {
            parts.push_back(std::move(xi));
            continue;
        }
        auto yi = factors_[i]->point_at_distance(xi, di, rng);
        if (!yi) return std::nullopt;
        parts.push_back(std::move(*yi));
    }
    return join(parts);
}

std::optional<Point> ProductSpace::extend(const Point& p, const Point& x, double d) const {
    const double len = distance(p, x);
    if (len == 0.0) return std::nullopt;
    std::vector<Point> parts;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        Point pi = slice(p, i), xi = slice(x, i);
        const double li = factors_[i]->distance(pi, xi);
        if (li == 0.0) {
            parts.push_back(std::move(xi));
            continue;
        }
        auto qi = factors_[i]->extend(pi, xi, d * li / len);
        if (!qi) return std::nullopt;
        parts.push_back(std::move(*qi));
    }
    return join(parts);
}

Region ProductSpace::region(const Point& center, double r) const {
    std::vector<Region> regs;
    double measure = 1.0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        regs.push_back(factors_[i]->region(slice(center, i), r));
        measure *= regs.back().measure;
    }
    Region reg;
    reg.measure = measure;
    reg.sample = [regs](Rng& rng) {
        std::vector<Point> parts;
        for (const auto& g : regs) parts.push_back(g.sample(rng));
        return join_parts(parts);
    };
    return reg;
}

double ProductSpace::valid_radius(const Point& c) const {
    double r = kInf;
    for (std::size_t i = 0; i < factors_.size(); ++i) r = std::min(r, factors_[i]->valid_radius(slice(c, i)));
    return r;
}

std::optional<Point> ProductSpace::chart_exp(const Point& x, std::span<const double> w) const {
    std::vector<Point> parts;
    std::size_t off = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const auto td = static_cast<std::size_t>(factors_[i]->tangent_dim());
        auto yi = factors_[i]->chart_exp(slice(x, i), w.subspan(off, td));
        if (!yi) return std::nullopt;
        parts.push_back(std::move(*yi));
        off += td;
    }
    return join(parts);
}

// ---------------------------------------------------------------- factories

SpacePtr make_lp(double p, int n) { return std::make_shared<LpSpace>(p, n); }
SpacePtr make_euclidean(int n) { return std::make_shared<LpSpace>(2.0, n); }
SpacePtr make_cone(double theta) { return std::make_shared<ConeSpace>(theta); }
SpacePtr make_sphere_cap(double cap_radius, double C) { return std::make_shared<SphereCap>(cap_radius, C); }
SpacePtr make_product(SpacePtr a, SpacePtr b) {
    return std::make_shared<ProductSpace>(std::vector<SpacePtr>{std::move(a), std::move(b)});
}

double distance(const Space& space, const Point& x, const Point& y) {
    space.validate(x);
    space.validate(y);
    return space.distance(x, y);
}

GeodesicSegment geodesic(const Space& space, const Point& x, const Point& y) {
    space.validate(x);
    space.validate(y);
    return space.geodesic(x, y);
}

std::vector<Point> sample_ball(const Space& space, const Point& center, double r, std::size_t count,
                               std::uint64_t seed) {
    if (!(r > 0.0)) throw InputError("sample_ball: radius must be > 0");
    if (count < 1) throw InputError("sample_ball: count must be >= 1");
    space.validate(center);
    if (r > space.valid_radius(center) * (1.0 + 1e-12) + 1e-12) throw RangeError("sample_ball: ball escapes the chart");
    const Region reg = space.region(center, r);
    Rng rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    while (out.size() < count) {
        Point z = reg.sample(rng);
        if (space.distance(center, z) <= r) out.push_back(std::move(z));
    }
    return out;
}

}  // namespace bclab
