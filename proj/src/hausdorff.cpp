#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "bclab/measure.hpp"

namespace bclab {

namespace {

constexpr int kBoundaryProbes = 32;
constexpr int kSublevels = 2;

double norm_p(double x, double y, double p) {
    const double v[2] = {x, y};
    return lp_norm(v, 2, p);
}

struct Ball {
    double x, y, r;
};

// Balls of one radius bucketed on a grid of side 2r, so any ball of radius
// at most r that meets one of them has its center in a neighbouring bucket.
class BallGrid {
public:
    explicit BallGrid(double r) : r_(r), side_(2.0 * r) {}

    void add(const Ball& b) { cells_[key(cell(b.x), cell(b.y))].push_back(b); }

    template <class F>
    bool any_near(double x, double y, F&& pred) const {
        const std::int64_t cx = cell(x), cy = cell(y);
        for (std::int64_t i = cx - 1; i <= cx + 1; ++i)
            for (std::int64_t j = cy - 1; j <= cy + 1; ++j) {
                auto it = cells_.find(key(i, j));
                if (it == cells_.end()) continue;
                for (const Ball& b : it->second)
                    if (pred(b)) return true;
            }
        return false;
    }

    double radius() const { return r_; }

private:
    std::int64_t cell(double v) const { return static_cast<std::int64_t>(std::floor(v / side_)); }
    static std::uint64_t key(std::int64_t i, std::int64_t j) {
        return (static_cast<std::uint64_t>(i) << 32) ^ (static_cast<std::uint64_t>(j) & 0xffffffffULL);
    }
    double r_, side_;
    std::unordered_map<std::uint64_t, std::vector<Ball>> cells_;
};

}  // namespace

HausdorffEstimate hausdorff_measure_2d(const std::function<bool(double, double)>& inside, const Box2& box, double p,
                                       int levels) {
    if (!(p >= 1.0)) throw InputError("hausdorff_measure_2d: p must be >= 1");
    if (levels < 3) throw InputError("hausdorff_measure_2d: levels must be >= 3");
    if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin)) throw InputError("hausdorff_measure_2d: empty box");
    const double W = std::max(box.xmax - box.xmin, box.ymax - box.ymin);

    double ux[kBoundaryProbes], uy[kBoundaryProbes];
    for (int i = 0; i < kBoundaryProbes; ++i) {
        const double a = 2.0 * kPi * i / kBoundaryProbes;
        const double n = norm_p(std::cos(a), std::sin(a), p);
        ux[i] = std::cos(a) / n;
        uy[i] = std::sin(a) / n;
    }
    auto ball_inside = [&](double cx, double cy, double r) {
        if (!inside(cx, cy)) return false;
        for (int i = 0; i < kBoundaryProbes; ++i)
            if (!inside(cx + r * ux[i], cy + r * uy[i])) return false;
        return true;
    };

    std::vector<BallGrid> grids;
    auto clashes = [&](double cx, double cy, double rho) {
        for (const BallGrid& g : grids)
            if (g.any_near(cx, cy, [&](const Ball& b) { return norm_p(cx - b.x, cy - b.y, p) <= b.r + rho; }))
                return true;
        return false;
    };
    auto covered = [&](double x, double y) {
        for (const BallGrid& g : grids)
            if (g.any_near(x, y, [&](const Ball& b) { return norm_p(x - b.x, y - b.y, p) < b.r; })) return true;
        return false;
    };
    // Balls are convex, so a cell with its four corners in one ball lies inside it.
    auto inside_one_ball = [&](double x0, double y0, double s) {
        for (const BallGrid& g : grids)
            if (g.any_near(x0, y0, [&](const Ball& b) {
                    return norm_p(x0 - b.x, y0 - b.y, p) < b.r && norm_p(x0 + s - b.x, y0 - b.y, p) < b.r &&
                           norm_p(x0 - b.x, y0 + s - b.y, p) < b.r && norm_p(x0 + s - b.x, y0 + s - b.y, p) < b.r;
                }))
                return true;
        return false;
    };

    HausdorffEstimate est;
    double ball_sum = 0.0;
    double rho = W / 4.0;
    const double cell_diam_factor = std::pow(2.0, 1.0 / p) / 2.0;

    // Active cells (lower-left corners) of side `side`; the first level scans the whole box.
    double side = rho / std::sqrt(2.0);
    std::vector<std::pair<double, double>> active;
    {
        const auto mx = static_cast<std::size_t>(std::ceil((box.xmax - box.xmin) / side));
        const auto my = static_cast<std::size_t>(std::ceil((box.ymax - box.ymin) / side));
        for (std::size_t i = 0; i < mx; ++i)
            for (std::size_t j = 0; j < my; ++j)
                active.emplace_back(box.xmin + side * static_cast<double>(i), box.ymin + side * static_cast<double>(j));
    }

    for (int level = 0; level < levels; ++level) {
        double rho_last = rho;
        for (int sub = 0; sub < kSublevels; ++sub, rho /= std::sqrt(2.0)) {
            rho_last = rho;
            grids.emplace_back(rho);
            const std::size_t mine = grids.size() - 1;
            // Lattice of step rho/4 anchored at the box corner, visited cell by cell.
            const double step = rho / 4.0;
            for (const auto& [x0, y0] : active) {
                const auto i0 = static_cast<std::int64_t>(std::ceil((x0 - box.xmin) / step));
                const auto j0 = static_cast<std::int64_t>(std::ceil((y0 - box.ymin) / step));
                for (std::int64_t i = i0;; ++i) {
                    const double cx = box.xmin + step * static_cast<double>(i);
                    if (cx >= x0 + side || cx > box.xmax) break;
                    for (std::int64_t j = j0;; ++j) {
                        const double cy = box.ymin + step * static_cast<double>(j);
                        if (cy >= y0 + side || cy > box.ymax) break;
                        if (clashes(cx, cy, rho) || !ball_inside(cx, cy, rho)) continue;
                        grids[mine].add({cx, cy, rho});
                        ball_sum += kPi * rho * rho;
                        ++est.balls;
                    }
                }
            }
        }

        // Cover what the balls left with square cells of half the last radius.
        const double s = rho_last / 2.0;
        const int split = static_cast<int>(std::lround(side / s));
        std::vector<std::pair<double, double>> next;
        std::size_t cells = 0;
        for (const auto& [px, py] : active)
            for (int ci = 0; ci < split; ++ci)
                for (int cj = 0; cj < split; ++cj) {
                    const double x0 = px + s * ci, y0 = py + s * cj;
                    if (x0 >= box.xmax || y0 >= box.ymax) continue;
                    bool meets = false, counted = false;
                    for (int a = 0; a <= 2 && !counted; ++a)
                        for (int b = 0; b <= 2 && !counted; ++b) {
                            const double x = x0 + 0.5 * s * a, y = y0 + 0.5 * s * b;
                            if (!inside(x, y)) continue;
                            meets = true;
                            counted = !covered(x, y);
                        }
                    if (counted) ++cells;
                    if (meets && !inside_one_ball(x0, y0, s)) next.emplace_back(x0, y0);
                }
        active = std::move(next);
        side = s;
        const double cell_term = static_cast<double>(cells) * kPi * std::pow(s * cell_diam_factor, 2);
        est.by_level.push_back(ball_sum + cell_term);
        est.cells = cells;
    }
    est.value = est.by_level.back();
    return est;
}

}  // namespace bclab
