// Acceptance run: one PASS/FAIL line per criterion.  argv[1] is the bclab CLI.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "bclab/comparison.hpp"
#include "bclab/curvature.hpp"
#include "bclab/experiment.hpp"
#include "bclab/measure.hpp"
#include "bclab/strainers.hpp"
#include "bclab/tangent.hpp"

using namespace bclab;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kResidualFloor = -1e-9;
constexpr double kAnchorTol = 1e-6;
constexpr double kRelationTol = 1e-8;
constexpr double kScalingTol = 1e-9;
constexpr double kComparisonSlack = 1e-8;
constexpr double kSecondsPerSpace = 60.0;
constexpr double kImproveRate = 0.95;
constexpr double kDimensionTol = 0.25;
constexpr double kSigmas = 3.0;
constexpr double kHausdorffRel = 0.05;
constexpr double kNormFitRel = 0.02;
constexpr double kStrainedFraction = 0.999;
constexpr double kConstantTol = 1e-6;
constexpr double kReplayTol = 1e-12;

std::string cli;
fs::path workdir;

struct Verdict {
    bool pass = true;
    std::ostringstream note;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Json run_suite(const std::string& space, const std::string& suite, const std::string& settings,
               std::uint64_t seed = 1) {
    std::ostringstream ini;
    ini << "[run]\nsuite = " << suite << "\nseed = " << seed << "\n[space]\n" << space << "\n[settings]\n" << settings;
    return run_experiment(parse_config(ini.str())).report;
}

const Json* find_check(const Json& report, const std::string& name) {
    for (const auto& c : report["checks"])
        if (c["check"] == name) return &c;
    return nullptr;
}

bool check_passes(Verdict& v, const Json& report, const std::string& name, const std::string& label) {
    const Json* c = find_check(report, name);
    const bool ok = c && (*c)["verdict"] == "pass";
    v.require(ok, label + " " + name + (c ? " " + (*c)["verdict"].get<std::string>() : " missing"));
    return ok;
}

Verdict c1_s_concavity() {
    Verdict v;
    double slowest = 0.0;
    for (double p : {2.0, 3.0, 4.0})
        for (int n : {2, 3}) {
            auto s = make_lp(p, n);
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = check_s_concavity(*s, {p - 1.0, 0.0, kInf, n}, 100000, 11);
            const double dt = seconds_since(t0);
            slowest = std::max(slowest, dt);
            v.require(r.worst_residual >= kResidualFloor, s->label() + " residual " + fmt(r.worst_residual));
            v.require(dt < kSecondsPerSpace, s->label() + " took " + fmt(dt) + "s");
        }
    for (int n : {2, 3}) {
        auto s = make_lp(4.0, n);
        const auto r = check_s_concavity(*s, {2.8, 0.0, kInf, n}, 100000, 12);
        const bool found = r.worst_residual < kResidualFloor && !r.worst_witness.points.empty();
        v.require(found, s->label() + " S=2.8 no violation");
        if (found) v.require(std::abs(evaluate_witness(s.get(), r.worst_witness) - r.worst_residual) <= kReplayTol,
                             "witness replay");
        v.note << " l4(R" << n << ") S=2.8 residual " << fmt(r.worst_residual) << ";";
    }
    v.note << " slowest space " << fmt(slowest) << "s";
    return v;
}

Verdict c2_busemann() {
    Verdict v;
    std::vector<SpacePtr> spaces{make_lp(2, 2), make_lp(3, 2), make_lp(4, 2), make_lp(3, 3),
                                 make_cone(3.0), make_cone(4.0), make_cone(5.0), make_sphere_cap(1.0)};
    double worst = kInf;
    for (const auto& s : spaces) {
        const auto r = check_busemann_monotone(*s, BusemannDirection::concave, 10000, 21);
        worst = std::min(worst, r.worst_residual);
        v.require(r.worst_residual >= kResidualFloor, s->label() + " " + fmt(r.worst_residual));
    }
    v.note << " worst residual " << fmt(worst) << " over " << spaces.size() << " spaces";
    return v;
}

Verdict c3_angle_anchor() {
    Verdict v;
    double anchor_err = 0.0, rel_err = 0.0, scale_err = 0.0;
    for (double p : {2.0, 3.0, 4.0}) {
        auto s = make_lp(p, 2);
        const auto g = geodesic(*s, {0.0, 0.0}, {1.0, 0.0});
        const auto e = geodesic(*s, {0.0, 0.0}, {0.0, 1.0});
        const double expect = std::acos(1.0 - std::pow(2.0, 2.0 / p - 1.0));
        anchor_err = std::max(anchor_err, std::abs(angle_fixed_scale(*s, g, e, 1.0, 1.0).value - expect));
    }
    v.require(anchor_err <= kAnchorTol, "anchor " + fmt(anchor_err));

    std::size_t pairs = 0;
    for (auto s : {make_lp(3, 2), make_lp(4, 2), make_cone(4.0)}) {
        const Point x = s->label().rfind("cone", 0) == 0 ? Point{1.0, 0.0} : s->base_point();
        const double L = 0.5;
        Rng rng(31);
        std::size_t done = 0;
        while (done < 1000) {
            const auto y = s->point_at_distance(x, L, rng), z = s->point_at_distance(x, L, rng);
            if (!y || !z) continue;
            const auto g = s->geodesic(x, *y), h = s->geodesic(x, *z);
            const double t = L * uniform(rng, 0.1, 1.0), u = L * uniform(rng, 0.1, 1.0);
            const auto d = tangent_metric(*s, {g, t}, {h, u});
            const double law = t * t + u * u - 2.0 * t * u * std::cos(d.angle);
            rel_err = std::max(rel_err, std::abs(d.value * d.value - law) / (t * t + u * u));
            const double a = angle_fixed_scale(*s, g, h, t, u).value;
            const double b = angle_fixed_scale(*s, g, h, 0.5 * t, 0.5 * u).value;
            scale_err = std::max(scale_err, std::abs(a - b));
            ++done;
        }
        pairs += done;
    }
    v.require(rel_err <= kRelationTol, "relation " + fmt(rel_err));
    v.require(scale_err <= kScalingTol, "scaling " + fmt(scale_err));
    v.note << " anchor err " << fmt(anchor_err) << ", relation err " << fmt(rel_err) << ", scaling err "
           << fmt(scale_err) << " over " << pairs << " pairs";
    return v;
}

Verdict c4_almost_comparison() {
    Verdict v;
    const std::vector<std::pair<std::string, std::string>> models{
        {"euclidean", "kind = euclidean\nn = 2"}, {"l3", "kind = lp\np = 3\nn = 2"},
        {"l4", "kind = lp\np = 4\nn = 2"},        {"cone4", "kind = cone\ntheta = 4"},
        {"sphere", "kind = sphere\ncap = 1"}};
    std::size_t checks = 0;
    for (const auto& [label, space] : models) {
        const Json rep = run_suite(space, "angles", "pairs = 10000\n", 41);
        for (const char* name : {"almost_comparison", "angle_sum_upper", "almost_comparison_lower", "angle_sum_lower"}) {
            const Json* c = find_check(rep, name);
            if (!c) continue;
            ++checks;
            check_passes(v, rep, name, label);
            v.require((*c)["tolerance"].get<double>() <= kComparisonSlack, label + " slack");
        }
    }
    v.note << " " << checks << " checks at slack " << fmt(kComparisonSlack) << ", 1e4 samples per model";
    return v;
}

Verdict c5_openness() {
    Verdict v;
    const double delta = 0.05;
    for (int k = 1; k <= 6; ++k) {
        const double closed = 1.0 / (k * std::pow(2.0, 2 * k + 1));
        v.require(strainer_constants(k, delta).delta_k == closed, "delta_" + std::to_string(k));
    }
    v.require(strainer_constants(1, delta).delta_k == 0.125, "delta_1 = 1/8");
    double worst_ratio = kInf;
    for (auto s : {make_euclidean(3), make_lp(3, 3)}) {
        const CurvatureParams prm = s->declared();
        for (int k = 1; k <= 3; ++k) {
            const auto f = find_strainer(*s, prm, s->base_point(), k, delta, 0.5, 50 + k);
            if (!f.strainer) {
                v.require(false, s->label() + " no strainer k=" + std::to_string(k));
                continue;
            }
            double inner = kInf;
            for (const auto& pr : f.strainer->pairs)
                inner = std::min({inner, s->distance(pr.p, f.strainer->base), s->distance(pr.q, f.strainer->base)});
            const double radius = strained_radius(*s, prm, *f.strainer, 0.5 * inner, 64, 2);
            const auto o = verify_openness(*s, *f.strainer, radius, 1000, 60 + k);
            const double floor = strainer_constants(k, delta).epsilon_k;
            worst_ratio = std::min(worst_ratio, o.achieved_epsilon / floor);
            v.require(o.failures == 0, s->label() + " k=" + std::to_string(k) + " failures " + std::to_string(o.failures));
            v.require(o.achieved_epsilon >= floor, s->label() + " k=" + std::to_string(k) + " eps " +
                                                       fmt(o.achieved_epsilon));
        }
    }
    v.note << " min achieved/floor " << fmt(worst_ratio) << " over 1e3 targets per (space, k)";
    return v;
}

Verdict c6_improve() {
    Verdict v;
    double worst_rate = 1.0;
    for (auto s : {make_euclidean(2), make_lp(3, 2)}) {
        const CurvatureParams prm = s->declared();
        for (int k = 1; k <= 2; ++k) {
            int ok = 0;
            const int trials = 200;
            for (int seed = 0; seed < trials; ++seed) {
                const auto f = find_strainer(*s, prm, s->base_point(), k, 0.1, 0.5, 1000 + seed);
                if (!f.strainer) continue;
                const auto im = improve_strainer(*s, prm, *f.strainer, 0.05, 2000 + seed);
                if (im.ok && im.strainer.delta == 0.05 && is_k_strainer(*s, prm, im.strainer).ok &&
                    im.base_shift <= 2.0 * im.r1)
                    ++ok;
            }
            const double rate = static_cast<double>(ok) / trials;
            worst_rate = std::min(worst_rate, rate);
            v.require(rate >= kImproveRate, s->label() + " k=" + std::to_string(k) + " rate " + fmt(rate));
        }
    }
    v.note << " lowest success rate " << fmt(worst_rate) << " of 200 trials";
    return v;
}

Verdict c7_dimension() {
    Verdict v;
    for (int n = 1; n <= 3; ++n)
        for (double p : {2.0, 3.0}) {
            auto s = make_lp(p, n);
            const auto r = strainer_number(*s, s->declared(), s->base_point(), 0.01, {0.5, 0.25}, 3, 5, 4);
            v.require(r.number == n, s->label() + " strainer number " + std::to_string(r.number));
        }
    const std::vector<std::pair<std::string, std::string>> models{
        {"l3(R1)", "kind = lp\np = 3\nn = 1"}, {"l3(R2)", "kind = lp\np = 3\nn = 2"},
        {"l3(R3)", "kind = lp\np = 3\nn = 3"}, {"cone4", "kind = cone\ntheta = 4"},
        {"sphere", "kind = sphere\ncap = 1"}};
    for (const auto& [label, space] : models) {
        const Json rep = run_suite(space, "dimension", "samples = 1000\n", 71);
        const Json* c = find_check(rep, "rough_dimension");
        const int n = rep["config"]["params"]["n"].get<int>();
        const double d = c ? (*c)["measured"]["dimension"].get<double>() : kInf;
        v.require(std::abs(d - n) <= kDimensionTol, label + " rough dimension " + fmt(d));
        v.note << " " << label << " " << fmt(d) << ";";
    }

    // Exhaustive angle grid at the apex of the cone of total angle 4.
    const double theta = 4.0, delta = 0.5;
    auto cone = make_cone(theta);
    const CurvatureParams flat{1.0, 0.0, kInf, 2};
    double max_angle = 0.0;
    bool any = false;
    const int grid = 400;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            for (double rp : {0.1, 0.5, 1.0})
                for (double rq : {1e-3, 1e-2, 0.1}) {
                    const Point p{rp, theta * i / grid}, q{rq, theta * j / grid};
                    const auto r = is_one_strainer(*cone, flat, p, {0.0, 0.0}, q, delta);
                    any = any || r.ok;
                    max_angle = std::max(max_angle, r.angle);
                }
    v.require(!any, "apex strainer found");
    v.require(max_angle <= theta / 2 + 1e-12 && max_angle < kPi - delta, "apex angle " + fmt(max_angle));
    v.note << " apex max angle " << fmt(max_angle) << " < pi - delta = " << fmt(kPi - delta);
    return v;
}

Verdict c8_measure() {
    Verdict v;
    double worst_sigma = 0.0;
    for (double theta : {3.0, 4.0, 5.0}) {
        auto s = make_cone(theta);
        const auto c = mc_ball_volume(*s, {0, 0}, {0.25, 0.5, 1.0}, 40000, 81);
        for (std::size_t i = 0; i < c.radii.size(); ++i) {
            // At the apex the sampling region is the ball itself, so the estimate is exact and stderr vanishes.
            const double diff = std::abs(c.volumes[i] - 0.5 * theta * c.radii[i] * c.radii[i]);
            const double z = c.stderrs[i] > 0.0 ? diff / c.stderrs[i] : diff <= 1e-12 * c.volumes[i] ? 0.0 : kInf;
            worst_sigma = std::max(worst_sigma, z);
            v.require(z <= kSigmas, s->label() + " r=" + fmt(c.radii[i]) + " z " + fmt(z));
        }
    }
    std::vector<std::pair<SpacePtr, Point>> models{
        {make_euclidean(2), {0, 0}}, {make_lp(3, 2), {0, 0}},     {make_lp(4, 2), {0.2, 0.1}},
        {make_lp(3, 3), {0, 0, 0}},  {make_cone(3.0), {0, 0}},     {make_cone(4.0), {0, 0}},
        {make_cone(5.0), {0.3, 1.0}}, {make_sphere_cap(1.0), {0.0, 0.0, 1.0}}};
    for (const auto& [s, x] : models) {
        const int n = s->declared().n;
        const auto c = mc_ball_volume(*s, x, {0.1, 0.2, 0.4, 0.8}, 20000, 82);
        const double r = bishop_gromov_check(c, n).worst_residual;
        v.require(r >= 0.0, s->label() + " Bishop-Gromov " + fmt(r));
    }
    const auto l4 = [](double x, double y) { return std::pow(x, 4) + std::pow(y, 4) <= 1.0; };
    const double h = hausdorff_measure_2d(l4, {}, 4.0, 8).value;
    v.require(std::abs(h - kPi) <= kHausdorffRel * kPi, "Hausdorff " + fmt(h));
    v.note << " cone area worst " << fmt(worst_sigma) << " sigma; Bishop-Gromov on " << models.size()
           << " models; l4 Hausdorff " << fmt(h) << " (rel err " << fmt(std::abs(h - kPi) / kPi) << ")";
    return v;
}

Verdict c9_tangent() {
    Verdict v;
    auto s = make_lp(4, 2);
    const auto* lp = dynamic_cast<const LpSpace*>(s.get());
    Rng rng(91);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Point x = s->random_point(rng);
        const auto f = fit_norm(*s, x, {1e-3, 1e-4, 1e-5}, 128, 92 + i);
        for (std::size_t j = 0; j < f.directions.size(); ++j) {
            const double exact = 1.0 / lp->norm(f.directions[j]);
            worst = std::max(worst, std::abs(f.radius[j] - exact) / exact);
        }
        v.require(f.directions.size() == 128, "direction count");
        v.require(certify_norm(f, 3.0, ConvexHypothesis{4.0, 4.0}, 5000, 93 + i).smooth_ok,
                  "smoothness at point " + std::to_string(i));
    }
    v.require(worst <= kNormFitRel, "fit error " + fmt(worst));

    // Blow-ups against the tangent-scale sample.
    std::vector<double> uppers;
    const Point x = s->random_point(rng);
    const auto ref = blowup_sample(*s, x, std::ldexp(1.0, -20), 8, 1.0, 94);
    for (double lam : {1.0, 0.5, 0.25}) uppers.push_back(gh_distance_bounds(blowup_sample(*s, x, lam, 8, 1.0, 94), ref).upper);
    for (std::size_t i = 1; i < uppers.size(); ++i)
        v.require(uppers[i] <= uppers[i - 1] + kScalingTol, "l4 blow-up upper not monotone");
    std::string curved;
    for (const auto& [label, space] : std::vector<std::pair<std::string, std::string>>{
             {"sphere", "kind = sphere\ncap = 1"}, {"cone4", "kind = cone\ntheta = 4"}}) {
        const Json rep = run_suite(space, "tangent", "", 95);
        check_passes(v, rep, "blowup_gh", label);
        if (const Json* c = find_check(rep, "blowup_gh")) curved += " " + label + " " + (*c)["measured"]["upper"].dump();
    }
    v.note << " sup fit error " << fmt(worst) << " over 10 points; l4 uppers " << fmt(uppers[0]) << ","
           << fmt(uppers[1]) << "," << fmt(uppers[2]) << ";" << curved;
    return v;
}

Verdict c10_directions() {
    Verdict v;
    const double eps = 0.3;
    for (auto s : {make_euclidean(2), make_lp(3, 2), make_lp(4, 2), make_lp(3, 3)}) {
        std::vector<std::size_t> counts;
        for (double l : {0.1, 1.0, 10.0}) {
            const auto d = packing_directions(*s, s->base_point(), l, eps, 1024, 101);
            counts.push_back(d.count);
            v.require(d.within_bound, s->label() + " bound at l=" + fmt(l));
        }
        v.require(counts[0] == counts[1] && counts[1] == counts[2], s->label() + " counts differ across l");
        v.note << " " << s->label() << " " << counts[1] << ";";
    }
    for (double theta : {3.0, 4.0, 5.0}) {
        const auto d = packing_directions(*make_cone(theta), {0, 0}, 1.0, eps, 1024, 102);
        const double expect = std::floor(theta / eps);
        v.require(std::abs(static_cast<double>(d.count) - expect) <= 1.0, "cone " + fmt(theta) + " count " +
                                                                               std::to_string(d.count));
        v.note << " cone" << fmt(theta) << " " << d.count << "/" << expect << ";";
    }
    return v;
}

Verdict c11_strata() {
    Verdict v;
    auto cone = make_cone(4.0);
    const auto f = strained_fraction(*cone, cone->declared(), {0, 0}, 0.5, 2, 0.1, 5e-4, 10000, 111);
    v.require(f.sampled == 10000 && f.fraction() > kStrainedFraction, "strained fraction " + fmt(f.fraction()));

    for (const auto& [label, space] : std::vector<std::pair<std::string, std::string>>{
             {"cone3", "kind = cone\ntheta = 3"}, {"cone4", "kind = cone\ntheta = 4"},
             {"cone5", "kind = cone\ntheta = 5"}, {"euclidean", "kind = euclidean\nn = 2"}}) {
        const Json rep = run_suite(space, "strata", "samples = 1000\n", 112);
        check_passes(v, rep, "singular_packing", label);
    }

    const double delta = 0.1;
    const auto t = threshold_constants(delta, kInf, 10, 3.0);
    auto bisect = [](const std::function<bool(double)>& ok, double lo, double hi) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? hi : lo) = mid;
        }
        return hi;
    };
    const double by_acos = bisect([&](double L) { return L > 1.0 + 1e-12 && std::acos(1 - 2 / (L - 1)) < delta; }, 3.0, 1e6);
    const double by_asin = bisect([&](double L) { return std::asin(1 / L) < delta; }, 1.0, 1e6);
    const double L0 = std::max(by_acos, by_asin);
    v.require(std::abs(t.L0 - L0) <= kConstantTol, "L0 " + fmt(t.L0) + " vs " + fmt(L0));
    v.require(std::abs(t.L0 - 401.33) <= 5e-3, "L0 anchor");
    double s0_err = 0.0;
    for (double L_bar : {t.L0 + 2.0, 500.0, 1e4}) {
        const auto u = threshold_constants(delta, L_bar, 0, 1.0);
        const double expect = std::min(4.0, 1.0 + 2.0 * (std::cos(delta) - std::cos(2 * delta)) / (L_bar - 1.0));
        s0_err = std::max(s0_err, std::abs(u.S0 - expect));
    }
    v.require(s0_err <= kConstantTol, "S0 " + fmt(s0_err));
    v.note << " cone strained fraction " << fmt(f.fraction()) << " of " << f.sampled << "; L0 " << fmt(t.L0)
           << " (bisection " << fmt(L0) << "); S0 err " << fmt(s0_err);
    return v;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
    FILE* pipe = popen((cli + " " + args + " 2>/dev/null").c_str(), "r");
    if (!pipe) return -1;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        if (out) out->append(buf, n);
    const int status = pclose(pipe);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict c12_reproducibility() {
    Verdict v;
    const std::vector<std::pair<std::string, std::string>> configs{
        {"l4_curvature", "[run]\nsuite = curvature\nseed = 7\n[space]\nkind = lp\np = 4\nn = 2\n"},
        {"l4_violation", "[run]\nsuite = curvature\nseed = 7\n[space]\nkind = lp\np = 4\nn = 2\n[params]\nS = 2.5\n"},
        {"cone_all", "[run]\nsuite = all\nseed = 3\n[space]\nkind = cone\ntheta = 4\n[settings]\ntrials = 2000\n"
                     "pairs = 200\ntargets = 100\nsamples = 1000\n"},
        {"sphere_angles", "[run]\nsuite = angles\nseed = 5\n[space]\nkind = sphere\ncap = 1\n[settings]\npairs = 500\n"}};
    std::size_t replays = 0;
    for (const auto& [name, text] : configs) {
        const fs::path cfg = workdir / (name + ".ini");
        std::ofstream(cfg) << text;
        const fs::path a = workdir / (name + "_a.json"), b = workdir / (name + "_b.json");
        const int ea = run_cli("run --config " + cfg.string() + " --out " + a.string());
        const int eb = run_cli("run --config " + cfg.string() + " --out " + b.string());
        v.require(ea == eb && (ea == 0 || ea == 1), name + " exit " + std::to_string(ea) + "/" + std::to_string(eb));
        if (!fs::exists(a) || !fs::exists(b)) {
            v.require(false, name + " report missing");
            continue;
        }
        const Json ja = Json::parse(slurp(a)), jb = Json::parse(slurp(b));
        v.require(strip_timing(ja).dump(2) == strip_timing(jb).dump(2), name + " reports differ");
        std::string out;
        run_cli("replay --witness " + a.string(), &out);
        try {
            for (const auto& o : Json::parse(out)) {
                ++replays;
                const bool close = !o["difference"].is_null() && o["difference"].get<double>() <= kReplayTol;
                v.require(close, name + " replay " + o["check"].get<std::string>());
            }
        } catch (const std::exception&) {
            v.require(false, name + " replay output");
        }
    }
    v.note << " " << configs.size() << " configs rerun identically; " << replays << " witnesses replayed within "
           << fmt(kReplayTol);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path to bclab>\n";
        return 2;
    }
    cli = argv[1];
    workdir = fs::temp_directory_path() / ("bclab_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(workdir);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"S-concavity", c1_s_concavity},          {"Busemann monotonicity", c2_busemann},
        {"angle anchor", c3_angle_anchor},        {"almost comparison", c4_almost_comparison},
        {"openness floor", c5_openness},          {"self-improvement", c6_improve},
        {"dimension", c7_dimension},              {"measure", c8_measure},
        {"tangent cones", c9_tangent},            {"directions", c10_directions},
        {"strata proxy", c11_strata},             {"reproducibility", c12_reproducibility}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ":" << v.note.str()
                  << " (" << fmt(seconds_since(t0)) << "s)" << std::endl;
    }
    std::error_code ec;
    fs::remove_all(workdir, ec);
    return failed ? 1 : 0;
}
