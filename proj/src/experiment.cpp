#include "bclab/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

#include "bclab/comparison.hpp"
#include "bclab/measure.hpp"
#include "bclab/tangent.hpp"

namespace bclab {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw InputError("field '" + field + "': " + what);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Json ini_scalar(const std::string& raw) {
    std::string s = trim(raw);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    static const std::regex integer(R"([+-]?[0-9]+)");
    if (std::regex_match(s, integer)) {
        try {
            if (s[0] == '-') return std::stoll(s);
            return std::stoull(s);
        } catch (const std::exception&) {
        }
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    return s;
}

struct IniDoc {
    Json root = Json::object();
    std::map<std::string, int> lines;  // "section.key" -> line
};

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line, section = "run";
    static const std::regex header(R"(\[\s*([A-Za-z0-9_.]+)\s*\])");
    static const std::regex keypat(R"([A-Za-z_][A-Za-z0-9_]*)");
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            std::smatch m;
            if (!std::regex_match(line, m, header)) throw InputError(where + "malformed section header '" + line + "'");
            section = m[1];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(where + "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!std::regex_match(key, keypat)) throw InputError(where + "invalid key '" + key + "'");
        if (value.empty()) throw InputError(where + "empty value for '" + key + "'");
        Json* node = &doc.root;
        std::stringstream parts(section);
        std::string part;
        while (std::getline(parts, part, '.')) {
            Json& next = (*node)[part];
            if (next.is_null()) next = Json::object();
            if (!next.is_object()) throw InputError(where + "section '" + section + "' clashes with a key");
            node = &next;
        }
        if (node->contains(key)) throw InputError(where + "duplicate key '" + key + "' in [" + section + "]");
        if (value.find(',') != std::string::npos) {
            Json arr = Json::array();
            std::stringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) arr.push_back(ini_scalar(item));
            (*node)[key] = arr;
        } else {
            (*node)[key] = ini_scalar(value);
        }
        doc.lines[section + "." + key] = lineno;
    }
    return doc;
}

// Product factors may be given as factor1 / factor2 sections.
void normalize_space(Json& s) {
    if (!s.is_object()) return;
    if (s.contains("factor1") || s.contains("factor2")) {
        if (s.contains("factors")) bad("space", "give either factors or factor1/factor2");
        if (!s.contains("factor1") || !s.contains("factor2")) bad("space", "a product needs factor1 and factor2");
        Json f = Json::array({s["factor1"], s["factor2"]});
        s.erase("factor1");
        s.erase("factor2");
        s["factors"] = f;
    }
    if (s.contains("factors") && s["factors"].is_array())
        for (auto& f : s["factors"]) normalize_space(f);
}

std::uint64_t seed_from(const Json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    bad(field, "expected a non-negative integer");
}

std::size_t count_from(const Json& j, const std::string& field) {
    const double v = number_from(j, field);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) bad(field, "expected a positive integer");
    return static_cast<std::size_t>(v);
}

std::vector<double> list_from(const Json& j, const std::string& field) {
    std::vector<double> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_from(j[i], field + "[" + std::to_string(i) + "]"));
    } else {
        out.push_back(number_from(j, field));
    }
    for (double v : out)
        if (!(v > 0.0) || !std::isfinite(v)) bad(field, "entries must be positive and finite");
    return out;
}

void check_keys(const Json& j, const std::string& field, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(field, "expected a section");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) bad(field + "." + it.key(), "unknown key");
    }
}

ExperimentConfig config_from_json(Json j) {
    if (!j.is_object()) bad("config", "expected an object");
    check_keys(j, "config", {"run", "space", "params", "settings"});
    ExperimentConfig c;
    if (j.contains("run")) {
        const Json& r = j["run"];
        check_keys(r, "run", {"suite", "seed", "out"});
        if (r.contains("suite")) {
            if (!r["suite"].is_string()) bad("run.suite", "expected a name");
            c.suite = r["suite"].get<std::string>();
            const auto& names = suite_names();
            if (std::find(names.begin(), names.end(), c.suite) == names.end())
                bad("run.suite", "unknown suite '" + c.suite + "'");
        }
        if (r.contains("seed")) c.seed = seed_from(r["seed"], "run.seed");
        if (r.contains("out")) {
            if (!r["out"].is_string()) bad("run.out", "expected a path");
            c.out = r["out"].get<std::string>();
        }
    }
    if (!j.contains("space")) bad("space", "missing space description");
    normalize_space(j["space"]);
    const SpacePtr space = parse_space(j["space"]);
    c.space = describe_space(*space);
    c.params = params_json(params_from(j.contains("params") ? j["params"] : Json(), space->declared()));
    if (j.contains("params")) check_keys(j["params"], "params", {"S", "C", "D", "n"});
    if (j.contains("settings")) {
        const Json& s = j["settings"];
        check_keys(s, "settings", {"delta", "k", "trials", "pairs", "targets", "samples", "eps", "radii", "scales", "point"});
        Settings& st = c.settings;
        if (s.contains("delta")) {
            st.delta = number_from(s["delta"], "settings.delta");
            if (!(st.delta > 0.0 && st.delta < 0.5)) bad("settings.delta", "must lie in (0, 1/2)");
        }
        if (s.contains("k")) st.k = static_cast<int>(count_from(s["k"], "settings.k"));
        if (s.contains("trials")) st.trials = count_from(s["trials"], "settings.trials");
        if (s.contains("pairs")) st.pairs = count_from(s["pairs"], "settings.pairs");
        if (s.contains("targets")) st.targets = count_from(s["targets"], "settings.targets");
        if (s.contains("samples")) {
            st.samples = count_from(s["samples"], "settings.samples");
            if (st.samples < 1000) bad("settings.samples", "at least 1000 required");
        }
        if (s.contains("eps")) {
            st.eps = number_from(s["eps"], "settings.eps");
            if (!(st.eps > 0.0 && st.eps < kPi)) bad("settings.eps", "must lie in (0, pi)");
        }
        if (s.contains("radii")) {
            st.radii = list_from(s["radii"], "settings.radii");
            for (std::size_t i = 1; i < st.radii.size(); ++i)
                if (!(st.radii[i] > st.radii[i - 1])) bad("settings.radii", "must increase");
        }
        if (s.contains("scales")) st.scales = list_from(s["scales"], "settings.scales");
        if (s.contains("point")) {
            st.point = point_from(s["point"], "settings.point");
            try {
                space->validate(*st.point);
            } catch (const InputError& e) {
                bad("settings.point", e.what());
            }
        }
    }
    return c;
}

std::string line_of(const std::string& msg, const IniDoc& doc) {
    static const std::regex field(R"(field '([A-Za-z0-9_.\[\]]+)')");
    std::smatch m;
    if (!std::regex_search(msg, m, field)) return msg;
    std::string f = m[1];
    f = std::regex_replace(f, std::regex(R"(\[[0-9]+\])"), "");
    // Product factors were folded from factor sections.
    f = std::regex_replace(f, std::regex(R"(factors\.?)"), "factor");
    for (auto it = doc.lines.rbegin(); it != doc.lines.rend(); ++it)
        if (it->first == f || it->first.rfind(f + ".", 0) == 0) return "line " + std::to_string(it->second) + ": " + msg;
    return msg;
}

// Per-check bookkeeping.
struct CheckResult {
    std::string check;
    std::string verdict;
    double residual = 0.0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    Json measured = Json::object();
    std::optional<Json> witness;
    std::vector<CurveFile> curves;
    int task = 0;
};

CheckResult make_result(const std::string& name, double residual, double tol, std::uint64_t seed) {
    CheckResult r;
    r.check = name;
    r.residual = residual;
    r.tolerance = tol;
    r.seed = seed;
    r.verdict = std::isnan(residual) ? "inconclusive" : (residual >= -tol ? "pass" : "violation");
    return r;
}

CheckResult inconclusive(const std::string& name, std::uint64_t seed, const std::string& why) {
    CheckResult r = make_result(name, std::nan(""), 0.0, seed);
    r.measured["reason"] = why;
    return r;
}

struct Ctx {
    SpacePtr space;
    CurvatureParams params;
    Settings st;
    Json echo;
    int k = 1;
    Point x;  // regular evaluation point
};

bool has_cone(const Space& s) {
    if (s.kind() == SpaceKind::cone) return true;
    if (auto* p = dynamic_cast<const ProductSpace*>(&s))
        for (const auto& f : p->factors())
            if (has_cone(*f)) return true;
    return false;
}

const LpSpace* as_lp(const Ctx& c) { return dynamic_cast<const LpSpace*>(c.space.get()); }
const ConeSpace* as_cone(const Ctx& c) { return dynamic_cast<const ConeSpace*>(c.space.get()); }

double working_length(const Ctx& c, const Point& x) { return std::min(1.0, 0.5 * c.space->valid_radius(x)); }

Json report_witness(const Ctx& c, const Witness& w) {
    Json j = witness_json(w);
    j["space"] = c.echo["space"];
    j["params"] = c.echo["params"];
    return j;
}

CheckResult from_residual_report(const Ctx& c, const std::string& name, const ResidualReport& rep) {
    CheckResult r = make_result(name, rep.worst_residual, -kViolationThreshold, rep.seed);
    r.trials = rep.trials;
    if (!rep.worst_witness.check.empty()) r.witness = report_witness(c, rep.worst_witness);
    return r;
}

using TaskFn = std::function<std::vector<CheckResult>(const Ctx&, std::uint64_t)>;

struct Task {
    int id;
    std::string suite;
    TaskFn fn;
};

// Configurations for the angle checks: base x, point p, geodesic from x.
struct AngleConfig {
    Point x, p;
    GeodesicSegment xi;
};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kAngleNoise = 1e-10;

std::optional<AngleConfig> sample_angle_config(const Space& s, Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        Point x = s.random_point(rng), p = s.random_point(rng), y = s.random_point(rng);
        const double dpx = s.distance(p, x), dxy = s.distance(x, y);
        if (dpx < 1e-3 || dxy < 1e-3) continue;
        AngleConfig a{x, p, s.geodesic(x, y)};
        if (!a.xi.unique) continue;
        return a;
    }
    return std::nullopt;
}

std::vector<CheckResult> task_s_concavity(const Ctx& c, std::uint64_t seed) {
    return {from_residual_report(c, "s_concavity", check_s_concavity(*c.space, c.params, c.st.trials, seed))};
}

std::vector<CheckResult> task_busemann(const Ctx& c, std::uint64_t seed) {
    return {from_residual_report(c, "busemann",
                                 check_busemann_monotone(*c.space, BusemannDirection::concave, c.st.trials, seed))};
}

std::vector<CheckResult> task_semiconvexity(const Ctx& c, std::uint64_t seed) {
    // Cones carry no global semi-convexity claim near the apex.
    if (has_cone(*c.space)) return {};
    try {
        return {from_residual_report(c, "semiconvexity",
                                     check_local_semiconvexity(*c.space, c.params, c.st.trials, seed))};
    } catch (const DomainError& e) {
        return {inconclusive("semiconvexity", seed, e.what())};
    }
}

std::vector<CheckResult> task_norms(const Ctx& c, std::uint64_t seed) {
    const LpSpace* lp = as_lp(c);
    if (!lp) return {};
    const int n = lp->dimension();
    std::vector<CheckResult> out;
    out.push_back(from_residual_report(
        c, "norm_smoothness",
        check_norm_uniform(lp->p(), UniformMode::smooth, 2.0, c.params.S, c.st.trials, derive_seed(seed, 1), n)));
    const double conv = std::pow(2.0, lp->p() - 2.0);
    CheckResult cr = from_residual_report(
        c, "norm_convexity",
        check_norm_uniform(lp->p(), UniformMode::convex, lp->p(), conv, c.st.trials, derive_seed(seed, 2), n));
    cr.measured["power"] = lp->p();
    cr.measured["constant"] = conv;
    out.push_back(std::move(cr));
    return out;
}

std::vector<CheckResult> task_angle_anchor(const Ctx& c, std::uint64_t seed) {
    std::optional<double> oracle;
    GeodesicSegment g, h;
    if (const LpSpace* lp = as_lp(c)) {
        if (lp->dimension() < 2) return {};
        Point a = c.x, b = c.x;
        a[0] += 1.0;
        b[1] += 1.0;
        g = c.space->geodesic(c.x, a);
        h = c.space->geodesic(c.x, b);
        oracle = std::acos(1.0 - std::pow(2.0, 2.0 / lp->p() - 1.0));
    } else if (as_cone(c)) {
        const double gap = std::min(1.0, 0.4 * as_cone(c)->theta());
        g = c.space->geodesic({0.0, 0.0}, {1.0, 0.0});
        h = c.space->geodesic({0.0, 0.0}, {1.0, gap});
        oracle = gap;
    } else {
        return {};
    }
    const AngleEstimate a = angle_fixed_scale(*c.space, g, h, 1.0, 1.0);
    const AngleEstimate b = angle_fixed_scale(*c.space, g, h, 0.5, 0.5);
    const double err = std::max(std::abs(a.value - *oracle), std::abs(a.value - b.value));
    CheckResult r = make_result("angle_anchor", -err, 1e-6, seed);
    r.measured["angle"] = a.value;
    r.measured["oracle"] = *oracle;
    r.measured["scaled_angle"] = b.value;
    return {r};
}

std::vector<CheckResult> task_tangent_relation(const Ctx& c, std::uint64_t seed) {
    const double L = working_length(c, c.x);
    std::vector<double> rel(c.st.pairs, 0.0), scal(c.st.pairs, 0.0);
    std::vector<char> broken(c.st.pairs, 0);
    for_each_index(c.st.pairs, Exec::parallel, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const auto y = c.space->point_at_distance(c.x, L, rng), z = c.space->point_at_distance(c.x, L, rng);
        if (!y || !z) return;
        const GeodesicSegment g = c.space->geodesic(c.x, *y), h = c.space->geodesic(c.x, *z);
        const double t = L * uniform(rng, 0.1, 1.0), s = L * uniform(rng, 0.1, 1.0);
        try {
            const TangentDistance d = tangent_metric(*c.space, {g, t}, {h, s});
            const TangentDistance e = tangent_metric(*c.space, {g, 0.5 * t}, {h, 0.5 * s});
            rel[i] = d.relation_error / (t * t + s * s);
            scal[i] = std::abs(d.angle - e.angle);
        } catch (const CurvatureViolation&) {
            broken[i] = 1;
        }
    });
    const double worst_rel = *std::max_element(rel.begin(), rel.end());
    const double worst_scale = *std::max_element(scal.begin(), scal.end());
    const auto nbroken = static_cast<std::size_t>(std::count(broken.begin(), broken.end(), 1));
    CheckResult a = make_result("tangent_relation", nbroken ? -kInf : -worst_rel, 1e-8, seed);
    a.trials = c.st.pairs;
    a.measured["monotonicity_failures"] = nbroken;
    CheckResult b = make_result("angle_scaling", nbroken ? -kInf : -worst_scale, 1e-9, seed);
    b.trials = c.st.pairs;
    return {a, b};
}

std::vector<CheckResult> task_almost_comparison(const Ctx& c, std::uint64_t seed) {
    const bool lower = !has_cone(*c.space);
    const std::size_t n = c.st.pairs;
    // Per check: worst residual and the number of samples resolved above roundoff.
    enum { kUpper, kSumUpper, kLower, kSumLower, kChecks };
    std::vector<std::array<double, kChecks>> res(n);
    std::vector<std::array<char, kChecks>> used(n);
    for (auto& r : res) r.fill(kInf);
    for (auto& u : used) u.fill(0);
    std::vector<char> broken(n, 0);
    auto take = [&](std::size_t i, int which, double value, double uncertainty) {
        if (uncertainty > kAngleNoise) return;
        res[i][which] = std::min(res[i][which], value);
        used[i][which] = 1;
    };
    for_each_index(n, Exec::parallel, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const auto cfg = sample_angle_config(*c.space, rng);
        if (!cfg) return;
        const Space& s = *c.space;
        const double dpx = s.distance(cfg->p, cfg->x);
        try {
            const AngleEstimate a = angle_from_point(s, c.params, cfg->p, cfg->xi);
            std::optional<AngleEstimate> b;
            if (lower && dpx < c.params.D) b = angle_from_point(s, c.params, cfg->p, cfg->xi, AngleMode::semi_convex);
            for (int j = 0; j < 12; ++j) {
                const double t = cfg->xi.length * std::ldexp(1.0, -j) * (j == 0 ? 1.0 : uniform(rng, 0.5, 1.0));
                const double dpt = s.distance(cfg->p, cfg->xi.at_arclength(t));
                const double cmp = comparison_angle(dpx, t, dpt);
                // One-ulp distance errors move cmp by about this much.
                const double noise = 4.0 * kEps * std::max(dpx, dpt) / (t * std::max(std::sin(cmp), 1e-300));
                take(i, kUpper, a.value + delta_S(c.params.S, t, dpx) - cmp, noise + a.uncertainty);
                if (b) take(i, kLower, cmp - (b->value - delta_C(c.params.C, t, dpx)), noise + b->uncertainty);
            }
            // Reversed halves through the midpoint of xi.
            const Point m = cfg->xi.at(0.5);
            if (s.distance(cfg->p, m) > 1e-3) {
                const GeodesicSegment fwd = s.geodesic(m, cfg->xi.end), back = s.geodesic(m, cfg->xi.start);
                const AngleEstimate f = angle_from_point(s, c.params, cfg->p, fwd);
                const AngleEstimate g = angle_from_point(s, c.params, cfg->p, back);
                take(i, kSumUpper, kPi - f.value - g.value, f.uncertainty + g.uncertainty);
                if (lower && s.distance(cfg->p, m) < c.params.D) {
                    const AngleEstimate fl = angle_from_point(s, c.params, cfg->p, fwd, AngleMode::semi_convex);
                    const AngleEstimate gl = angle_from_point(s, c.params, cfg->p, back, AngleMode::semi_convex);
                    take(i, kSumLower, fl.value + gl.value - kPi, fl.uncertainty + gl.uncertainty);
                }
            }
        } catch (const CurvatureViolation&) {
            broken[i] = 1;
        } catch (const DegenerateError&) {
        }
    });
    const auto nbroken = static_cast<std::size_t>(std::count(broken.begin(), broken.end(), 1));
    std::vector<CheckResult> out;
    auto emit = [&](const char* name, int which) {
        double worst = kInf;
        std::size_t resolved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::min(worst, res[i][which]);
            resolved += used[i][which];
        }
        CheckResult r = nbroken || resolved ? make_result(name, nbroken ? -kInf : worst, 1e-8, seed)
                                            : inconclusive(name, seed, "no sample resolved above roundoff");
        r.trials = n;
        r.measured["monotonicity_failures"] = nbroken;
        r.measured["resolved"] = resolved;
        out.push_back(std::move(r));
    };
    emit("almost_comparison", kUpper);
    emit("angle_sum_upper", kSumUpper);
    if (lower) {
        emit("almost_comparison_lower", kLower);
        emit("angle_sum_lower", kSumLower);
    }
    return out;
}

std::vector<CheckResult> task_strainers(const Ctx& c, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const double delta = c.st.delta;
    {
        double err = 0.0;
        for (int k = 1; k <= 4; ++k) {
            const StrainerConstants sc = strainer_constants(k, delta);
            err = std::max(err, std::abs(sc.delta_k - std::ldexp(1.0, -2 * k - 1) / k));
            err = std::max(err, std::abs(sc.epsilon_k - (1.0 - 2.0 * delta) / std::pow(4.0, k - 1)));
            err = std::max(err, std::abs(sc.bar_epsilon_k - sc.epsilon_k / std::sqrt(double(k))));
        }
        CheckResult r = make_result("strainer_constants", -err, 0.0, seed);
        r.measured["delta_1"] = strainer_constants(1, delta).delta_k;
        r.measured["epsilon_k"] = strainer_constants(c.k, delta).epsilon_k;
        out.push_back(r);
    }
    const double scale = working_length(c, c.x);
    const FindResult fr = find_strainer(*c.space, c.params, c.x, c.k, delta, scale, derive_seed(seed, 1));
    if (!fr.strainer) {
        CheckResult r = inconclusive("find_strainer", derive_seed(seed, 1), "no strainer found at budget");
        r.measured["failing_level"] = fr.check.failing_level;
        r.measured["failing_condition"] = condition_name(fr.check.failing);
        r.measured["directions_tried"] = fr.directions_tried;
        out.push_back(r);
        return out;
    }
    const Strainer& s = *fr.strainer;
    {
        CheckResult r = make_result("find_strainer", fr.check.min_margin(), 0.0, derive_seed(seed, 1));
        r.measured["k"] = c.k;
        r.measured["directions_tried"] = fr.directions_tried;
        r.measured["delta_below_delta_k"] = fr.delta_below_delta_k;
        r.measured["reading"] = fr.check.reading;
        r.measured["strainer"] = strainer_json(s);
        out.push_back(r);
    }
    double inner = kInf;
    for (const auto& pr : s.pairs)
        inner = std::min({inner, c.space->distance(pr.p, c.x), c.space->distance(pr.q, c.x)});
    const double radius = strained_radius(*c.space, c.params, s, 0.5 * inner, 64, derive_seed(seed, 2));
    {
        const OpennessReport o = verify_openness(*c.space, s, radius, c.st.targets, derive_seed(seed, 3));
        const double eps_k = strainer_constants(c.k, delta).epsilon_k;
        CheckResult r = make_result("openness", o.failures ? -kInf : o.achieved_epsilon - eps_k, 1e-6,
                                    derive_seed(seed, 3));
        r.trials = o.targets_tried;
        r.measured["achieved_epsilon"] = o.achieved_epsilon;
        r.measured["epsilon_k"] = eps_k;
        r.measured["failures"] = o.failures;
        r.measured["radius"] = radius;
        out.push_back(r);
    }
    {
        const BiLipschitz b = estimate_bilipschitz(*c.space, s, radius, c.st.pairs, derive_seed(seed, 4));
        CheckResult r = make_result("bilipschitz", b.lower, 0.0, derive_seed(seed, 4));
        r.trials = b.pairs;
        r.measured["lower"] = number_json(b.lower);
        r.measured["upper"] = b.upper;
        out.push_back(r);
    }
    {
        const ImproveResult im = improve_strainer(*c.space, c.params, s, 0.5 * delta, derive_seed(seed, 5));
        // Below this scale one ulp of the chart coordinates spoils the angle conditions.
        double scale_x = 1.0;
        for (double v : s.base) scale_x = std::max(scale_x, std::abs(v));
        const double resolution = 1e-10 * scale_x;
        const std::string why = im.stage_radius < resolution ? "stage radius below coordinate resolution"
                                                             : "openness solve or verification failed";
        CheckResult r = im.ok ? make_result("improve_strainer", 2.0 * im.r1 - im.base_shift, 0.0, derive_seed(seed, 5))
                              : inconclusive("improve_strainer", derive_seed(seed, 5), why);
        r.measured["stage_radius"] = im.stage_radius;
        r.measured["failed_stage"] = im.failed_stage;
        r.measured["r1"] = im.r1;
        r.measured["base_shift"] = im.base_shift;
        r.measured["delta_prime"] = 0.5 * delta;
        out.push_back(r);
    }
    return out;
}

std::vector<CheckResult> task_fit_norm(const Ctx& c, std::uint64_t seed) {
    Point probe(c.space->tangent_dim(), 0.0);
    if (!c.space->chart_exp(c.x, probe)) return {};
    const int dim = c.space->tangent_dim();
    const std::vector<double> scales = c.st.scales.empty() ? std::vector<double>{1e-3, 1e-4, 1e-5} : c.st.scales;
    const std::size_t dirs = dim == 2 ? 128 : 512;
    FittedNorm fit;
    try {
        fit = fit_norm(*c.space, c.x, scales, dirs, seed);
    } catch (const DomainError& e) {
        return {inconclusive("fit_norm", seed, e.what())};
    }
    std::vector<CheckResult> out;
    CheckResult r;
    if (const LpSpace* lp = as_lp(c)) {
        double err = 0.0;
        for (std::size_t i = 0; i < fit.directions.size(); ++i) {
            const double exact = 1.0 / lp->norm(fit.directions[i]);
            err = std::max(err, std::abs(fit.radius[i] - exact) / exact);
        }
        r = make_result("fit_norm", 0.02 - err, 0.0, seed);
        r.measured["sup_relative_error"] = err;
    } else {
        r = make_result("fit_norm", 1e-3 - std::max(fit.drift, fit.symmetry_error), 0.0, seed);
    }
    r.trials = fit.directions.size();
    r.measured["drift"] = fit.drift;
    r.measured["symmetry_error"] = fit.symmetry_error;
    r.measured["convexity_excess"] = fit.convexity_excess;
    r.measured["interpolation_error"] = fit.interpolation_error;
    out.push_back(r);

    std::optional<ConvexHypothesis> hyp;
    if (const LpSpace* lp = as_lp(c)) hyp = ConvexHypothesis{lp->p(), std::pow(2.0, lp->p() - 2.0)};
    const std::size_t trials = std::min<std::size_t>(c.st.trials, 20000);
    const NormCertification cert = certify_norm(fit, c.params.S, hyp, trials, derive_seed(seed, 1));
    // Residuals net of the interpolation allowance.
    double worst = cert.smooth.worst_residual + cert.smooth_allowance;
    if (cert.convex) worst = std::min(worst, cert.convex->worst_residual + cert.convex_allowance);
    CheckResult q = make_result("norm_certification", worst, -kViolationThreshold, derive_seed(seed, 1));
    q.measured["interpolation_error"] = fit.interpolation_error;
    q.measured["smooth_allowance"] = cert.smooth_allowance;
    q.trials = trials;
    q.measured["smooth_residual"] = number_json(cert.smooth.worst_residual);
    if (cert.convex) q.measured["convex_residual"] = number_json(cert.convex->worst_residual);
    out.push_back(q);
    return out;
}

// Blow-up along fixed geodesic germs from x: points xi_i(lambda t_i) with
// distances divided by lambda, so samples at different scales correspond.
FinitePointedSample germ_blowup(const Space& s, const Point& x, double lambda, std::size_t count, double radius,
                                std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> pts{x};
    while (pts.size() < count) {
        const auto y = s.point_at_distance(x, radius, rng);
        const double t = radius * uniform(rng, 0.1, 1.0);
        if (!y) continue;
        pts.push_back(s.geodesic(x, *y).at_arclength(lambda * t));
    }
    return FinitePointedSample::from_points(s, pts, 0, 1.0 / lambda);
}

std::vector<CheckResult> task_blowup(const Ctx& c, std::uint64_t seed) {
    const double radius = working_length(c, c.x);
    // Matched seeds give corresponding points only for normed models.
    const bool normed = as_lp(c) != nullptr;
    auto sample = [&](double lam) {
        return normed ? blowup_sample(*c.space, c.x, lam, 8, radius, seed) : germ_blowup(*c.space, c.x, lam, 8, radius, seed);
    };
    const FinitePointedSample ref = sample(std::ldexp(1.0, -20));
    Json uppers = Json::array(), lowers = Json::array();
    std::vector<double> u;
    for (double lam : {1.0, 0.5, 0.25}) {
        const FinitePointedSample b = sample(lam);
        const GhBounds g = gh_distance_bounds(b, ref);
        u.push_back(g.upper);
        uppers.push_back(g.upper);
        lowers.push_back(g.lower);
    }
    double worst = kInf;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) worst = std::min(worst, u[i] - u[i + 1]);
    CheckResult r = make_result("blowup_gh", worst, 1e-9, seed);
    r.measured["upper"] = uppers;
    r.measured["lower"] = lowers;
    r.measured["sampler"] = normed ? "ball" : "germs";
    return {r};
}

std::vector<CheckResult> task_directions(const Ctx& c, std::uint64_t seed) {
    const ConeSpace* cone = as_cone(c);
    const Point x = cone ? c.space->base_point() : c.x;
    const double eps = c.st.eps;
    const std::size_t budget = 1024;
    std::vector<std::size_t> counts;
    bool within = true;
    Json per = Json::array();
    const double cap = c.space->valid_radius(x);
    for (double l : {0.1, 1.0, 10.0}) {
        if (l > 0.5 * cap) continue;
        const DirectionPacking d = packing_directions(*c.space, x, l, eps, budget, seed);
        counts.push_back(d.count);
        within = within && d.within_bound;
        Json e;
        e["l"] = l;
        e["count"] = d.count;
        e["direct"] = d.direct;
        e["bound"] = number_json(d.bound);
        per.push_back(e);
    }
    std::vector<CheckResult> out;
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CheckResult r = make_result("direction_packing", within ? -double(*hi - *lo) : -kInf, 0.0, seed);
    r.measured["eps"] = eps;
    r.measured["by_length"] = per;
    out.push_back(r);
    if (cone) {
        const double expected = std::floor(cone->theta() / eps);
        CheckResult a = make_result("direction_apex", 1.0 - std::abs(double(counts.front()) - expected), 0.0, seed);
        a.measured["count"] = counts.front();
        a.measured["expected"] = expected;
        out.push_back(a);
    }
    return out;
}

std::vector<CheckResult> task_strainer_number(const Ctx& c, std::uint64_t seed) {
    const Point x = as_cone(c) ? c.space->base_point() : c.x;
    const std::vector<double> scales = c.st.scales.empty() ? std::vector<double>{0.1, 0.01} : c.st.scales;
    const StrainerNumber sn = strainer_number(*c.space, c.params, x, c.st.delta, scales, seed);
    CheckResult r = make_result("strainer_number", -std::abs(double(sn.number - c.params.n)), 0.0, seed);
    r.measured["number"] = sn.number;
    r.measured["declared_n"] = c.params.n;
    r.measured["delta_below_delta_k"] = sn.delta_below_delta_k;
    return {r};
}

std::string curve_csv(const std::vector<double>& r, const std::vector<double>& v, const std::vector<double>& e) {
    std::ostringstream os;
    os.precision(17);
    os << "radius,value,stderr\n";
    for (std::size_t i = 0; i < r.size(); ++i) os << r[i] << ',' << v[i] << ',' << e[i] << '\n';
    return os.str();
}

std::vector<CheckResult> task_rough_dimension(const Ctx& c, std::uint64_t seed) {
    const int n = c.params.n;
    const double W = 0.5 * working_length(c, c.x);
    std::vector<double> radii = c.st.radii;
    if (radii.size() < 3) {
        // sqrt(2)-spaced radii whose counts stay between about 50 and 1500.
        const double rmin = W / (n <= 1 ? 80.0 : n == 2 ? 20.0 : 8.0);
        radii.clear();
        for (int i = 0; i < (n >= 3 ? 4 : 5); ++i) radii.push_back(rmin * std::pow(2.0, 0.5 * i));
    }
    // Sample mesh about a quarter of the smallest radius.
    const double rmin = *std::min_element(radii.begin(), radii.end());
    const double outer = W + *std::max_element(radii.begin(), radii.end());
    const double mesh = std::pow(4.0 * outer / rmin, std::max(n, 1));
    const auto samples = std::max<std::size_t>(c.st.samples, static_cast<std::size_t>(std::min(4.0 * mesh, 4e5)));
    const PackingCurve pc = windowed_packing_curve(*c.space, c.x, W, radii, samples, 1, seed);
    const double d = rough_dimension(pc);
    CheckResult r = make_result("rough_dimension", 0.25 - std::abs(d - n), 0.0, seed);
    r.trials = samples;
    r.measured["dimension"] = d;
    r.measured["window"] = W;
    std::vector<double> counts(pc.counts.begin(), pc.counts.end());
    r.curves.push_back({"packing", curve_csv(pc.radii, counts, std::vector<double>(counts.size(), 0.0))});
    return {r};
}

std::vector<CheckResult> task_bishop_gromov(const Ctx& c, std::uint64_t seed) {
    const double R = working_length(c, c.x);
    std::vector<double> radii = c.st.radii;
    if (radii.empty()) radii = {0.25 * R, 0.5 * R, 0.75 * R, R};
    const std::size_t samples = std::max<std::size_t>(c.st.samples, 20000);
    const BallVolumeCurve curve = mc_ball_volume(*c.space, c.x, radii, samples, seed);
    ResidualReport rep = bishop_gromov_check(curve, c.params.n);
    rep.seed = seed;
    CheckResult r = make_result("bishop_gromov", rep.worst_residual, 0.0, seed);
    r.trials = samples;
    Json v = Json::array();
    for (double x : curve.volumes) v.push_back(x);
    r.measured["volumes"] = v;
    r.curves.push_back({"ball_volume", curve_csv(curve.radii, curve.volumes, curve.stderrs)});
    return {r};
}

std::vector<CheckResult> task_strained_fraction(const Ctx& c, std::uint64_t seed) {
    const Point center = c.space->base_point();
    const double R = working_length(c, center);
    const StrataSummary s =
        strained_fraction(*c.space, c.params, center, R, c.params.n, c.st.delta, 1e-3 * R, c.st.samples, seed);
    CheckResult r = make_result("strained_fraction", s.fraction() - 0.999, 0.0, seed);
    r.trials = s.sampled;
    r.measured["fraction"] = s.fraction();
    r.measured["not_found"] = s.not_found.size();
    return {r};
}

std::vector<CheckResult> task_singular(const Ctx& c, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const double delta = c.st.delta;
    const ThresholdConstants t0 = threshold_constants(delta, kInf, 0, 1.0);
    const Point x0 = as_cone(c) ? c.space->base_point() : c.x;
    const DirectionPacking dp = packing_directions(*c.space, x0, 1.0, delta, 1024, derive_seed(seed, 1));
    const double R = working_length(c, c.x);
    const double C = measure_covering_constant(*c.space, c.x, t0.L1, {R, 0.1 * R}, 400, derive_seed(seed, 2));
    const ThresholdConstants tc = threshold_constants(delta, t0.L1, static_cast<int>(dp.direct), C);
    {
        const double direct = std::max(2.0 / (1.0 - std::cos(delta)) + 1.0, 1.0 / std::sin(delta));
        const double s0 = std::min(4.0, 1.0 + 2.0 * (std::cos(delta) - std::cos(2.0 * delta)) / (t0.L1 - 1.0));
        bool strict = std::acos(1.0 - 2.0 / (tc.L0 - 1.0)) < delta && std::asin(1.0 / tc.L0) < delta;
        const double err = std::max(std::abs(tc.L0 - direct), std::abs(tc.S0 - s0));
        CheckResult r = make_result("threshold_constants", strict ? -err : -kInf, 1e-6, seed);
        r.measured["L0"] = tc.L0;
        r.measured["S0"] = tc.S0;
        r.measured["L1"] = tc.L1;
        r.measured["S1"] = tc.S1;
        r.measured["N0"] = tc.N0;
        r.measured["M"] = tc.M;
        r.measured["C"] = tc.C;
        r.measured["log10_K"] = (tc.M - 1) * std::log10(tc.C);
        out.push_back(r);
    }

    // A 1-strainer at a point rho0 from the base, region reaching the base.
    const double dsp = 0.04;
    Point x = c.x;
    double rho0 = 0.01;
    if (as_cone(c)) x = {rho0, 0.0};
    const double rx = 2.0 * rho0;
    const double scale = 0.25 * rx * c.params.S / (2.0 * (1.0 - std::cos(0.5 * dsp)));
    const FindResult fr = find_strainer(*c.space, c.params, x, 1, dsp, std::min(scale, 0.9 * c.space->valid_radius(x)),
                                        derive_seed(seed, 3));
    if (!fr.strainer) {
        out.push_back(inconclusive("singular_packing", derive_seed(seed, 3), "no 1-strainer for the region"));
        return out;
    }
    CylinderRegion reg;
    reg.base = x;
    reg.rx = rx;
    reg.strainer = *fr.strainer;
    reg.r = std::min(dsp * reg.long_range(*c.space), dsp * rx);
    const Point target = c.space->base_point();
    int m = 1;
    const Point& p = reg.strainer.pairs[0].p;
    const double diff = c.space->distance(p, x) - c.space->distance(p, target);
    if (c.space->distance(x, target) < rx && diff > 0.0) m = static_cast<int>(std::floor(diff / (0.1 * reg.r))) + 1;
    reg.m = {m};
    const double bound = std::pow(tc.C, tc.M - 1);
    const SingularPacking sp = singular_packing(*c.space, c.params, reg, dsp, 200, derive_seed(seed, 4), bound);
    const double logk = (tc.M - 1) * std::log10(tc.C);
    CheckResult r = make_result("singular_packing", logk - std::log10(std::max<double>(1.0, double(sp.packing))), 0.0,
                                derive_seed(seed, 4));
    r.trials = sp.sampled;
    r.measured["members"] = sp.members;
    r.measured["strained"] = sp.strained;
    r.measured["not_found"] = sp.not_found;
    r.measured["packing"] = sp.packing;
    r.measured["log10_bound"] = logk;
    r.measured["m"] = m;
    out.push_back(r);
    return out;
}

const std::vector<Task>& tasks() {
    static const std::vector<Task> t = {
        {1, "curvature", task_s_concavity},         {2, "curvature", task_busemann},
        {3, "curvature", task_semiconvexity},       {4, "curvature", task_norms},
        {10, "angles", task_angle_anchor},          {11, "angles", task_tangent_relation},
        {12, "angles", task_almost_comparison},     {20, "strainers", task_strainers},
        {30, "tangent", task_fit_norm},             {31, "tangent", task_blowup},
        {32, "tangent", task_directions},           {40, "dimension", task_strainer_number},
        {41, "dimension", task_rough_dimension},    {42, "dimension", task_bishop_gromov},
        {50, "strata", task_strained_fraction},     {51, "strata", task_singular},
    };
    return t;
}

// Default probe point: the base point, moved off any cone apex.
Point default_point(const Space& s) {
    if (s.kind() == SpaceKind::cone) return {1.0, 0.0};
    if (auto* prod = dynamic_cast<const ProductSpace*>(&s)) {
        std::vector<Point> parts;
        for (const auto& f : prod->factors()) parts.push_back(default_point(*f));
        return prod->join(parts);
    }
    return s.base_point();
}

Ctx make_ctx(const ExperimentConfig& config) {
    Ctx c;
    c.space = parse_space(config.space);
    c.params = params_from(config.params, c.space->declared());
    c.st = config.settings;
    c.echo = config.echo();
    c.k = c.st.k > 0 ? c.st.k : c.params.n;
    c.x = c.st.point ? *c.st.point : default_point(*c.space);
    return c;
}

Json result_json(const CheckResult& r, const Ctx& c) {
    Json j;
    j["check"] = r.check;
    j["verdict"] = r.verdict;
    j["residual"] = std::isnan(r.residual) ? Json(nullptr) : number_json(r.residual);
    j["tolerance"] = r.tolerance;
    j["seed"] = r.seed;
    if (r.trials) j["trials"] = r.trials;
    if (!r.measured.empty()) j["measured"] = r.measured;
    std::optional<Json> w = r.witness;
    if (!w && r.verdict == "violation") {
        w = Json::object();
        (*w)["check"] = r.check;
        (*w)["rerun"] = true;
    }
    if (w) {
        (*w)["residual"] = j["residual"];
        (*w)["seed"] = r.seed;
        (*w)["task"] = r.task;
        (*w)["config"] = c.echo;
        (*w)["version"] = kToolVersion;
        j["witness"] = *w;
    }
    return j;
}

std::string sanitize(const std::string& s) {
    std::string o = s;
    for (char& ch : o)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') ch = '_';
    return o;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> n = {"curvature", "angles", "strainers", "tangent", "dimension", "strata", "all"};
    return n;
}

Json ExperimentConfig::echo() const {
    Json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["space"] = space;
    j["params"] = params;
    Json s;
    s["delta"] = settings.delta;
    s["k"] = settings.k;
    s["trials"] = settings.trials;
    s["pairs"] = settings.pairs;
    s["targets"] = settings.targets;
    s["samples"] = settings.samples;
    s["eps"] = settings.eps;
    s["radii"] = Json::array();
    for (double r : settings.radii) s["radii"].push_back(r);
    s["scales"] = Json::array();
    for (double r : settings.scales) s["scales"].push_back(r);
    s["point"] = settings.point ? point_json(*settings.point) : Json(nullptr);
    j["settings"] = s;
    return j;
}

ExperimentConfig parse_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error& e) {
            const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
            const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
            throw InputError("line " + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
        }
        return config_from_json(j);
    }
    const IniDoc doc = parse_ini(text);
    try {
        return config_from_json(doc.root);
    } catch (const InputError& e) {
        throw InputError(line_of(e.what(), doc));
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig config_from_echo(const Json& echo) {
    Json j;
    j["run"]["suite"] = echo.at("suite");
    j["run"]["seed"] = echo.at("seed");
    j["space"] = echo.at("space");
    j["params"] = echo.at("params");
    Json s = echo.at("settings");
    if (s.contains("k") && s["k"] == 0) s.erase("k");
    if (s.contains("point") && s["point"].is_null()) s.erase("point");
    for (const char* key : {"radii", "scales"})
        if (s.contains(key) && s[key].empty()) s.erase(key);
    j["settings"] = s;
    return config_from_json(j);
}

RunOutput run_experiment(const ExperimentConfig& input) {
    ExperimentConfig config = input;
    if (const char* env = std::getenv("BCLAB_TRIALS")) {
        try {
            config.settings.trials = count_from(ini_scalar(env), "BCLAB_TRIALS");
        } catch (const InputError& e) {
            throw InputError(std::string("environment: ") + e.what());
        }
    }
    const Ctx ctx = make_ctx(config);
    std::vector<const Task*> chosen;
    for (const Task& t : tasks())
        if (config.suite == "all" || t.suite == config.suite) chosen.push_back(&t);

    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    std::vector<std::vector<CheckResult>> results(chosen.size());
    std::vector<double> seconds(chosen.size(), 0.0);
    for_each_index(chosen.size(), Exec::parallel, [&](std::size_t i) {
        const auto t0 = clock::now();
        results[i] = chosen[i]->fn(ctx, derive_seed(config.seed, static_cast<std::uint64_t>(chosen[i]->id)));
        for (auto& r : results[i]) r.task = chosen[i]->id;
        seconds[i] = std::chrono::duration<double>(clock::now() - t0).count();
    });

    std::vector<std::pair<CheckResult, double>> flat;
    for (std::size_t i = 0; i < chosen.size(); ++i)
        for (auto& r : results[i]) flat.emplace_back(std::move(r), seconds[i]);
    std::sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) { return a.first.check < b.first.check; });

    RunOutput out;
    Json& rep = out.report;
    rep["schema"] = kSchemaVersion;
    rep["tool"] = "bclab";
    rep["version"] = kToolVersion;
    rep["config"] = ctx.echo;
    rep["seed"] = config.seed;
    rep["seed_derivation"] = "check seed = derive_seed(master, task id); tasks: curvature 1-4, angles 10-12, strainers 20, "
                             "tangent 30-32, dimension 40-42, strata 50-51";
    rep["checks"] = Json::array();
    std::size_t pass = 0, viol = 0, inc = 0;
    Json timing_checks = Json::object();
    for (auto& [r, sec] : flat) {
        rep["checks"].push_back(result_json(r, ctx));
        timing_checks[r.check] = sec;
        if (r.verdict == "pass") ++pass;
        else if (r.verdict == "violation") ++viol;
        else ++inc;
        for (auto& cv : r.curves) out.curves.push_back({sanitize(r.check) + "." + cv.name, cv.csv});
    }
    rep["summary"] = {{"pass", pass}, {"violation", viol}, {"inconclusive", inc}};
    rep["timing"] = {{"total_seconds", std::chrono::duration<double>(clock::now() - t_start).count()},
                     {"checks", timing_checks}};
    out.exit_code = viol ? 1 : 0;
    return out;
}

Json strip_timing(const Json& report) {
    Json j = report;
    j.erase("timing");
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move report into '" + path + "'");
    }
}

std::vector<ReplayOutcome> replay(const Json& doc) {
    std::vector<Json> witnesses;
    if (doc.contains("checks")) {
        for (const auto& c : doc["checks"])
            if (c.contains("witness")) witnesses.push_back(c["witness"]);
    } else {
        witnesses.push_back(doc);
    }
    std::vector<ReplayOutcome> out;
    for (const Json& w : witnesses) {
        ReplayOutcome o;
        if (!w.contains("check") || !w["check"].is_string()) throw InputError("field 'witness.check': missing");
        o.check = w["check"].get<std::string>();
        o.version_mismatch = !w.contains("version") || w["version"] != kToolVersion;
        if (w.contains("residual") && !w["residual"].is_null()) o.recorded = w["residual"].get<double>();
        if (!w.contains("config")) throw InputError("field 'witness.config': missing");
        const ExperimentConfig cfg = config_from_echo(w["config"]);
        if (w.value("rerun", false)) {
            const Ctx ctx = make_ctx(cfg);
            if (!w.contains("task") || !w["task"].is_number_integer()) throw InputError("field 'witness.task': missing");
            const int id = w["task"].get<int>();
            bool found = false;
            for (const Task& t : tasks()) {
                if (t.id != id) continue;
                for (const auto& r : t.fn(ctx, derive_seed(cfg.seed, static_cast<std::uint64_t>(id))))
                    if (r.check == o.check) {
                        o.residual = r.residual;
                        found = true;
                    }
            }
            if (!found) throw InputError("witness: check '" + o.check + "' not reproducible from its configuration");
        } else {
            const SpacePtr space = parse_space(w.contains("space") ? w["space"] : cfg.space, "witness.space");
            o.residual = evaluate_witness(space.get(), witness_from(w));
        }
        out.push_back(o);
    }
    return out;
}

}  // namespace bclab
