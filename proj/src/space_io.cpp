#include "bclab/space_io.hpp"

#include <cmath>

namespace bclab {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw InputError("field '" + field + "': " + what);
}

const Json& member(const Json& j, const char* key, const std::string& field) {
    if (!j.is_object()) bad(field, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(field + "." + key, "missing");
    return *it;
}

int integer_from(const Json& j, const std::string& field) {
    const double v = number_from(j, field);
    if (v != std::floor(v) || std::abs(v) > 1e9) bad(field, "expected an integer");
    return static_cast<int>(v);
}

}  // namespace

Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j, const std::string& field) {
    if (j.is_null()) return kInf;
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    bad(field, "expected a number");
}

Json point_json(const Point& x) {
    Json a = Json::array();
    for (double v : x) a.push_back(v);
    return a;
}

Point point_from(const Json& j, const std::string& field) {
    if (!j.is_array()) bad(field, "expected an array of coordinates");
    Point x;
    for (std::size_t i = 0; i < j.size(); ++i) x.push_back(number_from(j[i], field + "[" + std::to_string(i) + "]"));
    return x;
}

Json describe_space(const Space& space) {
    Json j;
    if (auto* lp = dynamic_cast<const LpSpace*>(&space)) {
        j["kind"] = "lp";
        j["p"] = lp->p();
        j["n"] = lp->dimension();
    } else if (auto* cone = dynamic_cast<const ConeSpace*>(&space)) {
        j["kind"] = "cone";
        j["theta"] = cone->theta();
    } else if (auto* cap = dynamic_cast<const SphereCap*>(&space)) {
        j["kind"] = "sphere";
        j["cap"] = cap->cap_radius();
        j["C"] = cap->semiconvexity_constant();
    } else if (auto* prod = dynamic_cast<const ProductSpace*>(&space)) {
        j["kind"] = "product";
        j["factors"] = Json::array();
        for (const auto& f : prod->factors()) j["factors"].push_back(describe_space(*f));
    } else {
        throw InputError("describe_space: unknown model");
    }
    return j;
}

SpacePtr parse_space(const Json& j, const std::string& field) {
    if (!j.is_object()) bad(field, "expected a space description");
    const Json& kind_j = member(j, "kind", field);
    if (!kind_j.is_string()) bad(field + ".kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    try {
        if (kind == "lp") {
            const double p = number_from(member(j, "p", field), field + ".p");
            const int n = integer_from(member(j, "n", field), field + ".n");
            return make_lp(p, n);
        }
        if (kind == "euclidean") return make_euclidean(integer_from(member(j, "n", field), field + ".n"));
        if (kind == "cone") return make_cone(number_from(member(j, "theta", field), field + ".theta"));
        if (kind == "sphere") {
            const double cap = number_from(member(j, "cap", field), field + ".cap");
            const double C = j.contains("C") ? number_from(j["C"], field + ".C") : 0.0;
            return make_sphere_cap(cap, C);
        }
        if (kind == "product") {
            const Json& f = member(j, "factors", field);
            if (!f.is_array() || f.size() != 2) bad(field + ".factors", "expected two factor descriptions");
            return make_product(parse_space(f[0], field + ".factors[0]"), parse_space(f[1], field + ".factors[1]"));
        }
    } catch (const InputError& e) {
        const std::string msg = e.what();
        if (msg.rfind("field '", 0) == 0) throw;
        bad(field, msg);
    }
    bad(field + ".kind", "unknown kind '" + kind + "' (lp | euclidean | cone | sphere | product)");
}

Json params_json(const CurvatureParams& params) {
    Json j;
    j["S"] = params.S;
    j["C"] = params.C;
    j["D"] = number_json(params.D);
    j["n"] = params.n;
    return j;
}

CurvatureParams params_from(const Json& j, const CurvatureParams& defaults, const std::string& field) {
    CurvatureParams p = defaults;
    if (j.is_null()) return p;
    if (!j.is_object()) bad(field, "expected an object");
    if (j.contains("S")) p.S = number_from(j["S"], field + ".S");
    if (j.contains("C")) p.C = number_from(j["C"], field + ".C");
    if (j.contains("D")) p.D = number_from(j["D"], field + ".D");
    if (j.contains("n")) p.n = integer_from(j["n"], field + ".n");
    try {
        p.validate();
    } catch (const InputError& e) {
        bad(field, e.what());
    }
    return p;
}

Json witness_json(const Witness& w) {
    Json j;
    j["check"] = w.check;
    j["points"] = Json::array();
    for (const auto& x : w.points) j["points"].push_back(point_json(x));
    j["scalars"] = Json::array();
    for (double v : w.scalars) j["scalars"].push_back(number_json(v));
    return j;
}

Witness witness_from(const Json& j) {
    Witness w;
    const Json& c = member(j, "check", "witness");
    if (!c.is_string()) bad("witness.check", "expected a string");
    w.check = c.get<std::string>();
    const Json& pts = member(j, "points", "witness");
    if (!pts.is_array()) bad("witness.points", "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i)
        w.points.push_back(point_from(pts[i], "witness.points[" + std::to_string(i) + "]"));
    const Json& sc = member(j, "scalars", "witness");
    if (!sc.is_array()) bad("witness.scalars", "expected an array");
    for (std::size_t i = 0; i < sc.size(); ++i)
        w.scalars.push_back(number_from(sc[i], "witness.scalars[" + std::to_string(i) + "]"));
    return w;
}

Json strainer_json(const Strainer& s) {
    Json j;
    j["delta"] = s.delta;
    j["base"] = point_json(s.base);
    j["pairs"] = Json::array();
    for (const auto& pr : s.pairs) {
        Json e;
        e["p"] = point_json(pr.p);
        e["q"] = point_json(pr.q);
        j["pairs"].push_back(e);
    }
    return j;
}

Strainer strainer_from(const Json& j) {
    Strainer s;
    s.delta = number_from(member(j, "delta", "strainer"), "strainer.delta");
    s.base = point_from(member(j, "base", "strainer"), "strainer.base");
    const Json& pairs = member(j, "pairs", "strainer");
    if (!pairs.is_array()) bad("strainer.pairs", "expected an array");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string f = "strainer.pairs[" + std::to_string(i) + "]";
        s.pairs.push_back({point_from(member(pairs[i], "p", f), f + ".p"), point_from(member(pairs[i], "q", f), f + ".q")});
    }
    return s;
}

}  // namespace bclab
