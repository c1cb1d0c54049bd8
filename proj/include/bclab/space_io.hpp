#pragma once

#include <json.hpp>

#include "bclab/curvature.hpp"
#include "bclab/spaces.hpp"
#include "bclab/strainers.hpp"

namespace bclab {

using Json = nlohmann::ordered_json;

// Infinite values are written as null and read back as +inf.
Json number_json(double v);
double number_from(const Json& j, const std::string& field);

Json point_json(const Point& x);
Point point_from(const Json& j, const std::string& field);

// {"kind": "lp", "p": 3, "n": 2}, {"kind": "euclidean", "n": 2},
// {"kind": "cone", "theta": 4}, {"kind": "sphere", "cap": 1, "C": 0.5},
// {"kind": "product", "factors": [a, b]}.
Json describe_space(const Space& space);
// Throws InputError naming the offending field.
SpacePtr parse_space(const Json& j, const std::string& field = "space");

Json params_json(const CurvatureParams& params);
CurvatureParams params_from(const Json& j, const CurvatureParams& defaults, const std::string& field = "params");

Json witness_json(const Witness& w);
Witness witness_from(const Json& j);

Json strainer_json(const Strainer& s);
Strainer strainer_from(const Json& j);

}  // namespace bclab
