#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bclab/spaces.hpp"

namespace bclab {

// A margin counts as satisfied only above this slack.
inline constexpr double kStrainerSlack = 1e-9;

struct StrainerPair {
    Point p;
    Point q;
};

struct Strainer {
    std::vector<StrainerPair> pairs;
    double delta = 0.1;
    Point base;

    std::size_t k() const { return pairs.size(); }
};

struct StrainerConstants {
    double delta_k = 0.0;
    double epsilon_k = 0.0;
    double bar_epsilon_k = 0.0;
};

StrainerConstants strainer_constants(int k, double delta);

struct OneStrainerCheck {
    bool ok = false;
    double angle = 0.0;         // comparison angle p x q
    double angle_margin = 0.0;  // angle - (pi - delta)
    double ratio_margin = 0.0;  // delta - bar_delta_S(|qx|; |px|)
    double radius_margin = kInf;  // D - |px|
};

OneStrainerCheck is_one_strainer(const Space& space, const CurvatureParams& params, const Point& p, const Point& x,
                                 const Point& q, double delta);

enum class StrainerCondition {
    none,
    radius,          // |p_1 x| < D
    opposite_angle,  // comparison angle p_j x q_j > pi - delta
    opposite_ratio,  // bar_delta_S(|q_j x|; |p_j x|) < delta
    hierarchy,       // bar_delta_SC(|p_j x|; |p_i x|) < delta
    orthogonal_p,    // |angle p_i x p_j - pi/2| < delta
    orthogonal_q,    // |angle p_i x q_j - pi/2| < delta
};

std::string condition_name(StrainerCondition c);

struct LevelMargins {
    double angle_margin = 0.0;
    double ratio_margin = 0.0;
    double hierarchy_margin = kInf;
    double orthogonal_p_margin = kInf;
    double orthogonal_q_margin = kInf;

    double min() const;
};

struct StrainerCheck {
    bool ok = false;
    // 1-based level of the first failure, 0 when ok.
    int failing_level = 0;
    StrainerCondition failing = StrainerCondition::none;
    double radius_margin = kInf;
    std::vector<LevelMargins> levels;
    // Constraints on q_i are checked only against lower p_i.
    std::string reading = "inductive";

    // Numbering of the inductive definition at the top level: 1 for a
    // failure below level k, 2 for the strainer and distance conditions at
    // level k, 3 for orthogonality at level k.
    int failing_index() const;
    double min_margin() const;
};

StrainerCheck is_k_strainer(const Space& space, const CurvatureParams& params, const Strainer& candidate);
// Same pairs evaluated at another base point.
StrainerCheck is_k_strainer_at(const Space& space, const CurvatureParams& params, const Strainer& candidate,
                               const Point& base);

struct FindResult {
    std::optional<Strainer> strainer;
    // Best candidate and its check when nothing verified.
    Strainer best;
    StrainerCheck check;
    int directions_tried = 0;
    bool delta_below_delta_k = true;
};

FindResult find_strainer(const Space& space, const CurvatureParams& params, const Point& x, int k, double delta,
                         double scale, std::uint64_t seed, Exec exec = Exec::parallel);

std::vector<double> strainer_map(const Space& space, const Strainer& strainer, const Point& x);

// Largest radius r0 / 2^i whose sampled points all keep the strainer.
double strained_radius(const Space& space, const CurvatureParams& params, const Strainer& strainer, double r0,
                       std::size_t samples, std::uint64_t seed);

struct SolveResult {
    bool ok = false;
    Point y;
    double residual = kInf;  // |f(y) - v|_1
    int steps = 0;
};

// Descent toward f(y) = v from `start`, fixing lower coordinates first and
// moving along geodesics toward p_m or q_m for coordinate m.
SolveResult solve_strainer_target(const Space& space, const Strainer& strainer, const Point& start,
                                  const std::vector<double>& v, double tol);

struct OpennessReport {
    double achieved_epsilon = 0.0;
    std::size_t targets_tried = 0;
    std::size_t failures = 0;
    std::vector<double> worst_case;     // target of the smallest successful ratio
    std::vector<double> failed_target;  // first failure, if any
};

OpennessReport verify_openness(const Space& space, const Strainer& strainer, double radius, std::size_t targets,
                               std::uint64_t seed, Exec exec = Exec::parallel);
// A single explicit target; used to exercise the failure path.
OpennessReport verify_openness_target(const Space& space, const Strainer& strainer, double radius,
                                      const std::vector<double>& v);

struct BiLipschitz {
    double lower = kInf;
    double upper = 0.0;
    std::size_t pairs = 0;
};

BiLipschitz estimate_bilipschitz(const Space& space, const Strainer& strainer, double radius, std::size_t trials,
                                 std::uint64_t seed, Exec exec = Exec::parallel);

struct ImproveResult {
    bool ok = false;
    Strainer strainer;
    // 1-based stage where the openness solve or verification failed.
    int failed_stage = 0;
    double r1 = 0.0;
    // Working radius of the last stage entered.
    double stage_radius = 0.0;
    double base_shift = 0.0;
    StrainerCheck check;
    bool delta_below_delta_k = true;
};

ImproveResult improve_strainer(const Space& space, const CurvatureParams& params, const Strainer& strainer,
                               double delta_prime, std::uint64_t seed);

struct StrainerNumber {
    int number = 0;
    // Per probed k, one flag per scale.
    std::vector<std::vector<bool>> found;
    bool delta_below_delta_k = true;
};

StrainerNumber strainer_number(const Space& space, const CurvatureParams& params, const Point& x, double delta,
                               const std::vector<double>& scales, std::uint64_t seed, int max_k = 6,
                               std::size_t points_per_scale = 12);

}  // namespace bclab
