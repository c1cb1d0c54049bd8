#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bclab/spaces.hpp"

namespace bclab {

// A replayable configuration.  `check` names the inequality; points and
// scalars are laid out per check (see evaluate_witness).
struct Witness {
    std::string check;
    std::vector<Point> points;
    std::vector<double> scalars;
};

struct ResidualReport {
    std::string check;
    // Signed; >= 0 means the inequality held on every sampled configuration.
    double worst_residual = kInf;
    Witness worst_witness;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

struct CheckOptions {
    Exec exec = Exec::parallel;
    // Symmetric configurations (axes, diagonals, equal-norm pairs) first.
    bool structured = true;
};

inline constexpr double kViolationThreshold = -1e-9;

ResidualReport check_s_concavity(const Space& space, const CurvatureParams& params, std::size_t trials,
                                 std::uint64_t seed, const CheckOptions& opts = {});
ResidualReport check_local_semiconvexity(const Space& space, const CurvatureParams& params, std::size_t trials,
                                         std::uint64_t seed, const CheckOptions& opts = {});

enum class BusemannDirection { concave, convex };

ResidualReport check_busemann_monotone(const Space& space, BusemannDirection direction, std::size_t trials,
                                       std::uint64_t seed, const CheckOptions& opts = {});

enum class UniformMode { convex, smooth };

using NormFn = std::function<double(std::span<const double>)>;

// convex: |(u+v)/2|^p <= |u|^p/2 + |v|^p/2 - |u-v|^p / (4 constant)
// smooth: |(u+v)/2|^p >= |u|^p/2 + |v|^p/2 - constant |u-v|^p / 4
ResidualReport check_norm_uniform(double p_norm, UniformMode mode, double power, double constant, std::size_t trials,
                                  std::uint64_t seed, int dim = 2, const CheckOptions& opts = {});
ResidualReport check_norm_uniform(const NormFn& norm, int dim, UniformMode mode, double power, double constant,
                                  std::size_t trials, std::uint64_t seed, const CheckOptions& opts = {});

double estimate_best_S(const Space& space, std::size_t trials, std::uint64_t seed, const CheckOptions& opts = {});
double estimate_best_C(const Space& space, double D, std::size_t trials, std::uint64_t seed,
                       const CheckOptions& opts = {});

// Residuals of a single configuration, shared by the checkers and replay.
double s_concavity_residual(const Space& space, const Point& p, const GeodesicSegment& xi, double t, double S);
double semiconvexity_residual(const Space& space, const Point& p, const GeodesicSegment& xi, double t, double C);
double norm_uniform_residual(const NormFn& norm, UniformMode mode, double power, double constant,
                             std::span<const double> u, std::span<const double> v);

// Re-evaluates a witness.  The norm is needed only for norm-uniform
// witnesses produced from a custom norm; lp witnesses carry their exponent.
double evaluate_witness(const Space* space, const Witness& w, const NormFn* norm = nullptr);

}  // namespace bclab
