#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bclab {

using Point = std::vector<double>;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy shared by every module.  Violations found by the
// checkers are data (ResidualReport), never exceptions.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct DegenerateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CurvatureViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Exec { serial, parallel };

// Counter-based seed derivation (splitmix64 finalizer over a running mix).
std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// Library-independent draws so reports are reproducible across toolchains.
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
double normal01(Rng& rng);
double log_uniform(Rng& rng, double lo, double hi);

int worker_count();

// Runs f(i) for i in [0, n).  Results must be written to per-index slots;
// callers fold them serially afterwards, so both policies agree bit for bit.
// The first exception by index is rethrown after the loop.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
    std::exception_ptr first;
    std::size_t first_index = n;
    std::mutex guard;
    auto body = [&](std::size_t i) {
        try {
            f(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (i < first_index) {
                first_index = i;
                first = std::current_exception();
            }
        }
    };
    if (exec == Exec::parallel) {
        const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) body(i);
    }
    if (first) std::rethrow_exception(first);
}

double norm2(const Point& v);
double lp_norm(const double* v, std::size_t n, double p);

}  // namespace bclab
