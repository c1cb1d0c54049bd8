#include "bclab/core.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bclab {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(mix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

double normal01(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double log_uniform(Rng& rng, double lo, double hi) {
    return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double norm2(const Point& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

double lp_norm(const double* v, std::size_t n, double p) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
    if (m == 0.0) return 0.0;
    if (p == 2.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = v[i] / m;
            s += r * r;
        }
        return m * std::sqrt(s);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(v[i]) / m, p);
    return m * std::pow(s, 1.0 / p);
}

}  // namespace bclab
