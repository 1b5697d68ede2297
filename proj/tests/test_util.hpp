#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace planeflow::testutil {

// Centered first difference in x / y of a scalar field f(x, y).
template <typename F>
double fd_x(F&& f, double x, double y, double step = 1e-5) {
    return (f(x + step, y) - f(x - step, y)) / (2.0 * step);
}

template <typename F>
double fd_y(F&& f, double x, double y, double step = 1e-5) {
    return (f(x, y + step) - f(x, y - step)) / (2.0 * step);
}

// Centered difference of a time-parametrized curve component.
template <typename F>
double fd_t(F&& f, double t, double step = 1e-6) {
    return (f(t + step) - f(t - step)) / (2.0 * step);
}

/// Uniform double in [0, 1) with an implementation-independent mapping.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace planeflow::testutil
