#include "planeflow/dynamics.hpp"

#include <cmath>

namespace planeflow {

namespace {

void require_off_axis(double x, const char* where) {
    if (std::abs(x) < kSingularTol) {
        throw singularity_error(std::string(where) + ": singular at x = 0");
    }
}

} // namespace

double ControlChoice::weight(double x, double y) const {
    switch (kind) {
    case Kind::Oscillator:
        require_off_axis(x, "ControlChoice::weight");
        return 1.0 / (2.0 * x);
    case Kind::Hamiltonian:
        require_off_axis(x, "ControlChoice::weight");
        return 1.0 / (2.0 * x * x);
    case Kind::Power:
        require_off_axis(x, "ControlChoice::weight");
        return std::pow(x, -alpha);
    case Kind::Custom:
        return custom(x, y);
    }
    return 0.0; // unreachable
}

ControlChoice ControlChoice::oscillator() { return {Kind::Oscillator, 1.0, {}}; }

ControlChoice ControlChoice::hamiltonian() { return {Kind::Hamiltonian, 1.0, {}}; }

ControlChoice ControlChoice::power(double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("ControlChoice::power: alpha must be positive");
    }
    return {Kind::Power, alpha, {}};
}

ControlChoice ControlChoice::custom_fn(std::function<double(double, double)> fn) {
    ControlChoice c;
    c.kind = Kind::Custom;
    c.custom = std::move(fn);
    return c;
}

double entropy(double x, double y) {
    require_off_axis(x, "entropy");
    return (x * x + y * y) / (2.0 * x);
}

bool outer_branch(double x, double y) {
    return (x - 1.0) * (x - 1.0) + y * y >= 1.0;
}

Vec2 rhs_oscillator(const State& s) {
    require_off_axis(s.x, "rhs_oscillator");
    return {s.y, (s.y * s.y - s.x * s.x) / (2.0 * s.x)};
}

Vec2 rhs_modified(const State& s) {
    if (outer_branch(s.x, s.y)) {
        return rhs_oscillator(s);
    }
    return {s.y, 1.0 - s.x};
}

Vec2 rhs_control(const State& s, double w_value) {
    return {2.0 * s.x * s.y * w_value, (s.y * s.y - s.x * s.x) * w_value};
}

Vec2 rhs_friction(const State& s, double gamma) {
    Vec2 g = rhs_modified(s);
    return {g.x, g.y - gamma * s.y};
}

OrbitParams orbit_params_from_initial(double x0, double y0) {
    if (!(x0 > 0.0)) {
        throw singularity_error("orbit_params_from_initial: requires x0 > 0");
    }
    const double c0 = entropy(x0, y0);
    // Two-argument arctangent of the centre offset resolves the quadrant
    // the tangent form leaves open.
    const double theta0 = std::atan2(y0, x0 - c0);
    return {c0, theta0};
}

State closed_form_state(double t, const OrbitParams& p) {
    const double phase = -t + p.theta0;
    return {p.c0 + p.c0 * std::cos(phase), p.c0 * std::sin(phase), t};
}

PolarDeriv polar_rhs(const PolarState& ps) {
    if (std::abs(std::cos(ps.theta)) < kSingularTol) {
        throw singularity_error("polar_rhs: singular at theta = +-pi/2");
    }
    return {-0.5, 0.5 * ps.r * std::tan(ps.theta)};
}

double energy_eta(const State& s, double w_value, double rho_value) {
    const Vec2 v = rhs_control(s, w_value);
    return 0.5 * rho_value * (v.x * v.x + v.y * v.y);
}

} // namespace planeflow
