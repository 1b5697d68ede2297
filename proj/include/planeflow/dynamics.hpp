#pragma once

#include <functional>

#include "planeflow/errors.hpp"

namespace planeflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Plane state (x, y) at time t.
struct State {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

/// One circular orbit of the family: entropy level c0 (= radius, centre at
/// (c0, 0)) and phase angle theta0 in (-pi, pi].
struct OrbitParams {
    double c0 = 1.0;
    double theta0 = 0.0;
};

struct PolarState {
    double r = 0.0;
    double theta = 0.0;
};

struct PolarDeriv {
    double dtheta = 0.0;
    double dr = 0.0;
};

/// Evaluators with |x| below this tolerance refuse to divide and raise
/// singularity_error instead; callers near the origin must use the closed
/// forms or event logic.
inline constexpr double kSingularTol = 1e-12;

/// Scalar control w(x, y) scaling the conservative vector field
/// (2xy, y^2 - x^2).
struct ControlChoice {
    enum class Kind { Oscillator, Hamiltonian, Power, Custom };

    Kind kind = Kind::Oscillator;
    double alpha = 1.0; // exponent for Kind::Power, requires alpha > 0
    std::function<double(double, double)> custom;

    /// Evaluate w at (x, y). Throws singularity_error where the chosen
    /// control is singular (x = 0 for the built-in kinds).
    double weight(double x, double y) const;

    static ControlChoice oscillator();               // w = 1/(2x)
    static ControlChoice hamiltonian();            // w = 1/(2x^2)
    static ControlChoice power(double alpha);      // w = x^(-alpha)
    static ControlChoice custom_fn(std::function<double(double, double)> fn);
};

/// Entropy H(x, y) = (x^2 + y^2) / (2x); constant along every orbit.
double entropy(double x, double y);

/// Outer-branch predicate (x-1)^2 + y^2 >= 1. The boundary circle belongs
/// to the outer branch.
bool outer_branch(double x, double y);

/// Oscillator right-hand side (y, (y^2 - x^2)/(2x)).
Vec2 rhs_oscillator(const State& s);

/// Two-branch system: outer branch is rhs_oscillator, inner branch
/// ((x-1)^2 + y^2 < 1) is the linear field (y, 1 - x).
Vec2 rhs_modified(const State& s);

/// Controlled family (2xy w, (y^2 - x^2) w) for a scalar control value w.
Vec2 rhs_control(const State& s, double w_value);

/// Two-branch system with linear friction: (y, g(x, y) - gamma y).
Vec2 rhs_friction(const State& s, double gamma);

/// Orbit through (x0, y0): c0 = H(x0, y0), theta0 = atan2(y0, x0 - c0).
OrbitParams orbit_params_from_initial(double x0, double y0);

/// Closed-form solution x = c0 + c0 cos(-t + theta0), y = c0 sin(-t + theta0).
State closed_form_state(double t, const OrbitParams& p);

/// Polar form of the oscillator: (dtheta, dr) = (-1/2, r tan(theta) / 2).
PolarDeriv polar_rhs(const PolarState& ps);

/// Kinetic energy density (rho/2)(dx^2 + dy^2) with velocities from
/// rhs_control; equals 2 x^2 w^2 rho H^2 identically.
double energy_eta(const State& s, double w_value, double rho_value);

} // namespace planeflow
