#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "planeflow/dynamics.hpp"

namespace planeflow {

/// Piecewise-constant entropy profile e(t): level c0 on [0, t1], level c_n on
/// [t_n, t_n + 2pi) with t_n = t1 + 2(n-1)pi. The final level repeats forever.
struct EntropyProfile {
    double t1 = 0.0;            // first switch time, in [0, 2pi)
    std::vector<double> levels; // c0, c1, ...; each >= 1

    double level(std::size_t n) const;
    double value_at(double t) const;

    /// Throws std::invalid_argument if t1 or any level is out of range.
    void validate() const;
};

/// Plain-text form "t1; c0, c1, ...".
std::string to_string(const EntropyProfile& profile);
EntropyProfile parse_profile(std::string_view text);

/// Continuous trajectory realizing an entropy profile: the closed form
/// through the initial condition up to t1, then one full circle per level,
/// switched at the origin.
class CompositeTrajectory {
public:
    CompositeTrajectory(OrbitParams initial, EntropyProfile profile);

    State eval(double t) const;

    /// Origin passage time t_n = t1 + 2(n-1)pi for n >= 1.
    double switch_time(std::size_t n) const;

    const OrbitParams& initial_orbit() const { return initial_; }
    const EntropyProfile& profile() const { return profile_; }

private:
    OrbitParams initial_;
    EntropyProfile profile_;
};

/// Admissible one-switch selection and its diagnostics.
struct SelectionResult {
    EntropyProfile profile;
    double terminal_entropy = 1.0;
    double envelope_slope = 0.0; // slope of the piecewise-linear envelope
};

/// Smallest t > 0 at which the closed form reaches the origin:
/// theta0 + pi reduced into (0, 2pi].
double first_arrival_time(const OrbitParams& p);

/// Builds the composite for (x0, y0) and a profile. Rejects a level-0
/// mismatch with H(x0, y0), any level < 1, and a t1 that differs from
/// first_arrival_time by more than 1e-9.
CompositeTrajectory build_composite(double x0, double y0, const EntropyProfile& profile);

inline State eval_composite(const CompositeTrajectory& traj, double t) { return traj.eval(t); }

/// Jump in dy/dt (equivalently d2x/dt2) across an origin switch.
double acceleration_jump(double c_prev, double c_next);

/// True iff the level sequence is non-increasing.
bool is_admissible_profile(const EntropyProfile& profile);

/// The admissible profile of maximal negative slope: drop to level 1 at the
/// first origin passage and stay. t1 is recorded in the returned profile
/// (pass 0 when the switch phase is not of interest).
SelectionResult entropy_rate_select(double c0, double t1 = 0.0);

/// Integrates the friction system with the symplectic scheme and returns the
/// entropy of the final state.
double friction_limit_probe(double x0, double y0, double gamma, double T, double h);

} // namespace planeflow
