#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "planeflow/dynamics.hpp"
#include "planeflow/trajectory.hpp"

namespace planeflow {

enum class Scheme { Symplectic, Explicit };

struct IntegrationConfig {
    double h = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::Symplectic;
    double gamma = 0.0; // linear friction coefficient, 0 = conservative

    /// Throws std::invalid_argument unless h > 0, T >= 0, gamma >= 0.
    void validate() const;
};

struct Sample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double H = 0.0;   // entropy at (x, y); NaN exactly on the y-axis
    bool outer = true; // branch predicate evaluated on this (pre-step) state
};

struct TrajectoryLog {
    IntegrationConfig config;
    std::vector<Sample> samples; // uniform grid t_n = n h, includes the IC
};

namespace detail {

// The discrete flow crosses the x-axis at abscissae ~ h^2, which for small h
// descends far below the evaluator guard kSingularTol. The step formulas stay
// accurate there, so the integrator only refuses x where the division itself
// degenerates.
inline constexpr double kStepGuard = 1e-300;

inline double branch_rate(double x, double y, std::size_t step) {
    if (outer_branch(x, y)) {
        if (x > -kStepGuard && x < kStepGuard) {
            throw integration_error(
                "integration hit the outer-branch singular locus at step " +
                    std::to_string(step),
                step);
        }
        return (y * y - x * x) / (2.0 * x);
    }
    return 1.0 - x;
}

} // namespace detail

/// Streams every sample of a run (the initial condition first) to `visit`
/// without storing the log; the backbone of integrate() and of long probes.
template <typename Visitor>
void integrate_visit(double x0, double y0, const IntegrationConfig& config, Visitor&& visit) {
    config.validate();
    const auto steps = static_cast<std::size_t>(std::llround(config.T / config.h));

    double x = x0;
    double y = y0;
    visit(Sample{0.0, x, y, x == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                     : (x * x + y * y) / (2.0 * x),
                 outer_branch(x, y)});
    for (std::size_t n = 0; n < steps; ++n) {
        const double rate = detail::branch_rate(x, y, n);
        const double damped = rate - config.gamma * y;
        if (config.scheme == Scheme::Symplectic) {
            y += config.h * damped;
            x += config.h * y;
        } else {
            x += config.h * y;
            y += config.h * damped;
        }
        const double t = static_cast<double>(n + 1) * config.h;
        visit(Sample{t, x, y,
                     x == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                              : (x * x + y * y) / (2.0 * x),
                     outer_branch(x, y)});
    }
}

/// One step of the semi-implicit scheme: the y-update uses the pre-step
/// state, the x-update uses the already-updated y.
State symplectic_step(const State& s, double h, double gamma = 0.0);

/// One step of the explicit scheme: both updates use the pre-step state.
State explicit_step(const State& s, double h, double gamma = 0.0);

/// Integrates the two-branch system from (x0, y0) over [0, T]. Deterministic;
/// throws integration_error (with the step index) if a step lands on the
/// outer-branch singular locus.
TrajectoryLog integrate(double x0, double y0, const IntegrationConfig& config);

struct DriftReport {
    double max_drift = 0.0;      // max |H - e_ref| outside origin windows
    double window_radius = 0.0;  // samples with sqrt(x^2+y^2) below are skipped
    std::vector<double> per_lap_entropy; // H once per lap, mid-arc
    std::vector<double> crossing_abscissae;
};

/// Exclusion radius around the origin where H is numerically meaningless:
/// a positional deviation eps maps to an entropy deviation ~ eps / r there.
double default_drift_window(double h);

/// Max |H(x_n, y_n) - e_ref(t_n)| outside origin windows, plus per-lap
/// entropies and the origin-crossing abscissae. window_radius <= 0 selects
/// default_drift_window(h).
DriftReport entropy_drift(const TrajectoryLog& log, const EntropyProfile& reference,
                          double window_radius = -1.0);

/// Interpolated positive-x abscissae where y changes sign with x < 0.1.
std::vector<double> detect_origin_crossings(const TrajectoryLog& log);

/// CSV with header t,x,y,H,branch; values printed in shortest round-trip
/// form, branch is 1 (outer) / 0 (inner).
void write_csv(const TrajectoryLog& log, std::ostream& os);

} // namespace planeflow
