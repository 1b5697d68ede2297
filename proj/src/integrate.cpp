#include "planeflow/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace planeflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

void IntegrationConfig::validate() const {
    if (!(h > 0.0)) {
        throw std::invalid_argument("IntegrationConfig: h must be positive");
    }
    if (!(T >= 0.0)) {
        throw std::invalid_argument("IntegrationConfig: T must be non-negative");
    }
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("IntegrationConfig: gamma must be non-negative");
    }
}

State symplectic_step(const State& s, double h, double gamma) {
    const double rate = detail::branch_rate(s.x, s.y, 0);
    const double y_next = s.y + h * (rate - gamma * s.y);
    return {s.x + h * y_next, y_next, s.t + h};
}

State explicit_step(const State& s, double h, double gamma) {
    const double rate = detail::branch_rate(s.x, s.y, 0);
    return {s.x + h * s.y, s.y + h * (rate - gamma * s.y), s.t + h};
}

TrajectoryLog integrate(double x0, double y0, const IntegrationConfig& config) {
    config.validate();
    TrajectoryLog log;
    log.config = config;
    log.samples.reserve(static_cast<std::size_t>(std::llround(config.T / config.h)) + 1);
    integrate_visit(x0, y0, config, [&log](const Sample& s) { log.samples.push_back(s); });
    return log;
}

double default_drift_window(double h) {
    return std::max(10.0 * h, 0.35);
}

DriftReport entropy_drift(const TrajectoryLog& log, const EntropyProfile& reference,
                          double window_radius) {
    if (log.samples.empty()) {
        throw std::invalid_argument("entropy_drift: empty log");
    }
    DriftReport report;
    report.window_radius =
        window_radius > 0.0 ? window_radius : default_drift_window(log.config.h);

    // Per lap, record H at the sample farthest from the origin: that is the
    // best-conditioned point of the lap.
    std::size_t lap = 0;
    double lap_best_r = -1.0;
    double lap_best_H = 0.0;

    for (const Sample& s : log.samples) {
        const double r = std::hypot(s.x, s.y);
        const auto this_lap = static_cast<std::size_t>(std::floor(s.t / kTwoPi));
        if (this_lap != lap) {
            if (lap_best_r >= 0.0) {
                report.per_lap_entropy.push_back(lap_best_H);
            }
            lap = this_lap;
            lap_best_r = -1.0;
        }
        if (r > lap_best_r) {
            lap_best_r = r;
            lap_best_H = s.H;
        }
        if (r < report.window_radius || std::isnan(s.H)) {
            continue;
        }
        report.max_drift = std::max(report.max_drift, std::abs(s.H - reference.value_at(s.t)));
    }
    if (lap_best_r >= 0.0) {
        report.per_lap_entropy.push_back(lap_best_H);
    }
    report.crossing_abscissae = detect_origin_crossings(log);
    return report;
}

std::vector<double> detect_origin_crossings(const TrajectoryLog& log) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < log.samples.size(); ++i) {
        const Sample& a = log.samples[i];
        const Sample& b = log.samples[i + 1];
        const bool sign_change = (a.y < 0.0 && b.y >= 0.0) || (a.y > 0.0 && b.y <= 0.0);
        if (!sign_change || !(a.x < 0.1)) {
            continue;
        }
        const double s = -a.y / (b.y - a.y);
        crossings.push_back(a.x + s * (b.x - a.x));
    }
    return crossings;
}

void write_csv(const TrajectoryLog& log, std::ostream& os) {
    os << "t,x,y,H,branch\n";
    for (const Sample& s : log.samples) {
        os << fmt::format("{},{},{},{},{}\n", s.t, s.x, s.y, s.H, s.outer ? 1 : 0);
    }
}

} // namespace planeflow
