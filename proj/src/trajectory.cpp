#include "planeflow/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "planeflow/integrate.hpp"

namespace planeflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSwitchTimeTol = 1e-9;
} // namespace

double EntropyProfile::level(std::size_t n) const {
    if (levels.empty()) {
        throw std::invalid_argument("EntropyProfile: empty level sequence");
    }
    return n < levels.size() ? levels[n] : levels.back();
}

double EntropyProfile::value_at(double t) const {
    if (t <= t1) {
        return level(0);
    }
    const auto n = static_cast<std::size_t>(std::floor((t - t1) / kTwoPi)) + 1;
    return level(n);
}

void EntropyProfile::validate() const {
    if (levels.empty()) {
        throw std::invalid_argument("EntropyProfile: empty level sequence");
    }
    if (!(t1 >= 0.0) || !(t1 < kTwoPi)) {
        throw std::invalid_argument("EntropyProfile: t1 must lie in [0, 2pi)");
    }
    for (double c : levels) {
        if (!(c >= 1.0)) {
            throw std::invalid_argument(
                "EntropyProfile: levels below 1 do not reach the origin, switching is impossible");
        }
    }
}

std::string to_string(const EntropyProfile& profile) {
    std::string out = fmt::format("{};", profile.t1);
    for (std::size_t i = 0; i < profile.levels.size(); ++i) {
        out += fmt::format("{}{}", i == 0 ? " " : ", ", profile.levels[i]);
    }
    return out;
}

EntropyProfile parse_profile(std::string_view text) {
    const auto semi = text.find(';');
    if (semi == std::string_view::npos) {
        throw std::invalid_argument("profile: expected \"t1; c0, c1, ...\"");
    }
    EntropyProfile profile;
    try {
        profile.t1 = std::stod(std::string(text.substr(0, semi)));
    } catch (const std::exception&) {
        throw std::invalid_argument("profile: malformed t1");
    }
    std::string rest(text.substr(semi + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            profile.levels.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("profile: malformed level \"" + item + "\"");
        }
    }
    profile.validate();
    return profile;
}

CompositeTrajectory::CompositeTrajectory(OrbitParams initial, EntropyProfile profile)
    : initial_(initial), profile_(std::move(profile)) {}

double CompositeTrajectory::switch_time(std::size_t n) const {
    if (n == 0) {
        throw std::invalid_argument("switch_time: pieces are numbered from 1");
    }
    return profile_.t1 + kTwoPi * static_cast<double>(n - 1);
}

State CompositeTrajectory::eval(double t) const {
    if (t < 0.0) {
        throw std::invalid_argument("CompositeTrajectory::eval: t must be >= 0");
    }
    if (t <= profile_.t1) {
        return closed_form_state(t, initial_);
    }
    const auto n = static_cast<std::size_t>(std::floor((t - profile_.t1) / kTwoPi)) + 1;
    const double tn = switch_time(n);
    const double c = profile_.level(n);
    // Circle of level c phased to pass the origin at tn moving upward.
    const double s = t - tn;
    return {c * (1.0 - std::cos(s)), c * std::sin(s), t};
}

double first_arrival_time(const OrbitParams& p) {
    double t = p.theta0 + std::numbers::pi;
    t = std::fmod(t, kTwoPi);
    if (t <= 0.0) {
        t += kTwoPi;
    }
    return t;
}

CompositeTrajectory build_composite(double x0, double y0, const EntropyProfile& profile) {
    profile.validate();
    const OrbitParams params = orbit_params_from_initial(x0, y0);
    if (std::abs(params.c0 - profile.level(0)) > kSwitchTimeTol) {
        throw std::invalid_argument(fmt::format(
            "build_composite: level 0 ({}) does not match the initial entropy {}",
            profile.level(0), params.c0));
    }
    const double t1 = first_arrival_time(params);
    if (std::abs(t1 - profile.t1) > kSwitchTimeTol) {
        throw std::invalid_argument(fmt::format(
            "build_composite: profile t1 = {} but the orbit reaches the origin at {}",
            profile.t1, t1));
    }
    return {params, profile};
}

double acceleration_jump(double c_prev, double c_next) {
    return c_next - c_prev;
}

bool is_admissible_profile(const EntropyProfile& profile) {
    for (std::size_t i = 1; i < profile.levels.size(); ++i) {
        if (profile.levels[i] > profile.levels[i - 1]) {
            return false;
        }
    }
    return true;
}

SelectionResult entropy_rate_select(double c0, double t1) {
    if (!(c0 >= 1.0)) {
        throw std::invalid_argument("entropy_rate_select: requires c0 >= 1");
    }
    SelectionResult result;
    result.profile.t1 = t1;
    if (c0 == 1.0) {
        result.profile.levels = {1.0};
        result.envelope_slope = 0.0;
    } else {
        result.profile.levels = {c0, 1.0};
        result.envelope_slope = (1.0 - c0) / kTwoPi;
    }
    result.terminal_entropy = 1.0;
    return result;
}

double friction_limit_probe(double x0, double y0, double gamma, double T, double h) {
    if (!(gamma >= 0.0)) {
        throw std::invalid_argument("friction_limit_probe: gamma must be >= 0");
    }
    const IntegrationConfig config{h, T, Scheme::Symplectic, gamma};
    double xf = x0;
    double yf = y0;
    integrate_visit(x0, y0, config,
                    [&xf, &yf](const Sample& s) { xf = s.x; yf = s.y; });
    return entropy(xf, yf);
}

} // namespace planeflow
