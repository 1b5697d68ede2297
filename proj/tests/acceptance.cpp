// Acceptance suite: runs every stated criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "planeflow/expression.hpp"
#include "planeflow/fields.hpp"
#include "planeflow/generator.hpp"
#include "planeflow/integrate.hpp"

using namespace planeflow;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIcX = 0.5;
constexpr double kIcY = 1.125;

struct Criterion {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += detail.empty() ? what : "; " + what;
        }
    }

    void note(const std::string& what) {
        detail += detail.empty() ? what : "; " + what;
    }
};

// --------------------------------------------------------------------------
// 1. Entropy preservation of the semi-implicit scheme.
// --------------------------------------------------------------------------
Criterion criterion_entropy_preservation() {
    Criterion c;
    const OrbitParams p = orbit_params_from_initial(kIcX, kIcY);
    const double t1 = first_arrival_time(p);
    const TrajectoryLog log = integrate(kIcX, kIcY, {1e-4, 8.0 * kPi});
    const DriftReport report = entropy_drift(log, {t1, {p.c0, 1.0}});
    c.require(report.max_drift < 1e-3,
              fmt::format("drift {} >= 1e-3", report.max_drift));
    const double HT = log.samples.back().H;
    c.require(HT > 0.999 && HT < 1.001, fmt::format("terminal entropy {}", HT));
    c.note(fmt::format("drift {:.3e}, terminal H {:.6f}", report.max_drift, HT));
    return c;
}

// --------------------------------------------------------------------------
// 2. Every initial condition settles on the unit circle.
// --------------------------------------------------------------------------
Criterion criterion_unique_selection() {
    Criterion c;
    const std::vector<std::pair<double, double>> ics = {
        {0.5, 1.125}, {3.0, 0.0}, {1.0, 2.0}, {2.5, 1.0}};
    for (const auto& [x0, y0] : ics) {
        const TrajectoryLog log = integrate(x0, y0, {1e-4, 8.0 * kPi});
        double worst = 0.0;
        for (const Sample& s : log.samples) {
            if (s.t < 6.0 * kPi) {
                continue; // final period only
            }
            worst = std::max(worst,
                             std::abs((s.x - 1.0) * (s.x - 1.0) + s.y * s.y - 1.0));
        }
        c.require(worst < 1e-2,
                  fmt::format("ic ({}, {}): unit-circle deviation {}", x0, y0, worst));
    }
    if (c.pass) {
        c.note("all four initial conditions inside 1e-2 of the unit circle");
    }
    return c;
}

// --------------------------------------------------------------------------
// 3. First crossing abscissa scales like the square of the step.
// --------------------------------------------------------------------------
Criterion criterion_crossing_law() {
    Criterion c;
    std::vector<double> first;
    for (double h : {1e-3, 5e-4, 2.5e-4}) {
        const TrajectoryLog log = integrate(kIcX, kIcY, {h, 2.0 * kPi});
        const std::vector<double> crossings = detect_origin_crossings(log);
        c.require(!crossings.empty(), fmt::format("h = {}: no crossing detected", h));
        if (crossings.empty()) {
            return c;
        }
        c.require(crossings.front() > 0.0,
                  fmt::format("h = {}: crossing {} not positive", h, crossings.front()));
        first.push_back(crossings.front());
    }
    for (std::size_t i = 0; i + 1 < first.size(); ++i) {
        const double ratio = first[i] / first[i + 1];
        c.require(ratio > 2.0 && ratio < 8.0, fmt::format("ratio {} outside [2, 8]", ratio));
    }
    c.note(fmt::format("crossings {:.3e} / {:.3e} / {:.3e}", first[0], first[1], first[2]));
    return c;
}

// --------------------------------------------------------------------------
// 4. The explicit scheme fails to preserve entropy: H(T) > H(0) at T = 4 pi.
// --------------------------------------------------------------------------
Criterion criterion_explicit_failure() {
    Criterion c;
    for (double h : {1e-4, 1e-5}) {
        const TrajectoryLog log = integrate(kIcX, kIcY, {h, 4.0 * kPi, Scheme::Explicit});
        const double H0 = log.samples.front().H;
        const double HT = log.samples.back().H;
        c.require(HT > H0, fmt::format("h = {}: H(T) = {:.4g} is not above H(0) = {:.6g}",
                                       h, HT, H0));
        // The scheme does exhibit the expected growth earlier in the run: it
        // kicks to a larger circle at the first passage before the second
        // passage ejects it across the axis.
        double peak = 0.0;
        for (const Sample& s : log.samples) {
            if (s.x > 0.0 && std::isfinite(s.H)) {
                peak = std::max(peak, s.H);
            }
        }
        c.note(fmt::format("h = {}: peak entropy {:.4g} (initial {:.6g})", h, peak, H0));
    }
    return c;
}

// --------------------------------------------------------------------------
// 5. Analytic residual suite with finite-difference cross-checks.
// --------------------------------------------------------------------------
Criterion criterion_analytic_residuals(const ResidualReport& report) {
    Criterion c;
    for (const char* name : {"continuity", "momentum_x", "momentum_y", "boundary_flux",
                             "rh_pressure", "rh_mass_flux", "pressure_orbit_spread",
                             "trace_identity"}) {
        const double v = report.residuals.at(name);
        c.require(v < 1e-12, fmt::format("{} = {}", name, v));
    }
    for (const char* name : {"continuity_fd", "momentum_fd"}) {
        const double v = report.residuals.at(name);
        c.require(v < 1e-6, fmt::format("{} = {}", name, v));
    }
    c.note(fmt::format("analytic max {:.2e}, FD max {:.2e}",
                       std::max({report.residuals.at("continuity"),
                                 report.residuals.at("momentum_x"),
                                 report.residuals.at("momentum_y"),
                                 report.residuals.at("boundary_flux"),
                                 report.residuals.at("rh_pressure"),
                                 report.residuals.at("rh_mass_flux")}),
                       std::max(report.residuals.at("continuity_fd"),
                                report.residuals.at("momentum_fd"))));
    return c;
}

// --------------------------------------------------------------------------
// 6. Viscous-stress verification for both family parameters.
// --------------------------------------------------------------------------
Criterion criterion_ns_verification(const ResidualReport& k0, const ResidualReport& k2) {
    Criterion c;
    for (const ResidualReport* report : {&k0, &k2}) {
        c.require(report->residuals.at("ns_momentum") < 1e-6,
                  fmt::format("k = {}: ns_momentum = {}", report->k,
                              report->residuals.at("ns_momentum")));
        c.require(report->residuals.at("two_path_stress") < 1e-10,
                  fmt::format("k = {}: two_path_stress = {}", report->k,
                              report->residuals.at("two_path_stress")));
        c.require(report->residuals.at("viscosity_negativity") == 0.0,
                  fmt::format("k = {}: negative shear viscosity found", report->k));
    }
    c.note(fmt::format("ns momentum {:.2e} (k=0) / {:.2e} (k=2)",
                       k0.residuals.at("ns_momentum"), k2.residuals.at("ns_momentum")));
    return c;
}

// --------------------------------------------------------------------------
// 7. Stress-potential machinery.
// --------------------------------------------------------------------------
Criterion criterion_airy(const ResidualReport& k0, const ResidualReport& k2) {
    Criterion c;
    for (const ResidualReport* report : {&k0, &k2}) {
        c.require(report->residuals.at("airy_equilibrium") < 1e-5,
                  fmt::format("k = {}: airy_equilibrium = {}", report->k,
                              report->residuals.at("airy_equilibrium")));
        c.require(report->residuals.at("airy_pde") < 1e-6,
                  fmt::format("k = {}: airy_pde = {}", report->k,
                              report->residuals.at("airy_pde")));
        c.require(report->residuals.at("fundamental_relation") < 1e-10,
                  fmt::format("k = {}: fundamental_relation = {}", report->k,
                              report->residuals.at("fundamental_relation")));
    }
    c.note(fmt::format("equilibrium {:.2e}, potential equation {:.2e}",
                       std::max(k0.residuals.at("airy_equilibrium"),
                                k2.residuals.at("airy_equilibrium")),
                       std::max(k0.residuals.at("airy_pde"), k2.residuals.at("airy_pde"))));
    return c;
}

// --------------------------------------------------------------------------
// 8. Non-uniqueness witness: two admissible continuations of one state.
// --------------------------------------------------------------------------
Criterion criterion_non_uniqueness() {
    Criterion c;
    const OrbitParams p = orbit_params_from_initial(kIcX, kIcY);
    const double t1 = first_arrival_time(p);
    const CompositeTrajectory a = build_composite(kIcX, kIcY, {t1, {p.c0, 1.5, 1.0}});
    const CompositeTrajectory b = build_composite(kIcX, kIcY, {t1, {p.c0, 1.0, 1.0}});

    double shared_gap = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double t = t1 * i / 500.0;
        const State sa = a.eval(t);
        const State sb = b.eval(t);
        shared_gap = std::max(shared_gap, std::hypot(sa.x - sb.x, sa.y - sb.y));
    }
    c.require(shared_gap < 1e-12, fmt::format("pre-switch gap {}", shared_gap));

    const State sa = a.eval(t1 + kPi);
    const State sb = b.eval(t1 + kPi);
    const double separation = std::hypot(sa.x - sb.x, sa.y - sb.y);
    c.require(separation > 0.5, fmt::format("separation {} <= 0.5", separation));

    // Both satisfy the oscillator equations away from the switch windows.
    const double fd_step = 1e-6;
    double worst_residual = 0.0;
    std::mt19937_64 rng(41);
    for (const CompositeTrajectory* traj : {&a, &b}) {
        int checked = 0;
        while (checked < 300) {
            const double t =
                (static_cast<double>(rng() >> 11) * 0x1.0p-53) * (t1 + 3.0 * 2.0 * kPi);
            bool near_switch = t < 10.0 * fd_step;
            for (std::size_t n = 1; n <= 4; ++n) {
                near_switch =
                    near_switch || std::abs(t - traj->switch_time(n)) < 10.0 * fd_step;
            }
            if (near_switch) {
                continue;
            }
            const State mid = traj->eval(t);
            const State fwd = traj->eval(t + fd_step);
            const State bwd = traj->eval(t - fd_step);
            const Vec2 rhs = rhs_oscillator(mid);
            worst_residual = std::max(
                worst_residual,
                std::abs((fwd.x - bwd.x) / (2.0 * fd_step) - rhs.x));
            worst_residual = std::max(
                worst_residual,
                std::abs((fwd.y - bwd.y) / (2.0 * fd_step) - rhs.y));
            ++checked;
        }
    }
    c.require(worst_residual < 1e-8, fmt::format("worst residual {}", worst_residual));

    double worst_gap = 0.0;
    for (const CompositeTrajectory* traj : {&a, &b}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            const double tn = traj->switch_time(n);
            const State left = traj->eval(std::nextafter(tn, 0.0));
            const State at = traj->eval(tn);
            worst_gap = std::max(worst_gap, std::hypot(left.x - at.x, left.y - at.y));
        }
    }
    c.require(worst_gap < 1e-12, fmt::format("switch gap {}", worst_gap));
    c.note(fmt::format("separation {:.3f}, residual {:.2e}, switch gap {:.2e}", separation,
                       worst_residual, worst_gap));
    return c;
}

// --------------------------------------------------------------------------
// 9. Friction probes: dissipation law and the vanishing-friction trend.
// --------------------------------------------------------------------------
Criterion criterion_friction() {
    Criterion c;
    const OrbitParams p = orbit_params_from_initial(kIcX, kIcY);
    const double T = first_arrival_time(p) + 25.0 * kPi;
    const double h = 5e-7;
    const double window = default_drift_window(h);

    double previous_gap = 1e99;
    for (double gamma : {0.1, 0.03, 0.01}) {
        double max_increase = -1e99;
        Sample prev{};
        bool have_prev = false;
        double HT = 0.0;
        integrate_visit(kIcX, kIcY, {h, T, Scheme::Symplectic, gamma},
                        [&](const Sample& s) {
                            if (have_prev && prev.outer && s.outer &&
                                std::hypot(prev.x, prev.y) > window &&
                                std::hypot(s.x, s.y) > window) {
                                max_increase = std::max(max_increase, s.H - prev.H);
                            }
                            prev = s;
                            have_prev = true;
                            HT = s.H;
                        });
        c.require(max_increase <= 1e-6 * h,
                  fmt::format("gamma = {}: entropy increase {:.3e} exceeds {:.1e}", gamma,
                              max_increase, 1e-6 * h));
        const double gap = std::abs(HT - 1.0);
        c.require(gap < previous_gap,
                  fmt::format("gamma = {}: |H_T - 1| = {} did not decrease", gamma, gap));
        c.note(fmt::format("gamma {}: |H_T-1| = {:.4f}, max step increase {:.1e}", gamma,
                           gap, max_increase));
        previous_gap = gap;
    }
    return c;
}

// --------------------------------------------------------------------------
// 10. First-order convergence before the switch.
// --------------------------------------------------------------------------
Criterion criterion_convergence_order() {
    Criterion c;
    const OrbitParams p = orbit_params_from_initial(kIcX, kIcY);
    const double t_end = first_arrival_time(p) - 0.05;
    std::vector<double> deviations;
    for (double h : {2e-4, 1e-4, 5e-5}) {
        const TrajectoryLog log = integrate(kIcX, kIcY, {h, t_end});
        double dev = 0.0;
        for (const Sample& s : log.samples) {
            const State exact = closed_form_state(s.t, p);
            dev = std::max(dev, std::hypot(s.x - exact.x, s.y - exact.y));
        }
        deviations.push_back(dev);
    }
    for (std::size_t i = 0; i + 1 < deviations.size(); ++i) {
        const double ratio = deviations[i] / deviations[i + 1];
        c.require(ratio > 1.6 && ratio < 2.6,
                  fmt::format("ratio {} outside [1.6, 2.6]", ratio));
        c.note(fmt::format("ratio {:.3f}", ratio));
    }
    return c;
}

// --------------------------------------------------------------------------
// 11. Conserved-quantity generator suite.
// --------------------------------------------------------------------------
Criterion criterion_generator() {
    Criterion c;
    std::mt19937_64 rng(77);
    const auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };

    auto specs = builtin_catalog();
    specs.emplace_back("polynomial", GeneratorSpec::make("x^2*y+y^3", "1+x^2"));
    for (const auto& [name, spec] : specs) {
        double cons = 0.0;
        double cont = 0.0;
        int used = 0;
        while (used < 200) {
            const double x = uniform(0.1, 3.0);
            const double y = uniform(-2.0, 2.0);
            double wv;
            try {
                wv = spec.w.eval(x, y);
            } catch (const eval_error&) {
                continue;
            }
            if (!std::isfinite(wv) || std::abs(wv) < 0.05) {
                continue;
            }
            // The dot product cancels exactly in algebra; keep the operand
            // magnitudes small enough that rounding stays below the bound.
            const Vec2 vel = velocity_from_generator(spec, x, y);
            const double scale = std::abs(spec.Gx.eval(x, y) * vel.x) +
                                 std::abs(spec.Gy.eval(x, y) * vel.y);
            if (scale > 1e3) {
                continue;
            }
            cons = std::max(cons, std::abs(conservation_residual(spec, x, y)));
            cont = std::max(cont, std::abs(continuity_residual_generic(spec, x, y)));
            ++used;
        }
        c.require(cons < 1e-12, fmt::format("{}: conservation {}", name, cons));
        c.require(cont < 1e-10, fmt::format("{}: continuity {}", name, cont));
    }

    // Semi-inverse pressure for the canonical pair differs from the exact
    // pressure by a constant.
    const GeneratorSpec canonical = GeneratorSpec::make("(x^2+y^2)/(2*x)", "x");
    std::vector<Vec2> path;
    for (int i = 0; i <= 50; ++i) {
        path.push_back({1.0 + 0.02 * i, 1.0});
    }
    for (int i = 1; i <= 50; ++i) {
        path.push_back({2.0, 1.0 + 0.02 * i});
    }
    const std::vector<double> recovered = pressure_semi_inverse(canonical, path);
    std::vector<double> offsets;
    double mean = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        offsets.push_back(recovered[i] - (entropy(path[i].x, path[i].y) - 1.0));
        mean += offsets.back();
    }
    mean /= static_cast<double>(offsets.size());
    double variance = 0.0;
    for (double o : offsets) {
        variance += (o - mean) * (o - mean);
    }
    const double std_dev = std::sqrt(variance / static_cast<double>(offsets.size()));
    c.require(std_dev < 1e-6, fmt::format("pressure offset std {}", std_dev));

    // Integrable density for the sub-unit power weight: the integral is
    // stable under mesh refinement.
    const GeneratorSpec half = GeneratorSpec::make("(x^2+y^2)/(2*x)", "x^0.5");
    const auto integral = [&half](int cells) {
        const double R = 2.0;
        const double dx = 2.0 * R / cells;
        double total = 0.0;
        for (int i = 0; i < cells; ++i) {
            const double x = (i + 0.5) * dx;
            for (int j = 0; j < cells; ++j) {
                const double y = -R + (j + 0.5) * dx;
                if (region_of(x, y, R) == Region::Outside) {
                    continue;
                }
                total += density_from_generator(half, x, y) * dx * dx;
            }
        }
        return total;
    };
    const double coarse = integral(400);
    const double medium = integral(800);
    const double fine = integral(1600);
    c.require(std::isfinite(fine), "density integral is not finite");
    c.require(std::abs(medium - coarse) / std::abs(medium) < 0.01,
              fmt::format("integral moved {} on first refinement",
                          std::abs(medium - coarse) / std::abs(medium)));
    c.require(std::abs(fine - medium) / std::abs(fine) < 0.01,
              fmt::format("integral moved {} on second refinement",
                          std::abs(fine - medium) / std::abs(fine)));
    c.note(fmt::format("pressure std {:.2e}, density integral {:.6f}", std_dev, fine));
    return c;
}

// --------------------------------------------------------------------------
// 12. Expression parser and symbolic derivatives.
// --------------------------------------------------------------------------
Criterion criterion_parser() {
    Criterion c;
    std::mt19937_64 rng(4242);
    const auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };

    // Seeded expression pool: random rational/trig compositions.
    std::function<Expr(int)> build = [&](int depth) -> Expr {
        if (depth == 0) {
            switch (rng() % 3) {
            case 0:
                return Expr::variable(Var::X);
            case 1:
                return Expr::variable(Var::Y);
            default:
                return Expr::number(uniform(0.5, 2.5));
            }
        }
        switch (rng() % 7) {
        case 0:
            return build(depth - 1) + build(depth - 1);
        case 1:
            return build(depth - 1) - build(depth - 1);
        case 2:
            return build(depth - 1) * build(depth - 1);
        case 3:
            return build(depth - 1) /
                   (parse_expression("x^2+y^2") + Expr::number(uniform(0.5, 2.0)));
        case 4:
            return -build(depth - 1);
        case 5:
            return pow(parse_expression("x^2+y^2") + Expr::number(uniform(0.5, 1.5)),
                       Expr::number(rng() % 2 == 0 ? 2.0 : -1.0));
        default:
            return parse_expression("log(x^2+y^2+1)") * build(depth - 1);
        }
    };

    int round_trips = 0;
    int derivative_checks = 0;
    for (int i = 0; i < 50; ++i) {
        const Expr e = build(3);
        const Expr back = parse_expression(e.str());
        const Expr dx = differentiate(e, Var::X);
        for (int j = 0; j < 6; ++j) {
            const double x = uniform(0.6, 1.8);
            const double y = uniform(0.6, 1.8);
            double v, vb;
            try {
                v = e.eval(x, y);
                vb = back.eval(x, y);
            } catch (const eval_error&) {
                continue;
            }
            if (!std::isfinite(v)) {
                continue;
            }
            c.require(std::abs(v - vb) < 1e-12 * std::max(1.0, std::abs(v)),
                      fmt::format("round trip mismatch for '{}'", e.str()));
            ++round_trips;

            double sym, fd;
            try {
                sym = dx.eval(x, y);
                const double step = 1e-5;
                fd = (e.eval(x + step, y) - e.eval(x - step, y)) / (2.0 * step);
            } catch (const eval_error&) {
                continue;
            }
            if (!std::isfinite(sym) || !std::isfinite(fd) || std::abs(sym) > 1e3) {
                continue;
            }
            c.require(std::abs(sym - fd) < 1e-6 * std::max(1.0, std::abs(sym)),
                      fmt::format("derivative mismatch for '{}'", e.str()));
            ++derivative_checks;
        }
    }
    c.require(round_trips >= 200, fmt::format("only {} round-trip points", round_trips));
    c.require(derivative_checks >= 150,
              fmt::format("only {} derivative points", derivative_checks));

    // Hand-written error positions.
    const std::vector<std::pair<const char*, std::size_t>> cases = {
        {"2*x*y - sin(", 12}, {"(x", 1}, {"x +", 4}, {"foo(x)", 1}, {"sin x", 5},
        {"x + (y*) ", 8},     {"x $ y", 3}};
    for (const auto& [text, column] : cases) {
        std::size_t got = 0;
        try {
            parse_expression(text);
        } catch (const parse_error& err) {
            got = err.column();
        }
        c.require(got == column,
                  fmt::format("'{}': reported column {} instead of {}", text, got, column));
    }
    c.note(fmt::format("{} round-trip and {} derivative point checks", round_trips,
                       derivative_checks));
    return c;
}

} // namespace

int main() {
    const DomainSpec domain{2.0, 0.05, 1};
    const ResidualReport report_k0 = verify_fields(domain, 0.0, 1000);
    const ResidualReport report_k2 = verify_fields(domain, 2.0, 1000);

    const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
        {"entropy preservation of the semi-implicit scheme",
         criterion_entropy_preservation},
        {"unique selection by the discretization", criterion_unique_selection},
        {"quadratic crossing law near the origin", criterion_crossing_law},
        {"explicit scheme fails with increased entropy", criterion_explicit_failure},
        {"analytic residual suite",
         [&] { return criterion_analytic_residuals(report_k0); }},
        {"viscous stress verification",
         [&] { return criterion_ns_verification(report_k0, report_k2); }},
        {"stress potential machinery", [&] { return criterion_airy(report_k0, report_k2); }},
        {"non-uniqueness witness", criterion_non_uniqueness},
        {"friction probes", criterion_friction},
        {"first-order convergence", criterion_convergence_order},
        {"conserved-quantity generator suite", criterion_generator},
        {"expression parser and derivatives", criterion_parser},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Criterion result;
        try {
            result = criteria[i].second();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = fmt::format("exception: {}", e.what());
        }
        if (!result.pass) {
            ++failures;
        }
        fmt::print("[{}] criterion {:2}: {} ({})\n", result.pass ? "PASS" : "FAIL", i + 1,
                   criteria[i].first, result.detail);
        std::fflush(stdout);
    }
    if (failures > 0) {
        fmt::print("{} of {} criteria failed\n", failures, criteria.size());
        return 1;
    }
    fmt::print("all {} criteria passed\n", criteria.size());
    return 0;
}
