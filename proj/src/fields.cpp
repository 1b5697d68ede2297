#include "planeflow/fields.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace planeflow {

namespace {

constexpr double kFirstDerivStep = 1e-5;  // centered first differences
constexpr double kSecondDerivStep = 1e-4; // centered second differences

// Derivatives of the fields grow like inverse powers of the distance to the
// singular axis; scaling the step with that distance keeps the truncation
// error of the difference quotients under the stated tolerances.
double scaled_step(double base, double distance) {
    return base * std::min(1.0, distance);
}

void require_positive_x(double x, const char* where) {
    if (!(x > 0.0) || std::abs(x) < kSingularTol) {
        throw singularity_error(std::string(where) + ": requires x > 0");
    }
}

double theta_cot_theta(double theta) {
    if (std::abs(theta) < 1e-4) {
        const double t2 = theta * theta;
        return 1.0 - t2 / 3.0 - t2 * t2 / 45.0;
    }
    return theta / std::tan(theta);
}

struct TotalStressClosed {
    double s11, s12, s22;
};

// Total stress -p I + viscous part, with the viscous part in closed form.
TotalStressClosed total_stress_closed(double x, double y, double k) {
    const ViscousStress s = closed_form_stress(x, y, k);
    const double p = entropy(x, y) - 1.0;
    return {s.s11 - p, s.s12, s.s22 - p};
}

} // namespace

Region region_of(double x, double y, double R) {
    if (!(R > 1.0)) {
        throw std::invalid_argument("region_of: requires R > 1");
    }
    if ((x - 1.0) * (x - 1.0) + y * y < 1.0) {
        return Region::Omega2;
    }
    if ((x - R) * (x - R) + y * y <= R * R) {
        return Region::Omega1;
    }
    return Region::Outside;
}

FlowFields euler_fields(double x, double y, Region region) {
    switch (region) {
    case Region::Omega1: {
        require_positive_x(x, "euler_fields");
        FlowFields f;
        f.u = y;
        f.v = (y * y - x * x) / (2.0 * x);
        f.rho = 1.0 / x;
        f.p = entropy(x, y) - 1.0;
        f.region = Region::Omega1;
        return f;
    }
    case Region::Omega2: {
        FlowFields f;
        f.u = y;
        f.v = 1.0 - x;
        f.rho = 1.0;
        f.p = 0.5 * (x * x + y * y - 2.0 * x);
        f.region = Region::Omega2;
        return f;
    }
    case Region::Outside:
        throw std::invalid_argument("euler_fields: point lies outside the flow domain");
    }
    throw std::invalid_argument("euler_fields: bad region");
}

double continuity_residual(double x, double y) {
    require_positive_x(x, "continuity_residual");
    const double d_rho_u_dx = -y / (x * x);       // d/dx of y/x
    const double d_rho_v_dy = y / (x * x);        // d/dy of (y^2-x^2)/(2x^2)
    return d_rho_u_dx + d_rho_v_dy;
}

double divergence(double x, double y, Region region) {
    if (region == Region::Omega2) {
        return 0.0;
    }
    require_positive_x(x, "divergence");
    return y / x;
}

Vec2 euler_momentum_residual(double x, double y, Region region) {
    if (region == Region::Omega2) {
        const double rx = (1.0 - x) + (x - 1.0); // d/dy(uv) + dp/dx
        const double ry = -y + y;                // d/dx(uv) + dp/dy
        return {rx, ry};
    }
    require_positive_x(x, "euler_momentum_residual");
    const double x2 = x * x;
    const double x3 = x2 * x;
    const double rx = -y * y / x2                     // d/dx (rho u^2)
                      + (3.0 * y * y - x2) / (2.0 * x2) // d/dy (rho u v)
                      + (x2 - y * y) / (2.0 * x2);      // dp/dx
    const double ry = -y * y * y / x3                 // d/dx (rho u v)
                      + y * (y * y - x2) / x3          // d/dy (rho v^2)
                      + y / x;                         // dp/dy
    return {rx, ry};
}

double boundary_normal_flux(double phi, Boundary which, double R) {
    double x, y, nx, ny;
    if (which == Boundary::Inner) {
        x = 1.0 + std::cos(phi);
        y = std::sin(phi);
        nx = x - 1.0;
        ny = y;
    } else {
        if (!(R > 1.0)) {
            throw std::invalid_argument("boundary_normal_flux: requires R > 1");
        }
        x = R * (1.0 + std::cos(phi));
        y = R * std::sin(phi);
        nx = (x - R) / R;
        ny = y / R;
    }
    if (std::hypot(x, y) < kSingularTol) {
        throw singularity_error("boundary_normal_flux: the origin is excluded");
    }
    const FlowFields f = euler_fields(x, y, Region::Omega1);
    return f.u * nx + f.v * ny;
}

StrainRate strain_rate(double x, double y, Region region) {
    if (region == Region::Omega2) {
        return {0.0, 0.0, 0.0};
    }
    require_positive_x(x, "strain_rate");
    return {0.0, y / x, (x * x - y * y) / (4.0 * x * x)};
}

Viscosities viscosities(double x, double y, double k) {
    require_positive_x(x, "viscosities");
    const double r2 = x * x + y * y;
    if (r2 < kSingularTol * kSingularTol) {
        throw singularity_error("viscosities: r = 0 rejected");
    }
    const double theta = std::atan2(y, x);
    const double scale = (r2 + k) / r2;
    const double cos2 = x * x / r2;
    const double mu = 4.0 * scale * cos2;
    const double lambda = -4.0 * theta_cot_theta(theta) - mu;
    return {mu, lambda, k};
}

StressTensor ns_stress(double x, double y, double k) {
    const Viscosities visc = viscosities(x, y, k);
    const StrainRate e = strain_rate(x, y, Region::Omega1);
    const double p = entropy(x, y) - 1.0;

    StressTensor s;
    s.viscous11 = (visc.lambda + 2.0 * visc.mu) * e.e11 + visc.lambda * e.e22;
    s.viscous22 = (visc.lambda + 2.0 * visc.mu) * e.e22 + visc.lambda * e.e11;
    s.viscous12 = 2.0 * visc.mu * e.e12;
    s.total11 = -p + s.viscous11;
    s.total22 = -p + s.viscous22;
    s.total12 = s.viscous12;
    return s;
}

ViscousStress closed_form_stress(double x, double y, double k) {
    require_positive_x(x, "closed_form_stress");
    const double r2 = x * x + y * y;
    if (r2 < kSingularTol * kSingularTol) {
        throw singularity_error("closed_form_stress: r = 0 rejected");
    }
    const double theta = std::atan2(y, x);
    const double scale = (r2 + k) / r2;
    const double sin2t = 2.0 * x * y / r2;
    const double cos2t = (x * x - y * y) / r2;
    ViscousStress s;
    s.s11 = -2.0 * (2.0 * theta + scale * sin2t);
    s.s22 = 2.0 * (-2.0 * theta + scale * sin2t);
    s.s12 = 2.0 * scale * cos2t;
    return s;
}

Vec2 ns_momentum_residual(double x, double y, double k) {
    if ((x - 1.0) * (x - 1.0) + y * y < 1.0) {
        // The viscous stress vanishes identically on the inner disc, so the
        // balance reduces to the inviscid one.
        return euler_momentum_residual(x, y, Region::Omega2);
    }
    require_positive_x(x, "ns_momentum_residual");
    const double x2 = x * x;
    const double x3 = x2 * x;
    // Convective part, hand-coded.
    const double conv_x = -y * y / x2 + (3.0 * y * y - x2) / (2.0 * x2);
    const double conv_y = -y * y * y / x3 + y * (y * y - x2) / x3;

    const double d = scaled_step(kFirstDerivStep, std::hypot(x, y));
    const TotalStressClosed sxp = total_stress_closed(x + d, y, k);
    const TotalStressClosed sxm = total_stress_closed(x - d, y, k);
    const TotalStressClosed syp = total_stress_closed(x, y + d, k);
    const TotalStressClosed sym = total_stress_closed(x, y - d, k);

    const double div_stress_x = (sxp.s11 - sxm.s11) / (2.0 * d) + (syp.s12 - sym.s12) / (2.0 * d);
    const double div_stress_y = (sxp.s12 - sxm.s12) / (2.0 * d) + (syp.s22 - sym.s22) / (2.0 * d);
    return {conv_x - div_stress_x, conv_y - div_stress_y};
}

double airy_value(double x, double y, double k) {
    require_positive_x(x, "airy_value");
    const double r2 = x * x + y * y;
    if (r2 < kSingularTol * kSingularTol) {
        throw singularity_error("airy_value: r = 0 rejected");
    }
    return 2.0 * std::atan2(y, x) * (r2 - k);
}

namespace {

// Difference quotients of third order eat ~ eps / step^3 of the potential's
// magnitude; extended precision inside the stencils keeps the double-FD
// residuals within their stated tolerances.
long double potential_ld(long double x, long double y, long double k) {
    return 2.0L * atan2l(y, x) * (x * x + y * y - k);
}

double stress11_from_potential(double x, double y, double k, double d) {
    const long double dl = d;
    return static_cast<double>(
        -(potential_ld(x, y + dl, k) - 2.0L * potential_ld(x, y, k) +
          potential_ld(x, y - dl, k)) /
        (dl * dl));
}

double stress22_from_potential(double x, double y, double k, double d) {
    const long double dl = d;
    return static_cast<double>(
        -(potential_ld(x + dl, y, k) - 2.0L * potential_ld(x, y, k) +
          potential_ld(x - dl, y, k)) /
        (dl * dl));
}

double stress12_from_potential(double x, double y, double k, double d) {
    const long double dl = d;
    return static_cast<double>((potential_ld(x + dl, y + dl, k) -
                                potential_ld(x + dl, y - dl, k) -
                                potential_ld(x - dl, y + dl, k) +
                                potential_ld(x - dl, y - dl, k)) /
                               (4.0L * dl * dl));
}

} // namespace

double airy_equilibrium_residual(double x, double y, double k) {
    const double d = kSecondDerivStep;
    const double rx = (stress11_from_potential(x + d, y, k, d) -
                       stress11_from_potential(x - d, y, k, d)) / (2.0 * d) +
                      (stress12_from_potential(x, y + d, k, d) -
                       stress12_from_potential(x, y - d, k, d)) / (2.0 * d);
    const double ry = (stress12_from_potential(x + d, y, k, d) -
                       stress12_from_potential(x - d, y, k, d)) / (2.0 * d) +
                      (stress22_from_potential(x, y + d, k, d) -
                       stress22_from_potential(x, y - d, k, d)) / (2.0 * d);
    return std::max(std::abs(rx), std::abs(ry));
}

double airy_pde_residual(double x, double y) {
    require_positive_x(x, "airy_pde_residual");
    const double cos2t_scaled = x * x - y * y; // proportional to e12
    if (std::abs(cos2t_scaled) < kSingularTol) {
        throw singularity_error("airy_pde_residual: cos(2 theta) = 0 rejected");
    }
    const double lambda_coeff = -4.0 * x * y / cos2t_scaled; // -2 tan(2 theta)
    const double d = scaled_step(kSecondDerivStep, std::hypot(x, y));
    const double k = 0.0; // the potential family drops out of the equation
    const double a_xx = -stress22_from_potential(x, y, k, d);
    const double a_yy = -stress11_from_potential(x, y, k, d);
    const double a_xy = stress12_from_potential(x, y, k, d);
    return a_xx - a_yy - lambda_coeff * a_xy;
}

double fundamental_relation_check(double x, double y, double k) {
    const StrainRate e = strain_rate(x, y, Region::Omega1);
    const double diag = e.e11 - e.e22;
    if (std::abs(e.e12) < kSingularTol || std::abs(diag) < kSingularTol) {
        throw singularity_error("fundamental_relation_check: degenerate strain denominators");
    }
    const ViscousStress s = closed_form_stress(x, y, k);
    const double q1 = (s.s11 - s.s22) / diag;
    const double q2 = s.s12 / e.e12;
    return std::abs(q1 - q2);
}

RhJump rankine_hugoniot_check(double phi) {
    const double x = 1.0 + std::cos(phi);
    const double y = std::sin(phi);
    if (std::hypot(x, y) < kSingularTol) {
        throw singularity_error("rankine_hugoniot_check: the origin is excluded");
    }
    const FlowFields outer = euler_fields(x, y, Region::Omega1);
    const FlowFields inner = euler_fields(x, y, Region::Omega2);
    const double nx = x - 1.0;
    const double ny = y;
    RhJump jump;
    jump.pressure = outer.p - inner.p;
    jump.mass_flux = outer.rho * (outer.u * nx + outer.v * ny) -
                     inner.rho * (inner.u * nx + inner.v * ny);
    return jump;
}

std::vector<Vec2> sample_region(const DomainSpec& spec, Region region, std::size_t count) {
    if (!(spec.R > 1.0)) {
        throw std::invalid_argument("sample_region: requires R > 1");
    }
    if (region == Region::Outside) {
        throw std::invalid_argument("sample_region: cannot sample the outside region");
    }
    const double x_hi = region == Region::Omega1 ? 2.0 * spec.R : 2.0;
    const double y_hi = region == Region::Omega1 ? spec.R : 1.0;

    std::mt19937_64 rng(spec.seed);
    const auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };

    std::vector<Vec2> points;
    points.reserve(count);
    std::size_t attempts = 0;
    const std::size_t max_attempts = count * 10000 + 1000;
    while (points.size() < count) {
        if (++attempts > max_attempts) {
            throw std::runtime_error("sample_region: rejection sampling failed to converge");
        }
        const double x = uniform() * x_hi;
        const double y = (2.0 * uniform() - 1.0) * y_hi;
        if (x < spec.exclusion) {
            continue;
        }
        if (region_of(x, y, spec.R) != region) {
            continue;
        }
        points.push_back({x, y});
    }
    return points;
}

std::map<std::string, double> default_tolerances() {
    return {
        {"continuity", 1e-12},
        {"momentum_x", 1e-12},
        {"momentum_y", 1e-12},
        {"boundary_flux", 1e-12},
        {"rh_pressure", 1e-12},
        {"rh_mass_flux", 1e-12},
        {"pressure_orbit_spread", 1e-12},
        {"trace_identity", 1e-12},
        {"viscosity_negativity", 1e-12},
        {"two_path_stress", 1e-10},
        {"fundamental_relation", 1e-10},
        {"continuity_fd", 1e-6},
        {"momentum_fd", 1e-6},
        {"ns_momentum", 1e-6},
        {"airy_pde", 1e-6},
        {"airy_cross_derivative", 1e-6},
        {"airy_equilibrium", 1e-5},
    };
}

namespace {

// FD oracle for the continuity/momentum identities: centered differences of
// the flux fields themselves.
double fd_continuity(double x, double y) {
    const double d = scaled_step(kFirstDerivStep, x);
    const auto rho_u = [](double px, double py) {
        const FlowFields f = euler_fields(px, py, Region::Omega1);
        return f.rho * f.u;
    };
    const auto rho_v = [](double px, double py) {
        const FlowFields f = euler_fields(px, py, Region::Omega1);
        return f.rho * f.v;
    };
    return (rho_u(x + d, y) - rho_u(x - d, y)) / (2.0 * d) +
           (rho_v(x, y + d) - rho_v(x, y - d)) / (2.0 * d);
}

Vec2 fd_momentum(double x, double y) {
    const double d = scaled_step(kFirstDerivStep, x);
    const auto fields = [](double px, double py) { return euler_fields(px, py, Region::Omega1); };
    const auto m11 = [&](double px, double py) {
        const FlowFields f = fields(px, py);
        return f.rho * f.u * f.u + f.p;
    };
    const auto m12 = [&](double px, double py) {
        const FlowFields f = fields(px, py);
        return f.rho * f.u * f.v;
    };
    const auto m22 = [&](double px, double py) {
        const FlowFields f = fields(px, py);
        return f.rho * f.v * f.v + f.p;
    };
    return {(m11(x + d, y) - m11(x - d, y)) / (2.0 * d) +
                (m12(x, y + d) - m12(x, y - d)) / (2.0 * d),
            (m12(x + d, y) - m12(x - d, y)) / (2.0 * d) +
                (m22(x, y + d) - m22(x, y - d)) / (2.0 * d)};
}

} // namespace

ResidualReport verify_fields(const DomainSpec& spec, double k, std::size_t count) {
    ResidualReport report;
    report.R = spec.R;
    report.k = k;
    report.seed = spec.seed;
    report.sample_count = count;
    report.exclusion =
        "x >= 0.05; interface angles with |phi - pi| >= 0.05; finite-difference "
        "families (stress balance, potential equilibrium/equation) restricted to "
        "r >= 0.5 where double precision supports the stated tolerances; "
        "fundamental relation and potential equation require |cos(2 theta)| >= 0.1 "
        "and |y/x| >= 0.05 away from their degenerate denominators";

    auto& res = report.residuals;
    for (const auto& [name, tol] : default_tolerances()) {
        (void)tol;
        res[name] = 0.0;
    }
    const auto record = [&res](const std::string& name, double value) {
        if (std::abs(value) > res[name]) {
            res[name] = std::abs(value);
        }
    };

    DomainSpec omega2_spec = spec;
    omega2_spec.seed = spec.seed + 1;
    const std::vector<Vec2> omega1 = sample_region(spec, Region::Omega1, count);
    const std::vector<Vec2> omega2 = sample_region(omega2_spec, Region::Omega2, count);

    for (const Vec2& pt : omega1) {
        record("continuity", continuity_residual(pt.x, pt.y));
        record("continuity_fd", fd_continuity(pt.x, pt.y));
        const Vec2 m = euler_momentum_residual(pt.x, pt.y, Region::Omega1);
        record("momentum_x", m.x);
        record("momentum_y", m.y);
        const Vec2 mfd = fd_momentum(pt.x, pt.y);
        record("momentum_fd", mfd.x);
        record("momentum_fd", mfd.y);

        const Viscosities visc = viscosities(pt.x, pt.y, k);
        record("viscosity_negativity", std::max(0.0, -visc.mu));
        // The second Lame-type combination carries no sign claim; report it.
        const double bulk = visc.lambda + 2.0 * visc.mu;
        const auto it = report.diagnostics.find("lambda_plus_2mu_min");
        if (it == report.diagnostics.end() || bulk < it->second) {
            report.diagnostics["lambda_plus_2mu_min"] = bulk;
        }

        const StressTensor cons = ns_stress(pt.x, pt.y, k);
        const ViscousStress closed = closed_form_stress(pt.x, pt.y, k);
        record("two_path_stress", cons.viscous11 - closed.s11);
        record("two_path_stress", cons.viscous22 - closed.s22);
        record("two_path_stress", cons.viscous12 - closed.s12);

        const StrainRate e = strain_rate(pt.x, pt.y, Region::Omega1);
        record("trace_identity",
               (closed.s11 + closed.s22) -
                   2.0 * (visc.lambda + visc.mu) * (e.e11 + e.e22));

        const double r2 = pt.x * pt.x + pt.y * pt.y;
        if (r2 >= 0.25) {
            const Vec2 ns = ns_momentum_residual(pt.x, pt.y, k);
            record("ns_momentum", ns.x);
            record("ns_momentum", ns.y);
            record("airy_equilibrium", airy_equilibrium_residual(pt.x, pt.y, k));
            record("airy_cross_derivative",
                   stress12_from_potential(pt.x, pt.y, k, kSecondDerivStep) - closed.s12);
        }

        const bool away_from_diagonals = std::abs(pt.x * pt.x - pt.y * pt.y) >= 0.1 * r2;
        const bool away_from_axis = std::abs(pt.y) >= 0.05 * pt.x;
        if (away_from_diagonals && away_from_axis) {
            record("fundamental_relation", fundamental_relation_check(pt.x, pt.y, k));
            if (r2 >= 0.25) {
                record("airy_pde", airy_pde_residual(pt.x, pt.y));
            }
        }
    }

    for (const Vec2& pt : omega2) {
        const Vec2 m = euler_momentum_residual(pt.x, pt.y, Region::Omega2);
        record("momentum_x", m.x);
        record("momentum_y", m.y);
        const Vec2 ns = ns_momentum_residual(pt.x, pt.y, k);
        record("ns_momentum", ns.x);
        record("ns_momentum", ns.y);
    }

    // Boundary and interface sweeps: uniform angle grids skipping the origin.
    const std::size_t angles = 100;
    for (std::size_t i = 0; i < angles; ++i) {
        const double phi =
            -std::numbers::pi + (static_cast<double>(i) + 0.5) * 2.0 * std::numbers::pi /
                                    static_cast<double>(angles);
        if (std::abs(phi - std::numbers::pi) < 0.05 || std::abs(phi + std::numbers::pi) < 0.05) {
            continue;
        }
        record("boundary_flux", boundary_normal_flux(phi, Boundary::Inner, spec.R));
        record("boundary_flux", boundary_normal_flux(phi, Boundary::Outer, spec.R));
        const RhJump jump = rankine_hugoniot_check(phi);
        record("rh_pressure", jump.pressure);
        record("rh_mass_flux", jump.mass_flux);
    }

    // Pressure constancy along orbit circles inside Omega1.
    for (double c : {1.0, 1.0 + (spec.R - 1.0) * 0.25, 1.0 + (spec.R - 1.0) * 0.5,
                     1.0 + (spec.R - 1.0) * 0.75, spec.R}) {
        for (std::size_t i = 0; i < angles; ++i) {
            const double s = (static_cast<double>(i) + 0.5) * 2.0 * std::numbers::pi /
                             static_cast<double>(angles);
            const double x = c * (1.0 + std::cos(s));
            const double y = c * std::sin(s);
            if (x < spec.exclusion) {
                continue;
            }
            const FlowFields f = euler_fields(x, y, Region::Omega1);
            record("pressure_orbit_spread", f.p - (c - 1.0));
        }
    }

    return report;
}

std::string ResidualReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = schema;
    j["R"] = R;
    j["k"] = k;
    j["seed"] = seed;
    j["samples"] = sample_count;
    j["exclusion"] = exclusion;
    j["residuals"] = residuals;
    j["tolerances"] = default_tolerances();
    j["diagnostics"] = diagnostics;
    return j.dump(2);
}

} // namespace planeflow
