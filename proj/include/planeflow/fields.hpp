#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "planeflow/dynamics.hpp"

namespace planeflow {

/// Omega1 is the region between the unit circle about (1,0) and the circle of
/// radius R about (R,0); Omega2 is the open unit disc about (1,0).
enum class Region { Omega1, Omega2, Outside };

enum class Boundary { Inner, Outer };

struct FlowFields {
    double u = 0.0;
    double v = 0.0;
    double rho = 1.0;
    double p = 0.0;
    Region region = Region::Omega1;
};

struct StrainRate {
    double e11 = 0.0;
    double e22 = 0.0;
    double e12 = 0.0;
};

struct Viscosities {
    double mu = 0.0;     // shear viscosity
    double lambda = 0.0; // second coefficient
    double k = 0.0;      // stress-family parameter
};

/// Viscous stress components (symmetric, s21 = s12).
struct ViscousStress {
    double s11 = 0.0;
    double s22 = 0.0;
    double s12 = 0.0;
};

/// Total stress -p I + viscous part.
struct StressTensor {
    double total11 = 0.0;
    double total12 = 0.0;
    double total22 = 0.0;
    double viscous11 = 0.0;
    double viscous12 = 0.0;
    double viscous22 = 0.0;
};

struct RhJump {
    double pressure = 0.0;
    double mass_flux = 0.0;
};

/// Seeded sampling domain for residual sweeps. Points within `exclusion` of
/// the y-axis are rejected (the density 1/x blows up there).
struct DomainSpec {
    double R = 2.0;
    double exclusion = 0.05;
    std::uint64_t seed = 1;
};

Region region_of(double x, double y, double R);

/// Exact velocity/density/pressure fields per region.
///   Omega1: (y, (y^2-x^2)/(2x)), rho = 1/x, p = H - 1
///   Omega2: (y, 1-x),            rho = 1,   p = (x^2+y^2-2x)/2
FlowFields euler_fields(double x, double y, Region region);

/// d(rho u)/dx + d(rho v)/dy in Omega1, from hand-coded derivatives.
double continuity_residual(double x, double y);

/// Velocity divergence: y/x in Omega1, 0 in Omega2.
double divergence(double x, double y, Region region);

/// Residuals of the steady momentum balance with the specified pressure.
Vec2 euler_momentum_residual(double x, double y, Region region);

/// u . n on the inner/outer boundary circle at polar angle phi (about the
/// circle's own centre), n the outward normal.
double boundary_normal_flux(double phi, Boundary which, double R);

/// Strain rate of the region's velocity field; identically zero in Omega2.
StrainRate strain_rate(double x, double y, Region region = Region::Omega1);

/// mu = 4 (r^2+k) cos^2(theta) / r^2,
/// lambda = -4 theta cot(theta) - mu (with theta cot(theta) -> 1 at 0).
Viscosities viscosities(double x, double y, double k);

/// Viscous stress via the constitutive law sigma = lambda tr(e) I + 2 mu e,
/// assembled into the total stress -p I + sigma.
StressTensor ns_stress(double x, double y, double k);

/// The same viscous stress in closed polar form (independent route).
ViscousStress closed_form_stress(double x, double y, double k);

/// Momentum-flux divergence minus total-stress divergence; the stress
/// derivatives come from centered differences of the closed-form stresses.
Vec2 ns_momentum_residual(double x, double y, double k);

/// Stress potential A(x, y) = 2 theta (r^2 - k); the stresses are
/// s11 = -A_yy, s22 = -A_xx, s12 = A_xy.
double airy_value(double x, double y, double k);

/// max(|ds11/dx + ds12/dy|, |ds12/dx + ds22/dy|) with the stresses obtained
/// from second differences of the potential (double-FD limited).
double airy_equilibrium_residual(double x, double y, double k);

/// A_xx - A_yy - Lambda A_xy with Lambda = (e11-e22)/e12 = -2 tan(2 theta),
/// derivatives by finite differences. Rejects cos(2 theta) = 0.
double airy_pde_residual(double x, double y);

/// |(s11-s22)/(e11-e22) - s12/e12|; both quotients equal 2 mu.
/// Rejects degenerate denominators.
double fundamental_relation_check(double x, double y, double k);

/// Pressure and normal-mass-flux jumps across the unit circle about (1,0)
/// at polar angle phi about its centre; phi = pi (the origin) is rejected.
RhJump rankine_hugoniot_check(double phi);

/// Seeded rejection sampling in the bounding box of the region. Deterministic
/// per spec.seed; points with x < spec.exclusion are rejected.
std::vector<Vec2> sample_region(const DomainSpec& spec, Region region, std::size_t count);

/// Aggregated residual sweep, serializable to JSON ({"schema": 1, ...}).
/// `residuals` are gated against default_tolerances(); `diagnostics` are
/// reported values without a pass threshold.
struct ResidualReport {
    int schema = 1;
    double R = 2.0;
    double k = 0.0;
    std::uint64_t seed = 1;
    std::size_t sample_count = 0;
    std::string exclusion;
    std::map<std::string, double> residuals;
    std::map<std::string, double> diagnostics;

    std::string to_json() const;
};

/// Per-residual pass thresholds: 1e-12 for analytic identities, 1e-10 for
/// two-path agreements, 1e-6 for FD-limited checks, 1e-5 for double-FD.
std::map<std::string, double> default_tolerances();

/// Runs every residual over `count` seeded samples (plus boundary/interface
/// angle sweeps) and records the max absolute values.
ResidualReport verify_fields(const DomainSpec& spec, double k, std::size_t count);

} // namespace planeflow
