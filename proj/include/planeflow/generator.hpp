#pragma once

#include <span>
#include <string>
#include <vector>

#include "planeflow/dynamics.hpp"
#include "planeflow/expression.hpp"

namespace planeflow {

/// Conserved quantity G, weight w, and density constant D defining the
/// velocity (G_y w, -G_x w) with mass density D / w.
struct GeneratorSpec {
    Expr G;
    Expr w;
    double D = 1.0;
    Expr Gx; // cached partials of G
    Expr Gy;

    static GeneratorSpec make(const Expr& G, const Expr& w, double D = 1.0);
    static GeneratorSpec make(std::string_view G_text, std::string_view w_text, double D = 1.0);
};

/// Built-in specs covering the named control choices and the rigid rotation.
std::vector<std::pair<std::string, GeneratorSpec>> builtin_catalog();

/// u = G_y w, v = -G_x w.
Vec2 velocity_from_generator(const GeneratorSpec& spec, double x, double y);

/// rho = D / w; throws eval_error when w vanishes at the point.
double density_from_generator(const GeneratorSpec& spec, double x, double y);

/// grad(G) . (u, v); zero by construction.
double conservation_residual(const GeneratorSpec& spec, double x, double y);

/// d(rho u)/dx + d(rho v)/dy via symbolic derivatives; vanishes wherever the
/// mixed partials of G commute.
double continuity_residual_generic(const GeneratorSpec& spec, double x, double y);

/// Pressure recovered semi-inversely by line-integrating the negative
/// momentum-flux divergence along the polyline; p(path[0]) = 0. On a closed
/// polyline the first/last values agree up to quadrature error, which is the
/// exactness check for the recovered gradient.
std::vector<double> pressure_semi_inverse(const GeneratorSpec& spec, std::span<const Vec2> path);

/// Convenience: |p_end - p_start| for a closed polyline.
double pressure_loop_residual(const GeneratorSpec& spec, std::span<const Vec2> loop);

} // namespace planeflow
