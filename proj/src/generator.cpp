#include "planeflow/generator.hpp"

#include <cmath>
#include <stdexcept>

namespace planeflow {

namespace {

struct FluxDivergence {
    Expr f1; // d/dx (rho u^2) + d/dy (rho u v)
    Expr f2; // d/dx (rho u v) + d/dy (rho v^2)
};

FluxDivergence momentum_flux_divergence(const GeneratorSpec& spec) {
    const Expr u = spec.Gy * spec.w;
    const Expr v = -(spec.Gx * spec.w);
    const Expr rho = Expr::number(spec.D) / spec.w;
    const Expr m11 = rho * u * u;
    const Expr m12 = rho * u * v;
    const Expr m22 = rho * v * v;
    return {differentiate(m11, Var::X) + differentiate(m12, Var::Y),
            differentiate(m12, Var::X) + differentiate(m22, Var::Y)};
}

} // namespace

GeneratorSpec GeneratorSpec::make(const Expr& G, const Expr& w, double D) {
    if (!(D > 0.0)) {
        throw std::invalid_argument("GeneratorSpec: D must be positive");
    }
    GeneratorSpec spec;
    spec.G = G;
    spec.w = w;
    spec.D = D;
    spec.Gx = differentiate(G, Var::X);
    spec.Gy = differentiate(G, Var::Y);
    return spec;
}

GeneratorSpec GeneratorSpec::make(std::string_view G_text, std::string_view w_text, double D) {
    return make(parse_expression(G_text), parse_expression(w_text), D);
}

std::vector<std::pair<std::string, GeneratorSpec>> builtin_catalog() {
    std::vector<std::pair<std::string, GeneratorSpec>> catalog;
    catalog.emplace_back("entropy-linear-weight",
                         GeneratorSpec::make("(x^2+y^2)/(2*x)", "x"));
    catalog.emplace_back("entropy-power-weight",
                         GeneratorSpec::make("(x^2+y^2)/(2*x)", "x^0.5"));
    catalog.emplace_back("entropy-inverse-square-weight",
                         GeneratorSpec::make("(x^2+y^2)/(2*x)", "1/(2*x^2)"));
    catalog.emplace_back("rigid-rotation",
                         GeneratorSpec::make("(x^2+y^2)/2", "1"));
    return catalog;
}

Vec2 velocity_from_generator(const GeneratorSpec& spec, double x, double y) {
    const double w = spec.w.eval(x, y);
    return {spec.Gy.eval(x, y) * w, -spec.Gx.eval(x, y) * w};
}

double density_from_generator(const GeneratorSpec& spec, double x, double y) {
    const double w = spec.w.eval(x, y);
    if (w == 0.0 || !std::isfinite(w)) {
        throw eval_error("density_from_generator: weight vanishes at this point");
    }
    return spec.D / w;
}

double conservation_residual(const GeneratorSpec& spec, double x, double y) {
    const Vec2 vel = velocity_from_generator(spec, x, y);
    return spec.Gx.eval(x, y) * vel.x + spec.Gy.eval(x, y) * vel.y;
}

double continuity_residual_generic(const GeneratorSpec& spec, double x, double y) {
    const Expr u = spec.Gy * spec.w;
    const Expr v = -(spec.Gx * spec.w);
    const Expr rho = Expr::number(spec.D) / spec.w;
    const Expr residual =
        differentiate(rho * u, Var::X) + differentiate(rho * v, Var::Y);
    return residual.eval(x, y);
}

std::vector<double> pressure_semi_inverse(const GeneratorSpec& spec,
                                          std::span<const Vec2> path) {
    if (path.size() < 2) {
        throw std::invalid_argument("pressure_semi_inverse: path needs at least two points");
    }
    const FluxDivergence flux = momentum_flux_divergence(spec);
    const auto grad_p = [&flux](double x, double y) -> Vec2 {
        return {-flux.f1.eval(x, y), -flux.f2.eval(x, y)};
    };

    std::vector<double> pressures;
    pressures.reserve(path.size());
    pressures.push_back(0.0);

    double p = 0.0;
    constexpr double kQuadratureStep = 1e-3;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Vec2 a = path[i];
        const Vec2 b = path[i + 1];
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double len = std::hypot(dx, dy);
        const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                         std::ceil(len / kQuadratureStep)));
        const double ds = 1.0 / static_cast<double>(pieces);
        // Composite Simpson along the segment.
        for (std::size_t j = 0; j < pieces; ++j) {
            const double s0 = static_cast<double>(j) * ds;
            const double s1 = s0 + ds;
            const double sm = 0.5 * (s0 + s1);
            const auto integrand = [&](double s) {
                const Vec2 g = grad_p(a.x + s * dx, a.y + s * dy);
                return g.x * dx + g.y * dy;
            };
            p += ds / 6.0 * (integrand(s0) + 4.0 * integrand(sm) + integrand(s1));
        }
        pressures.push_back(p);
    }
    return pressures;
}

double pressure_loop_residual(const GeneratorSpec& spec, std::span<const Vec2> loop) {
    const std::vector<double> p = pressure_semi_inverse(spec, loop);
    return std::abs(p.back() - p.front());
}

} // namespace planeflow
