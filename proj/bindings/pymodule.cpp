#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fmt/format.h>

#include "planeflow/expression.hpp"
#include "planeflow/fields.hpp"
#include "planeflow/generator.hpp"
#include "planeflow/integrate.hpp"

namespace py = pybind11;
using namespace planeflow;

namespace {

std::vector<double> column(const TrajectoryLog& log, double Sample::*member) {
    std::vector<double> out;
    out.reserve(log.samples.size());
    for (const Sample& s : log.samples) {
        out.push_back(s.*member);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(planeflow, m) {
    m.doc() = "Plane-flow trajectories, structure-preserving integration, and exact "
              "field verification";

    py::register_exception<singularity_error>(m, "SingularityError", PyExc_ValueError);
    py::register_exception<eval_error>(m, "EvalError", PyExc_ValueError);
    static py::exception<parse_error> parse_exc(m, "ParseError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const parse_error& e) {
            py::set_error(parse_exc,
                          fmt::format("{} (column {})", e.what(), e.column()).c_str());
        }
    });
    py::register_exception<integration_error>(m, "IntegrationError", PyExc_RuntimeError);

    py::class_<State>(m, "State")
        .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
             py::arg("t") = 0.0)
        .def_readwrite("x", &State::x)
        .def_readwrite("y", &State::y)
        .def_readwrite("t", &State::t)
        .def("__repr__", [](const State& s) {
            return "State(x=" + std::to_string(s.x) + ", y=" + std::to_string(s.y) +
                   ", t=" + std::to_string(s.t) + ")";
        });

    py::class_<OrbitParams>(m, "OrbitParams")
        .def_readonly("c0", &OrbitParams::c0)
        .def_readonly("theta0", &OrbitParams::theta0);

    m.def("entropy", &entropy, py::arg("x"), py::arg("y"));
    m.def("outer_branch", &outer_branch, py::arg("x"), py::arg("y"));
    m.def("rhs_oscillator",
          [](double x, double y) {
              const Vec2 v = rhs_oscillator({x, y});
              return py::make_tuple(v.x, v.y);
          });
    m.def("rhs_modified", [](double x, double y) {
        const Vec2 v = rhs_modified({x, y});
        return py::make_tuple(v.x, v.y);
    });
    m.def("rhs_control", [](double x, double y, double w) {
        const Vec2 v = rhs_control({x, y}, w);
        return py::make_tuple(v.x, v.y);
    });
    m.def("rhs_friction", [](double x, double y, double gamma) {
        const Vec2 v = rhs_friction({x, y}, gamma);
        return py::make_tuple(v.x, v.y);
    });
    m.def("orbit_params_from_initial", &orbit_params_from_initial, py::arg("x0"),
          py::arg("y0"));
    m.def("closed_form_state", &closed_form_state, py::arg("t"), py::arg("params"));
    m.def("energy_eta", [](double x, double y, double w, double rho) {
        return energy_eta({x, y}, w, rho);
    });

    py::class_<EntropyProfile>(m, "EntropyProfile")
        .def(py::init([](double t1, std::vector<double> levels) {
                 EntropyProfile p{t1, std::move(levels)};
                 p.validate();
                 return p;
             }),
             py::arg("t1"), py::arg("levels"))
        .def_readonly("t1", &EntropyProfile::t1)
        .def_readonly("levels", &EntropyProfile::levels)
        .def("value_at", &EntropyProfile::value_at)
        .def("__str__", [](const EntropyProfile& p) { return to_string(p); });
    m.def("parse_profile", [](const std::string& text) { return parse_profile(text); });

    py::class_<CompositeTrajectory>(m, "CompositeTrajectory")
        .def("eval", &CompositeTrajectory::eval, py::arg("t"))
        .def("switch_time", &CompositeTrajectory::switch_time, py::arg("n"))
        .def_property_readonly("profile", &CompositeTrajectory::profile);

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("profile", &SelectionResult::profile)
        .def_readonly("terminal_entropy", &SelectionResult::terminal_entropy)
        .def_readonly("envelope_slope", &SelectionResult::envelope_slope);

    m.def("first_arrival_time", &first_arrival_time, py::arg("params"));
    m.def("build_composite", &build_composite, py::arg("x0"), py::arg("y0"),
          py::arg("profile"));
    m.def("acceleration_jump", &acceleration_jump, py::arg("c_prev"), py::arg("c_next"));
    m.def("is_admissible_profile", &is_admissible_profile, py::arg("profile"));
    m.def("entropy_rate_select", &entropy_rate_select, py::arg("c0"), py::arg("t1") = 0.0);
    m.def("friction_limit_probe", &friction_limit_probe, py::arg("x0"), py::arg("y0"),
          py::arg("gamma"), py::arg("T"), py::arg("h"));

    py::enum_<Scheme>(m, "Scheme")
        .value("SYMPLECTIC", Scheme::Symplectic)
        .value("EXPLICIT", Scheme::Explicit);

    py::class_<IntegrationConfig>(m, "IntegrationConfig")
        .def(py::init([](double h, double T, Scheme scheme, double gamma) {
                 IntegrationConfig c{h, T, scheme, gamma};
                 c.validate();
                 return c;
             }),
             py::arg("h"), py::arg("T"), py::arg("scheme") = Scheme::Symplectic,
             py::arg("gamma") = 0.0)
        .def_readonly("h", &IntegrationConfig::h)
        .def_readonly("T", &IntegrationConfig::T)
        .def_readonly("scheme", &IntegrationConfig::scheme)
        .def_readonly("gamma", &IntegrationConfig::gamma);

    py::class_<TrajectoryLog>(m, "TrajectoryLog")
        .def_property_readonly("t",
                               [](const TrajectoryLog& l) { return column(l, &Sample::t); })
        .def_property_readonly("x",
                               [](const TrajectoryLog& l) { return column(l, &Sample::x); })
        .def_property_readonly("y",
                               [](const TrajectoryLog& l) { return column(l, &Sample::y); })
        .def_property_readonly("H",
                               [](const TrajectoryLog& l) { return column(l, &Sample::H); })
        .def_property_readonly("outer",
                               [](const TrajectoryLog& l) {
                                   std::vector<bool> out;
                                   out.reserve(l.samples.size());
                                   for (const Sample& s : l.samples) {
                                       out.push_back(s.outer);
                                   }
                                   return out;
                               })
        .def("__len__", [](const TrajectoryLog& l) { return l.samples.size(); });

    m.def("symplectic_step", &symplectic_step, py::arg("state"), py::arg("h"),
          py::arg("gamma") = 0.0);
    m.def("explicit_step", &explicit_step, py::arg("state"), py::arg("h"),
          py::arg("gamma") = 0.0);
    m.def("integrate", &integrate, py::arg("x0"), py::arg("y0"), py::arg("config"));
    m.def(
        "entropy_drift",
        [](const TrajectoryLog& log, const EntropyProfile& ref, double window) {
            const DriftReport r = entropy_drift(log, ref, window);
            py::dict out;
            out["max_drift"] = r.max_drift;
            out["window_radius"] = r.window_radius;
            out["per_lap_entropy"] = r.per_lap_entropy;
            out["crossing_abscissae"] = r.crossing_abscissae;
            return out;
        },
        py::arg("log"), py::arg("reference"), py::arg("window_radius") = -1.0);
    m.def("detect_origin_crossings", &detect_origin_crossings, py::arg("log"));

    py::enum_<Region>(m, "Region")
        .value("OMEGA1", Region::Omega1)
        .value("OMEGA2", Region::Omega2)
        .value("OUTSIDE", Region::Outside);

    py::class_<FlowFields>(m, "FlowFields")
        .def_readonly("u", &FlowFields::u)
        .def_readonly("v", &FlowFields::v)
        .def_readonly("rho", &FlowFields::rho)
        .def_readonly("p", &FlowFields::p)
        .def_readonly("region", &FlowFields::region);

    m.def("region_of", &region_of, py::arg("x"), py::arg("y"), py::arg("R"));
    m.def("euler_fields", &euler_fields, py::arg("x"), py::arg("y"), py::arg("region"));
    m.def("continuity_residual", &continuity_residual, py::arg("x"), py::arg("y"));
    m.def("divergence", &divergence, py::arg("x"), py::arg("y"), py::arg("region"));
    m.def("euler_momentum_residual", [](double x, double y, Region region) {
        const Vec2 r = euler_momentum_residual(x, y, region);
        return py::make_tuple(r.x, r.y);
    });
    m.def("viscosities", [](double x, double y, double k) {
        const Viscosities v = viscosities(x, y, k);
        return py::make_tuple(v.mu, v.lambda);
    });
    m.def("ns_momentum_residual", [](double x, double y, double k) {
        const Vec2 r = ns_momentum_residual(x, y, k);
        return py::make_tuple(r.x, r.y);
    });
    m.def("airy_value", &airy_value, py::arg("x"), py::arg("y"), py::arg("k"));
    m.def("rankine_hugoniot_check", [](double phi) {
        const RhJump j = rankine_hugoniot_check(phi);
        return py::make_tuple(j.pressure, j.mass_flux);
    });
    m.def(
        "verify_fields",
        [](double R, double k, std::uint64_t seed, std::size_t samples) {
            const ResidualReport report = verify_fields({R, 0.05, seed}, k, samples);
            py::dict out;
            out["schema"] = report.schema;
            out["R"] = report.R;
            out["k"] = report.k;
            out["seed"] = report.seed;
            out["samples"] = report.sample_count;
            py::dict residuals;
            for (const auto& [name, value] : report.residuals) {
                residuals[name.c_str()] = value;
            }
            out["residuals"] = residuals;
            py::dict diagnostics;
            for (const auto& [name, value] : report.diagnostics) {
                diagnostics[name.c_str()] = value;
            }
            out["diagnostics"] = diagnostics;
            return out;
        },
        py::arg("R") = 2.0, py::arg("k") = 0.0, py::arg("seed") = 1,
        py::arg("samples") = 1000);
    m.def("default_tolerances", &default_tolerances);

    py::class_<Expr>(m, "Expr")
        .def("eval", &Expr::eval, py::arg("x"), py::arg("y"))
        .def("derivative",
             [](const Expr& e, const std::string& var) {
                 if (var != "x" && var != "y") {
                     throw std::invalid_argument("variable must be 'x' or 'y'");
                 }
                 return differentiate(e, var == "x" ? Var::X : Var::Y);
             })
        .def("__str__", &Expr::str);
    m.def("parse_expression",
          [](const std::string& text) { return parse_expression(text); });

    py::class_<GeneratorSpec>(m, "GeneratorSpec");
    m.def(
        "make_generator",
        [](const std::string& G, const std::string& w, double D) {
            return GeneratorSpec::make(G, w, D);
        },
        py::arg("G"), py::arg("w"), py::arg("D") = 1.0);
    m.def("velocity_from_generator", [](const GeneratorSpec& spec, double x, double y) {
        const Vec2 v = velocity_from_generator(spec, x, y);
        return py::make_tuple(v.x, v.y);
    });
    m.def("density_from_generator", &density_from_generator);
    m.def("conservation_residual", &conservation_residual);
    m.def("continuity_residual_generic", &continuity_residual_generic);
    m.def("pressure_semi_inverse",
          [](const GeneratorSpec& spec, const std::vector<std::pair<double, double>>& pts) {
              std::vector<Vec2> path;
              path.reserve(pts.size());
              for (const auto& [x, y] : pts) {
                  path.push_back({x, y});
              }
              return pressure_semi_inverse(spec, path);
          });
}
