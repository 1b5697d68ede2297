#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "planeflow/fields.hpp"
#include "planeflow/generator.hpp"
#include "planeflow/integrate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIntegration = 3;
constexpr int kExitVerification = 4;

constexpr double kPi = std::numbers::pi;

struct Output {
    std::ofstream file;
    std::ostream* stream = &std::cout;
};

Output open_output(const std::string& path) {
    Output out;
    if (path.empty() || path == "-") {
        return out;
    }
    out.file.open(path);
    if (!out.file) {
        throw std::invalid_argument("cannot open output file: " + path);
    }
    out.stream = &out.file;
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Flat key=value configuration: every key maps onto the matching long flag of
// the active subcommand. Values from the file are injected as extra tokens,
// so flags given on the command line always win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read config file: " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line is not key=value: " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line has an empty key: " + line);
        }
        const std::string flag = "--" + key;
        bool given = false;
        for (const std::string& arg : args) {
            given = given || arg == flag || arg.rfind(flag + "=", 0) == 0;
        }
        if (!given) {
            args.push_back(flag + "=" + value);
        }
    }
    return args;
}

planeflow::Scheme parse_scheme(const std::string& name) {
    if (name == "symplectic") {
        return planeflow::Scheme::Symplectic;
    }
    if (name == "explicit") {
        return planeflow::Scheme::Explicit;
    }
    throw std::invalid_argument("scheme must be 'symplectic' or 'explicit'");
}

std::pair<double, double> parse_ic(const std::vector<double>& ic) {
    if (ic.size() != 2) {
        throw std::invalid_argument("--ic expects two comma-separated values X,Y");
    }
    return {ic[0], ic[1]};
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::vector<double> ic{0.5, 1.125};
    double h = 1e-4;
    double T = 8.0 * kPi;
    std::string scheme = "symplectic";
    double gamma = 0.0;
    std::string out = "-";
};

int cmd_simulate(const SimulateOptions& opt) {
    const auto [x0, y0] = parse_ic(opt.ic);
    planeflow::IntegrationConfig config{opt.h, opt.T, parse_scheme(opt.scheme), opt.gamma};
    config.validate();
    const planeflow::TrajectoryLog log = planeflow::integrate(x0, y0, config);
    Output out = open_output(opt.out);
    planeflow::write_csv(log, *out.stream);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

struct SelectOptions {
    std::vector<double> ic{0.5, 1.125};
    std::vector<double> gammas;
    double T = std::numeric_limits<double>::quiet_NaN();
    double h = 1e-3;
    std::string profile_text;
    std::string out = "-";
};

int cmd_select(const SelectOptions& opt) {
    const auto [x0, y0] = parse_ic(opt.ic);
    if (!(x0 > 0.0)) {
        throw std::invalid_argument("--ic must have x > 0");
    }
    const double c0 = planeflow::entropy(x0, y0);
    if (c0 < 1.0) {
        throw std::invalid_argument(fmt::format(
            "initial entropy {} is below 1: the orbit never reaches the origin and no "
            "switching selection applies",
            c0));
    }
    const planeflow::OrbitParams params = planeflow::orbit_params_from_initial(x0, y0);
    const double t1 = planeflow::first_arrival_time(params);
    const planeflow::SelectionResult sel = planeflow::entropy_rate_select(c0, t1);

    Output out = open_output(opt.out);
    std::ostream& os = *out.stream;
    os << fmt::format("initial entropy: {}\n", c0);
    os << fmt::format("first arrival time: {}\n", t1);
    std::string levels;
    for (std::size_t i = 0; i < sel.profile.levels.size(); ++i) {
        levels += fmt::format("{}{}", i == 0 ? "" : ", ", sel.profile.levels[i]);
    }
    os << fmt::format("selected profile: {}\n", levels);
    os << fmt::format("acceleration jump: {}\n",
                      planeflow::acceleration_jump(c0, sel.profile.levels.back()));
    os << fmt::format("envelope slope: {}\n", sel.envelope_slope);

    if (!opt.profile_text.empty()) {
        const planeflow::EntropyProfile user = planeflow::parse_profile(opt.profile_text);
        os << fmt::format("user profile admissible: {}\n",
                          planeflow::is_admissible_profile(user) ? "yes" : "no");
        for (std::size_t n = 1; n < user.levels.size(); ++n) {
            os << fmt::format("user profile jump {}: {}\n", n,
                              planeflow::acceleration_jump(user.levels[n - 1], user.levels[n]));
        }
    }

    if (!opt.gammas.empty()) {
        const double T = std::isnan(opt.T) ? t1 + 25.0 * kPi : opt.T;
        for (const double gamma : opt.gammas) {
            if (!(gamma > 0.0)) {
                throw std::invalid_argument("--gamma entries must be positive");
            }
            const double HT = planeflow::friction_limit_probe(x0, y0, gamma, T, opt.h);
            os << fmt::format("friction gamma={}: terminal entropy {} (|H-1| = {})\n", gamma,
                              HT, std::abs(HT - 1.0));
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
    double R = 2.0;
    double k = 0.0;
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    double tol = std::numeric_limits<double>::quiet_NaN();
    std::string out = "-";
};

int cmd_verify(const VerifyOptions& opt) {
    const planeflow::DomainSpec spec{opt.R, 0.05, opt.seed};
    const planeflow::ResidualReport report = planeflow::verify_fields(spec, opt.k, opt.samples);

    bool ok = true;
    const auto tolerances = planeflow::default_tolerances();
    for (const auto& [name, value] : report.residuals) {
        const double tol = std::isnan(opt.tol) ? tolerances.at(name) : opt.tol;
        if (!(value < tol)) {
            ok = false;
            std::cerr << fmt::format("residual {} = {} exceeds tolerance {}\n", name, value,
                                     tol);
        }
    }
    Output out = open_output(opt.out);
    *out.stream << report.to_json() << "\n";
    return ok ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// generator
// ---------------------------------------------------------------------------

struct GeneratorOptions {
    std::string G;
    std::string w;
    double D = 1.0;
    std::uint64_t seed = 1;
    std::size_t samples = 200;
    std::string out = "-";
};

int cmd_generator(const GeneratorOptions& opt) {
    const planeflow::GeneratorSpec spec = planeflow::GeneratorSpec::make(opt.G, opt.w, opt.D);

    std::mt19937_64 rng(opt.seed);
    const auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };

    double conservation_max = 0.0;
    double continuity_max = 0.0;
    std::size_t used = 0;
    std::size_t attempts = 0;
    while (used < opt.samples && attempts < opt.samples * 100) {
        ++attempts;
        const double x = uniform(0.1, 3.0);
        const double y = uniform(-2.0, 2.0);
        double wv;
        try {
            wv = spec.w.eval(x, y);
        } catch (const planeflow::eval_error&) {
            continue;
        }
        if (!std::isfinite(wv) || std::abs(wv) < 0.05) {
            continue;
        }
        double cons, cont;
        try {
            const planeflow::Vec2 vel = planeflow::velocity_from_generator(spec, x, y);
            const double scale = std::abs(spec.Gx.eval(x, y) * vel.x) +
                                 std::abs(spec.Gy.eval(x, y) * vel.y);
            if (scale > 1e3) {
                continue; // rounding of the exact cancellation would dominate
            }
            cons = planeflow::conservation_residual(spec, x, y);
            cont = planeflow::continuity_residual_generic(spec, x, y);
        } catch (const planeflow::eval_error&) {
            continue;
        }
        if (!std::isfinite(cons) || !std::isfinite(cont)) {
            continue;
        }
        conservation_max = std::max(conservation_max, std::abs(cons));
        continuity_max = std::max(continuity_max, std::abs(cont));
        ++used;
    }
    if (used < opt.samples) {
        throw std::invalid_argument(
            "the sampled window [0.1,3]x[-2,2] does not support this G/w pair");
    }

    // Exactness of the recovered pressure gradient on a closed loop.
    std::vector<planeflow::Vec2> loop;
    for (int i = 0; i <= 64; ++i) {
        const double s = 2.0 * kPi * (i % 64) / 64.0;
        loop.push_back({1.5 + 0.5 * std::cos(s), 0.75 + 0.5 * std::sin(s)});
    }
    const double loop_residual = planeflow::pressure_loop_residual(spec, loop);

    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["G"] = opt.G;
    j["w"] = opt.w;
    j["D"] = opt.D;
    j["samples"] = used;
    j["conservation_max"] = conservation_max;
    j["continuity_max"] = continuity_max;
    j["pressure_loop_residual"] = loop_residual;
    // A rotational recovered gradient means no single-valued pressure exists;
    // that is a property of the pair, reported rather than gated on.
    j["pressure_single_valued"] = loop_residual < 1e-8;

    const bool ok = conservation_max < 1e-12 && continuity_max < 1e-10;
    j["pass"] = ok;

    Output out = open_output(opt.out);
    *out.stream << j.dump(2) << "\n";
    if (!ok) {
        std::cerr << "generator checks exceeded tolerances\n";
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// emit-figure
// ---------------------------------------------------------------------------

struct FigureOptions {
    std::string id;
    std::string out = "-";
};

void emit_phase_portrait(std::ostream& os) {
    os << "c,s,x,y\n";
    for (double c : {1.0, 1.3, 1.6, 1.9, 2.2}) {
        for (int i = 0; i <= 512; ++i) {
            const double s = 2.0 * kPi * i / 512.0;
            os << fmt::format("{},{},{},{}\n", c, s, c * (1.0 + std::cos(s)),
                              c * std::sin(s));
        }
    }
}

void emit_region(std::ostream& os) {
    const double R = 2.0;
    os << "curve,phi,x,y\n";
    for (int i = 0; i <= 512; ++i) {
        const double phi = -kPi + 2.0 * kPi * i / 512.0;
        os << fmt::format("inner,{},{},{}\n", phi, 1.0 + std::cos(phi), std::sin(phi));
    }
    for (int i = 0; i <= 512; ++i) {
        const double phi = -kPi + 2.0 * kPi * i / 512.0;
        os << fmt::format("outer,{},{},{}\n", phi, R * (1.0 + std::cos(phi)),
                          R * std::sin(phi));
    }
}

void emit_profiles(std::ostream& os) {
    const planeflow::OrbitParams params = planeflow::orbit_params_from_initial(0.5, 1.125);
    const double t1 = planeflow::first_arrival_time(params);
    os << "profile,t,e\n";
    const auto staircase = [&os, t1](const char* name, const std::vector<double>& levels) {
        double t = 0.0;
        for (std::size_t n = 0; n < levels.size(); ++n) {
            const double t_next = n == 0 ? t1 : t + 2.0 * kPi;
            os << fmt::format("{},{},{}\n", name, t, levels[n]);
            os << fmt::format("{},{},{}\n", name, t_next, levels[n]);
            t = t_next;
        }
    };
    staircase("arbitrary", {1.515625, 1.4, 1.1, 1.0, 1.25});
    staircase("maximal-rate", {1.515625, 1.0, 1.0, 1.0, 1.0});
}

void emit_trajectories(std::ostream& os) {
    const std::vector<std::pair<double, double>> ics = {
        {0.5, 1.125}, {3.0, 0.0}, {1.0, 2.0}, {2.5, 1.0}};
    os << "series,t,x,y\n";
    for (std::size_t idx = 0; idx < ics.size(); ++idx) {
        const planeflow::TrajectoryLog log =
            planeflow::integrate(ics[idx].first, ics[idx].second, {1e-4, 8.0 * kPi});
        for (std::size_t i = 0; i < log.samples.size(); i += 10) {
            const planeflow::Sample& s = log.samples[i];
            os << fmt::format("{},{},{},{}\n", idx, s.t, s.x, s.y);
        }
    }
}

void emit_near_origin(std::ostream& os) {
    os << "h,t,x,y\n";
    for (double h : {2.5e-4, 5e-4, 1e-3}) {
        const planeflow::TrajectoryLog log = planeflow::integrate(0.5, 1.125, {h, 2.0 * kPi});
        for (const planeflow::Sample& s : log.samples) {
            if (std::hypot(s.x, s.y) < 0.1) {
                os << fmt::format("{},{},{},{}\n", h, s.t, s.x, s.y);
            }
        }
    }
}

void emit_entropy(std::ostream& os) {
    const planeflow::TrajectoryLog log = planeflow::integrate(0.5, 1.125, {1e-4, 8.0 * kPi});
    os << "t,H\n";
    for (std::size_t i = 0; i < log.samples.size(); i += 10) {
        os << fmt::format("{},{}\n", log.samples[i].t, log.samples[i].H);
    }
}

void emit_error(std::ostream& os) {
    const planeflow::TrajectoryLog log = planeflow::integrate(0.5, 1.125, {1e-4, 8.0 * kPi});
    const std::vector<double> crossings = planeflow::detect_origin_crossings(log);
    // The deviation from the terminal level is meaningful after the switch.
    const double t1 =
        planeflow::first_arrival_time(planeflow::orbit_params_from_initial(0.5, 1.125));
    os << "t,err\n";
    for (std::size_t i = 0; i < log.samples.size(); i += 10) {
        const planeflow::Sample& s = log.samples[i];
        if (s.t >= t1) {
            os << fmt::format("{},{}\n", s.t, s.H - 1.0);
        }
    }
}

void emit_explicit_euler(std::ostream& os) {
    const planeflow::TrajectoryLog log =
        planeflow::integrate(0.5, 1.125, {1e-4, 10.0, planeflow::Scheme::Explicit});
    os << "t,x,y\n";
    for (std::size_t i = 0; i < log.samples.size(); i += 10) {
        const planeflow::Sample& s = log.samples[i];
        os << fmt::format("{},{},{}\n", s.t, s.x, s.y);
    }
}

int cmd_emit_figure(const FigureOptions& opt) {
    using Emitter = void (*)(std::ostream&);
    static const std::map<std::string, Emitter> emitters = {
        {"phase-portrait", emit_phase_portrait},
        {"region", emit_region},
        {"profiles", emit_profiles},
        {"trajectories", emit_trajectories},
        {"near-origin", emit_near_origin},
        {"entropy", emit_entropy},
        {"error", emit_error},
        {"explicit-euler", emit_explicit_euler},
    };
    const auto it = emitters.find(opt.id);
    if (it == emitters.end()) {
        std::string known;
        for (const auto& [name, fn] : emitters) {
            (void)fn;
            known += known.empty() ? name : ", " + name;
        }
        throw std::invalid_argument(
            fmt::format("unknown figure id '{}' (known: {})", opt.id, known));
    }
    Output out = open_output(opt.out);
    it->second(*out.stream);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plane-flow trajectory experiments and field verification"};
    app.require_subcommand(1);
    // --h is a step-size option below, so the help flag loses its short form.
    app.set_help_flag("--help", "Print help");
    std::string config_path;

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Integrate the two-branch oscillator and write a CSV log");
    simulate->set_help_flag("--help", "Print help");
    simulate->add_option("--config", config_path,
                      "Flat key=value configuration file (flags override it)");
    simulate->add_option("--ic", sim.ic, "Initial condition X,Y")->delimiter(',');
    simulate->add_option("--h", sim.h, "Step size");
    simulate->add_option("--T", sim.T, "Final time");
    simulate->add_option("--scheme", sim.scheme, "symplectic | explicit");
    simulate->add_option("--gamma", sim.gamma, "Friction coefficient");
    simulate->add_option("--out", sim.out, "Output CSV path ('-' for stdout)");

    SelectOptions sel;
    CLI::App* select = app.add_subcommand(
        "select", "Report the admissible profile and optional friction probes");
    select->set_help_flag("--help", "Print help");
    select->add_option("--config", config_path,
                      "Flat key=value configuration file (flags override it)");
    select->add_option("--ic", sel.ic, "Initial condition X,Y")->delimiter(',');
    select->add_option("--gamma", sel.gammas, "Friction coefficients for probes")
        ->delimiter(',');
    select->add_option("--T", sel.T, "Probe horizon (default: first arrival + 25 pi)");
    select->add_option("--h", sel.h, "Probe step size");
    select->add_option("--profile", sel.profile_text,
                       "User profile 't1; c0, c1, ...' to diagnose");
    select->add_option("--out", sel.out, "Output path ('-' for stdout)");

    VerifyOptions ver;
    CLI::App* verify = app.add_subcommand(
        "verify", "Run the field residual sweeps and write a JSON report");
    verify->set_help_flag("--help", "Print help");
    verify->add_option("--config", config_path,
                      "Flat key=value configuration file (flags override it)");
    verify->add_option("--R", ver.R, "Outer radius parameter (> 1)");
    verify->add_option("--k", ver.k, "Stress-family parameter");
    verify->add_option("--seed", ver.seed, "Sampling seed");
    verify->add_option("--samples", ver.samples, "Sample count per region");
    verify->add_option("--tol", ver.tol, "Override every residual tolerance");
    verify->add_option("--out", ver.out, "Output JSON path ('-' for stdout)");

    GeneratorOptions gen;
    CLI::App* generator = app.add_subcommand(
        "generator", "Check a conserved-quantity/weight pair and write a report");
    generator->set_help_flag("--help", "Print help");
    generator->add_option("--config", config_path,
                      "Flat key=value configuration file (flags override it)");
    generator->add_option("--G", gen.G, "Conserved quantity G(x, y)")->required();
    generator->add_option("--w", gen.w, "Weight w(x, y)")->required();
    generator->add_option("--D", gen.D, "Density constant (rho = D / w)");
    generator->add_option("--seed", gen.seed, "Sampling seed");
    generator->add_option("--samples", gen.samples, "Sample count");
    generator->add_option("--out", gen.out, "Output JSON path ('-' for stdout)");

    FigureOptions fig;
    CLI::App* figure = app.add_subcommand("emit-figure", "Write a plot-ready CSV dataset");
    figure->set_help_flag("--help", "Print help");
    figure->add_option("--config", config_path,
                      "Flat key=value configuration file (flags override it)");
    figure
        ->add_option("id", fig.id,
                     "phase-portrait | region | profiles | trajectories | near-origin | "
                     "entropy | error | explicit-euler")
        ->required();
    figure->add_option("--out", fig.out, "Output CSV path ('-' for stdout)");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim);
        }
        if (select->parsed()) {
            return cmd_select(sel);
        }
        if (verify->parsed()) {
            return cmd_verify(ver);
        }
        if (generator->parsed()) {
            return cmd_generator(gen);
        }
        if (figure->parsed()) {
            return cmd_emit_figure(fig);
        }
    } catch (const planeflow::parse_error& e) {
        std::cerr << fmt::format("error: {} (column {})\n", e.what(), e.column());
        return kExitConfig;
    } catch (const planeflow::integration_error& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kExitIntegration;
    } catch (const planeflow::singularity_error& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kExitConfig;
    } catch (const planeflow::eval_error& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
