// Command-line front end for spectrum, map, peaks, fano, verify.

#include "giantmol/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using namespace giantmol;
using namespace giantmol::cli;

struct Flags {
    std::string config;
    double gamma1 = 1.0, gamma2 = 1.0, g = 0.0, kappa = 0.0;
    double theta0_pi = 0.0, theta0_rad = 0.0, tau = 0.0, at_delta = 0.0;
    bool markovian = false;
    std::string variant = "auto";
    std::string delta;
    std::string axis2 = "theta0-pi";
    std::string axis2_grid = "0:2:201";
    std::string output = "-";
    std::string format;
    std::string plot_script;
    std::size_t scan_points = 2000;
    double root_tol = 1e-10;
    std::size_t samples = 1000;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
};

struct Options {
    CLI::Option* gamma1 = nullptr;
    CLI::Option* gamma2 = nullptr;
    CLI::Option* g = nullptr;
    CLI::Option* kappa = nullptr;
    CLI::Option* theta0_pi = nullptr;
    CLI::Option* theta0_rad = nullptr;
    CLI::Option* tau = nullptr;
    CLI::Option* config = nullptr;
    CLI::Option* delta = nullptr;
};

Options add_common(CLI::App* sub, Flags& f, bool sweep) {
    Options o;
    o.config = sub->add_option("--config", f.config, "separated | braided | nested");
    o.gamma1 = sub->add_option("--gamma1", f.gamma1, "decay rate of atom a (reference unit)");
    o.gamma2 = sub->add_option("--gamma2", f.gamma2, "decay rate of atom b");
    o.g = sub->add_option("--g", f.g, "direct inter-atom coupling");
    o.kappa = sub->add_option("--kappa", f.kappa, "atomic loss rate");
    o.theta0_pi = sub->add_option("--theta0-pi", f.theta0_pi, "phase shift theta0 in multiples of pi");
    o.theta0_rad = sub->add_option("--theta0-rad", f.theta0_rad, "phase shift theta0 in radians");
    o.theta0_pi->excludes(o.theta0_rad);
    o.tau = sub->add_option("--tau", f.tau, "propagation time between adjacent coupling points");
    sub->add_flag("--markovian", f.markovian, "ignore retardation even when tau > 0");
    sub->add_option("--variant", f.variant, "auto | general | equal");
    if (sweep) {
        o.delta = sub->add_option("--delta", f.delta, "detuning grid min:max:steps");
        sub->add_option("--output,-o", f.output, "output file, '-' for stdout");
        sub->add_option("--emit-plot-script", f.plot_script, "write a matplotlib script for the output");
    } else {
        sub->add_option("--output,-o", f.output, "output file, '-' for stdout");
    }
    return o;
}

Topology topology_flag(const std::string& s) {
    const auto t = parse_topology(s);
    if (!t) throw InvalidParams("--config", "expected separated, braided or nested, got '" + s + "'");
    return *t;
}

VariantChoice variant_flag(const std::string& s) {
    const auto v = parse_variant_choice(s);
    if (!v) throw InvalidParams("--variant", "expected auto, general or equal, got '" + s + "'");
    return *v;
}

RunDescriptor build(Command cmd, const Flags& f, const Options& o, const std::string& default_grid) {
    RunDescriptor d;
    d.command = cmd;
    d.variant = variant_flag(f.variant);
    d.threads = thread_budget();
    d.output.path = f.output;
    d.output.plot_script = f.plot_script;
    const double theta0_pi = o.theta0_rad->count() ? f.theta0_rad / pi : f.theta0_pi;

    if (cmd == Command::Verify) {
        auto& v = d.verify;
        v.samples = f.samples;
        v.seed = f.seed;
        v.tolerance = f.tolerance;
        if (o.config->count() && f.config != "all") v.config = topology_flag(f.config);
        if (o.gamma1->count()) v.gamma1 = f.gamma1;
        if (o.gamma2->count()) v.gamma2 = f.gamma2;
        if (o.g->count()) v.g = f.g;
        if (o.kappa->count()) v.kappa = f.kappa;
        if (o.theta0_pi->count() || o.theta0_rad->count()) v.theta0_pi = theta0_pi;
        if (o.tau->count()) v.tau = f.tau;
        return d;
    }

    d.config = Configuration::of(topology_flag(f.config.empty() ? "separated" : f.config));
    d.params.gamma1 = f.gamma1;
    d.params.gamma2 = f.gamma2;
    d.params.g = f.g;
    d.params.kappa = f.kappa;
    d.params.phase.theta0_over_pi = theta0_pi;
    d.params.phase.tau = f.tau;
    d.params.phase.markovian = f.markovian || f.tau == 0.0;
    d.params.validate();
    d.grid = parse_grid(f.delta.empty() ? default_grid : f.delta, "--delta");
    d.output.format = (cmd == Command::Peaks || cmd == Command::Fano || f.format == "json") ? Format::Json : Format::Csv;
    if (!f.format.empty() && f.format != "csv" && f.format != "json")
        throw InvalidParams("--format", "expected csv or json");
    if (cmd == Command::Map) {
        if (f.axis2 == "g") d.axis2 = MapAxis::G;
        else if (f.axis2 == "theta0-pi") d.axis2 = MapAxis::Theta0Pi;
        else throw InvalidParams("--axis2", "expected theta0-pi or g");
        d.grid2 = parse_grid(f.axis2_grid, "--axis2-grid");
        if (d.axis2 == MapAxis::G && d.grid2.delta_min < 0.0) throw InvalidParams("--axis2-grid", "g must be >= 0");
        if (d.axis2 == MapAxis::Theta0Pi && d.grid2.delta_min < 0.0)
            throw InvalidParams("--axis2-grid", "theta0 must be >= 0");
    }
    if (cmd == Command::Peaks) {
        d.extrema.scan_points = f.scan_points;
        d.extrema.root_tol = f.root_tol;
        if (f.scan_points < 2) throw InvalidParams("--scan-points", "must be >= 2");
        if (!(f.root_tol > 0.0)) throw InvalidParams("--root-tol", "must be > 0");
    }
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon scattering off a giant molecule in a waveguide"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Flags f;

    auto* spectrum = app.add_subcommand("spectrum", "T and R over a detuning grid (CSV)");
    const auto o_spectrum = add_common(spectrum, f, true);
    spectrum->add_option("--format", f.format, "csv | json");

    auto* map = app.add_subcommand("map", "R over detuning x (theta0 | g), long-format CSV");
    const auto o_map = add_common(map, f, true);
    map->add_option("--axis2", f.axis2, "theta0-pi | g");
    map->add_option("--axis2-grid", f.axis2_grid, "second axis grid min:max:steps");

    auto* peaks = app.add_subcommand("peaks", "complete-reflection peaks and dips (JSON)");
    const auto o_peaks = add_common(peaks, f, true);
    peaks->add_option("--scan-points", f.scan_points, "root scan grid size with retardation");
    peaks->add_option("--root-tol", f.root_tol, "bisection tolerance in delta");

    auto* fano = app.add_subcommand("fano", "two-Lorentzian decomposition and Fano parameters (JSON)");
    const auto o_fano = add_common(fano, f, true);

    auto* verify = app.add_subcommand("verify", "closed forms against the real-space linear system");
    const auto o_verify = add_common(verify, f, false);
    verify->add_option("--samples", f.samples, "number of random parameter draws");
    verify->add_option("--seed", f.seed, "PRNG seed");
    verify->add_option("--tolerance", f.tolerance, "maximum relative amplitude error");
    auto* at_delta = verify->add_option("--at-delta", f.at_delta, "fix the detuning of every draw");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    RunDescriptor d;
    try {
        if (spectrum->parsed()) d = build(Command::Spectrum, f, o_spectrum, "-20:20:2001");
        else if (map->parsed()) d = build(Command::Map, f, o_map, "-20:20:401");
        else if (peaks->parsed()) d = build(Command::Peaks, f, o_peaks, "-10:10:2001");
        else if (fano->parsed()) d = build(Command::Fano, f, o_fano, "-10:10:1001");
        else {
            d = build(Command::Verify, f, o_verify, "");
            if (at_delta->count()) d.verify.delta = f.at_delta;
        }
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return execute(d, std::cout, std::cerr);
}
