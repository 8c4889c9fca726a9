// cli.hpp: run descriptors, file formats and the command implementations behind the
// giantmol executable. Argument parsing lives in tools/ so this header only needs the
// JSON library.

#pragma once

#include "giantmol/analysis.hpp"
#include "giantmol/closedform.hpp"
#include "giantmol/errors.hpp"
#include "giantmol/model.hpp"
#include "giantmol/realspace.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace giantmol::cli {

inline constexpr std::string_view kToolName = "giantmol";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::size_t kMaxSteps = 10'000'000;

enum class Command { Spectrum, Map, Peaks, Fano, Verify };
enum class MapAxis { Theta0Pi, G };
enum class VariantChoice { Auto, General, Equal };
enum class Format { Csv, Json };

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2, kIo = 3 };

inline std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::Spectrum: return "spectrum";
        case Command::Map: return "map";
        case Command::Peaks: return "peaks";
        case Command::Fano: return "fano";
        case Command::Verify: return "verify";
    }
    return "?";
}

inline std::optional<Command> parse_command(std::string_view s) noexcept {
    for (Command c : {Command::Spectrum, Command::Map, Command::Peaks, Command::Fano, Command::Verify})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

inline std::string_view to_string(MapAxis a) noexcept { return a == MapAxis::G ? "g" : "theta0-pi"; }

struct OutputSpec {
    std::string path;  // empty or "-" writes to standard output
    Format format = Format::Csv;
    std::string plot_script;  // optional path of a generated plotting script

    bool to_stdout() const noexcept { return path.empty() || path == "-"; }
};

// Parameters the verify command draws at random unless fixed on the command line.
struct VerifyOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
    std::optional<Topology> config;
    std::optional<double> gamma1, gamma2, g, kappa, theta0_pi, tau, delta;
};

struct RunDescriptor {
    Command command = Command::Spectrum;
    Configuration config{};
    SystemParams params{};
    VariantChoice variant = VariantChoice::Auto;
    SweepGrid grid{};
    MapAxis axis2 = MapAxis::Theta0Pi;
    SweepGrid grid2{0.0, 2.0, 201};
    analysis::ExtremaOptions extrema{};
    OutputSpec output{};
    VerifyOptions verify{};
    unsigned threads = 1;
};

// ---- formatting ---------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s, const std::string& flag) {
    const std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size()) throw InvalidParams(flag, "not a number: '" + str + "'");
    return v;
}

inline std::string grid_to_string(const SweepGrid& g) {
    return format_double(g.delta_min) + ":" + format_double(g.delta_max) + ":" + std::to_string(g.steps);
}

inline SweepGrid parse_grid(std::string_view s, const std::string& flag) {
    const auto a = s.find(':');
    const auto b = a == std::string_view::npos ? a : s.find(':', a + 1);
    if (b == std::string_view::npos || s.find(':', b + 1) != std::string_view::npos)
        throw InvalidParams(flag, "grid must be min:max:steps");
    SweepGrid g;
    g.delta_min = parse_double(s.substr(0, a), flag);
    g.delta_max = parse_double(s.substr(a + 1, b - a - 1), flag);
    const auto steps = s.substr(b + 1);
    std::uint64_t n = 0;
    const auto [p, ec] = std::from_chars(steps.data(), steps.data() + steps.size(), n);
    if (ec != std::errc{} || p != steps.data() + steps.size()) throw InvalidParams(flag, "steps must be an integer");
    if (n < 2 || n > kMaxSteps) throw InvalidParams(flag, "steps must lie in [2, 10000000]");
    g.steps = static_cast<std::size_t>(n);
    if (!std::isfinite(g.delta_min) || !std::isfinite(g.delta_max)) throw InvalidParams(flag, "grid bounds must be finite");
    if (!(g.delta_min < g.delta_max)) throw InvalidParams(flag, "grid requires min < max");
    return g;
}

inline FormulaVariant resolve_variant(VariantChoice c, const SystemParams& p) {
    switch (c) {
        case VariantChoice::General: return FormulaVariant::GeneralGamma;
        case VariantChoice::Equal:
            if (!p.equal_gamma()) throw IncompatibleVariant("--variant equal requires gamma1 == gamma2");
            return FormulaVariant::EqualGamma;
        case VariantChoice::Auto: break;
    }
    return closedform::default_variant(p);
}

// Worker count: hardware concurrency, capped by GIANTMOL_THREADS when set.
inline unsigned thread_budget() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GIANTMOL_THREADS")) {
        unsigned cap = 0;
        const std::string_view s(env);
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
        if (ec == std::errc{} && p == s.data() + s.size() && cap > 0) n = std::min(n, cap);
    }
    return n;
}

// ---- metadata -----------------------------------------------------------------------

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string_view to_string(VariantChoice c) noexcept {
    switch (c) {
        case VariantChoice::General: return "general";
        case VariantChoice::Equal: return "equal";
        case VariantChoice::Auto: break;
    }
    return "auto";
}

inline std::optional<VariantChoice> parse_variant_choice(std::string_view s) noexcept {
    for (VariantChoice c : {VariantChoice::Auto, VariantChoice::General, VariantChoice::Equal})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

namespace detail {

inline void describe_verify(Metadata& m, const VerifyOptions& v, VariantChoice variant) {
    m.emplace_back("config", v.config ? std::string(to_string(*v.config)) : "all");
    m.emplace_back("variant", std::string(to_string(variant)));
    m.emplace_back("samples", std::to_string(v.samples));
    m.emplace_back("seed", std::to_string(v.seed));
    m.emplace_back("tolerance", format_double(v.tolerance));
    auto fixed = [&](const char* key, const std::optional<double>& x) {
        if (x) m.emplace_back(std::string("fixed_") + key, format_double(*x));
    };
    fixed("gamma1", v.gamma1);
    fixed("gamma2", v.gamma2);
    fixed("g", v.g);
    fixed("kappa", v.kappa);
    fixed("theta0_pi", v.theta0_pi);
    fixed("tau", v.tau);
    fixed("delta", v.delta);
}

}  // namespace detail

inline Metadata describe(const RunDescriptor& d) {
    Metadata m{
        {"tool", std::string(kToolName) + " " + std::string(kToolVersion)},
        {"command", std::string(to_string(d.command))},
    };
    if (d.command == Command::Verify) {
        detail::describe_verify(m, d.verify, d.variant);
        return m;
    }
    const auto& p = d.params;
    m.insert(m.end(), {
        {"config", std::string(to_string(d.config.kind))},
        {"gamma1", format_double(p.gamma1)},
        {"gamma2", format_double(p.gamma2)},
        {"g", format_double(p.g)},
        {"kappa", format_double(p.kappa)},
        {"theta0_pi", format_double(p.phase.theta0_over_pi)},
        {"tau", format_double(p.phase.tau)},
        {"markovian", p.phase.markovian ? "true" : "false"},
        {"variant", std::string(to_string(resolve_variant(d.variant, p)))},
        {"delta", grid_to_string(d.grid)},
    });
    if (d.command == Command::Map) {
        m.emplace_back("axis2", std::string(to_string(d.axis2)));
        m.emplace_back("axis2_grid", grid_to_string(d.grid2));
    }
    if (d.command == Command::Peaks) {
        m.emplace_back("scan_points", std::to_string(d.extrema.scan_points));
        m.emplace_back("root_tol", format_double(d.extrema.root_tol));
    }
    return m;
}

inline void write_metadata(std::ostream& os, const Metadata& m) {
    for (const auto& [k, v] : m) os << "# " << k << '=' << v << '\n';
}

namespace detail {

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw InvalidParams(key, "expected true or false");
}

inline std::size_t parse_size(const std::string& s, const std::string& key) {
    std::uint64_t n = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || p != s.data() + s.size()) throw InvalidParams(key, "expected an integer");
    return static_cast<std::size_t>(n);
}

}  // namespace detail

// Rebuilds the descriptor that produced a file from its '#' header. Unknown keys and data
// rows are ignored; output destination is not part of the header.
inline RunDescriptor parse_metadata(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("# ", 0) != 0) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(2, eq - 2)] = line.substr(eq + 1);
    }
    auto need = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw InvalidParams(k, "missing from metadata header");
        return it->second;
    };
    RunDescriptor d;
    const auto cmd = parse_command(need("command"));
    if (!cmd) throw InvalidParams("command", "unknown command in metadata");
    d.command = *cmd;
    if (d.command == Command::Verify) {
        const auto& c = need("config");
        if (c != "all") {
            const auto topo = parse_topology(c);
            if (!topo) throw InvalidParams("--config", "unknown configuration in metadata");
            d.verify.config = *topo;
        }
        const auto v = parse_variant_choice(need("variant"));
        if (!v) throw InvalidParams("--variant", "unknown variant in metadata");
        d.variant = *v;
        d.verify.samples = detail::parse_size(need("samples"), "--samples");
        d.verify.seed = detail::parse_size(need("seed"), "--seed");
        d.verify.tolerance = parse_double(need("tolerance"), "--tolerance");
        auto fixed = [&](const char* key, std::optional<double>& x) {
            auto it = kv.find(std::string("fixed_") + key);
            if (it != kv.end()) x = parse_double(it->second, key);
        };
        fixed("gamma1", d.verify.gamma1);
        fixed("gamma2", d.verify.gamma2);
        fixed("g", d.verify.g);
        fixed("kappa", d.verify.kappa);
        fixed("theta0_pi", d.verify.theta0_pi);
        fixed("tau", d.verify.tau);
        fixed("delta", d.verify.delta);
        return d;
    }
    const auto topo = parse_topology(need("config"));
    if (!topo) throw InvalidParams("--config", "unknown configuration in metadata");
    d.config = Configuration::of(*topo);
    d.params.gamma1 = parse_double(need("gamma1"), "--gamma1");
    d.params.gamma2 = parse_double(need("gamma2"), "--gamma2");
    d.params.g = parse_double(need("g"), "--g");
    d.params.kappa = parse_double(need("kappa"), "--kappa");
    d.params.phase.theta0_over_pi = parse_double(need("theta0_pi"), "--theta0-pi");
    d.params.phase.tau = parse_double(need("tau"), "--tau");
    d.params.phase.markovian = detail::parse_bool(need("markovian"), "markovian");
    const auto& v = need("variant");
    if (v == to_string(FormulaVariant::EqualGamma)) d.variant = VariantChoice::Equal;
    else if (v == to_string(FormulaVariant::GeneralGamma)) d.variant = VariantChoice::General;
    else throw InvalidParams("--variant", "unknown variant in metadata");
    d.grid = parse_grid(need("delta"), "--delta");
    if (kv.count("axis2")) {
        const auto& a = kv["axis2"];
        if (a == "g") d.axis2 = MapAxis::G;
        else if (a == "theta0-pi") d.axis2 = MapAxis::Theta0Pi;
        else throw InvalidParams("--axis2", "unknown axis in metadata");
    }
    if (kv.count("axis2_grid")) d.grid2 = parse_grid(kv["axis2_grid"], "--axis2-grid");
    if (kv.count("scan_points")) d.extrema.scan_points = detail::parse_size(kv["scan_points"], "--scan-points");
    if (kv.count("root_tol")) d.extrema.root_tol = parse_double(kv["root_tol"], "--root-tol");
    if (d.command == Command::Peaks || d.command == Command::Fano) d.output.format = Format::Json;
    return d;
}

// ---- spectrum -----------------------------------------------------------------------

inline Spectrum run_spectrum(const RunDescriptor& d) {
    d.params.validate();
    return closedform::sweep(d.config, d.params, resolve_variant(d.variant, d.params), d.grid, {d.threads});
}

inline std::string join_indices(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

inline void write_spectrum_csv(std::ostream& os, const RunDescriptor& d, const Spectrum& s) {
    Metadata m = describe(d);
    m.emplace_back("oracle_fallbacks", std::to_string(s.oracle_fallbacks.size()));
    if (!s.oracle_fallbacks.empty()) m.emplace_back("oracle_fallback_rows", join_indices(s.oracle_fallbacks));
    m.emplace_back("nudged", std::to_string(s.nudged.size()));
    if (!s.nudged.empty()) {
        m.emplace_back("nudged_rows", join_indices(s.nudged));
        m.emplace_back("nudge", format_double(closedform::kNudge));
    }
    write_metadata(os, m);
    os << "delta,re_t,im_t,re_r,im_r,T,R,theta\n";
    for (const auto& pt : s.points) {
        os << format_double(pt.delta) << ',' << format_double(pt.t.real()) << ',' << format_double(pt.t.imag())
           << ',' << format_double(pt.r.real()) << ',' << format_double(pt.r.imag()) << ',' << format_double(pt.T)
           << ',' << format_double(pt.R) << ',' << format_double(phase_shift(s.params, pt.delta)) << '\n';
    }
}

// ---- map ----------------------------------------------------------------------------

struct MapResult {
    SweepGrid axis1;
    SweepGrid axis2;
    std::vector<std::vector<double>> R;  // R[j][i]: axis2 index j, delta index i
    std::size_t oracle_fallbacks = 0;
    std::size_t nudged = 0;
};

inline SystemParams map_params(const RunDescriptor& d, double v) {
    SystemParams p = d.params;
    if (d.axis2 == MapAxis::G) p.g = v;
    else p.phase.theta0_over_pi = v;
    return p;
}

inline MapResult run_map(const RunDescriptor& d) {
    d.grid2.validate();
    d.params.validate();
    MapResult out{d.grid, d.grid2, {}, 0, 0};
    out.R.reserve(d.grid2.steps);
    for (std::size_t j = 0; j < d.grid2.steps; ++j) {
        const SystemParams p = map_params(d, d.grid2.at(j));
        const Spectrum s = closedform::sweep(d.config, p, resolve_variant(d.variant, p), d.grid, {d.threads});
        std::vector<double> row(s.points.size());
        std::transform(s.points.begin(), s.points.end(), row.begin(), [](const ScatterPoint& q) { return q.R; });
        out.R.push_back(std::move(row));
        out.oracle_fallbacks += s.oracle_fallbacks.size();
        out.nudged += s.nudged.size();
    }
    return out;
}

inline void write_map_csv(std::ostream& os, const RunDescriptor& d, const MapResult& m) {
    Metadata meta = describe(d);
    meta.emplace_back("oracle_fallbacks", std::to_string(m.oracle_fallbacks));
    meta.emplace_back("nudged", std::to_string(m.nudged));
    write_metadata(os, meta);
    os << "delta," << (d.axis2 == MapAxis::G ? "g" : "theta0_pi") << ",R\n";
    for (std::size_t i = 0; i < m.axis1.steps; ++i) {
        const std::string x = format_double(m.axis1.at(i));
        for (std::size_t j = 0; j < m.axis2.steps; ++j)
            os << x << ',' << format_double(m.axis2.at(j)) << ',' << format_double(m.R[j][i]) << '\n';
    }
}

// ---- peaks / fano -------------------------------------------------------------------

using nlohmann::json;

inline json metadata_json(const Metadata& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json extremum_json(const analysis::Extremum& e) {
    json j{{"delta", e.delta}, {"R_at", e.R}, {"verified", e.verified}};
    j["radicand"] = std::isfinite(e.radicand) ? json(e.radicand) : json(nullptr);
    j["branch"] = e.branch;
    return j;
}

inline std::string_view peaks_method(const RunDescriptor& d) {
    if (!d.params.equal_gamma()) return "numerical-scan";
    return d.params.phase.markovian ? "markovian-closed-form" : "transcendental-roots";
}

inline analysis::PeakReport run_peaks(const RunDescriptor& d) {
    d.params.validate();
    const auto method = peaks_method(d);
    if (method == "markovian-closed-form") return analysis::markovian_peaks(d.config, d.params);
    if (method == "transcendental-roots")
        return analysis::nonmarkovian_extrema(d.config, d.params, {d.grid.delta_min, d.grid.delta_max}, d.extrema);
    return analysis::numerical_extrema(run_spectrum(d));
}

inline json peaks_json(const RunDescriptor& d, const analysis::PeakReport& r) {
    json j;
    j["metadata"] = metadata_json(describe(d));
    j["method"] = std::string(peaks_method(d));
    j["condition_met"] = r.condition_met;
    j["radicand"] = optional_json(r.radicand);
    j["separation"] = optional_json(r.separation);
    j["verified_peaks"] = r.verified_count();
    j["peaks"] = json::array();
    for (const auto& e : r.peaks) j["peaks"].push_back(extremum_json(e));
    const auto dip = r.dip();
    j["dip"] = dip ? json{{"delta", dip->delta}, {"R_at", dip->R}} : json(nullptr);
    j["dips"] = json::array();
    for (const auto& e : r.dips) j["dips"].push_back(extremum_json(e));
    return j;
}

inline json fano_json(const RunDescriptor& d) {
    d.params.validate();
    const auto f = analysis::fano_components(d.config, d.params);
    json j;
    j["metadata"] = metadata_json(describe(d));
    j["lambda_plus"] = f.lambda_plus;
    j["lambda_minus"] = f.lambda_minus;
    j["gamma_plus"] = f.gamma_plus;
    j["gamma_minus"] = f.gamma_minus;
    j["q_plus"] = f.q_plus;
    j["q_minus"] = f.q_minus;
    j["c_plus"] = f.c_plus;
    j["c_minus"] = f.c_minus;
    j["center_plus"] = f.center_plus();
    j["center_minus"] = f.center_minus();
    j["q_shift_plus"] = f.q_shift_plus;
    j["q_shift_minus"] = f.q_shift_minus;
    j["c_shift_plus"] = f.c_shift_plus;
    j["c_shift_minus"] = f.c_shift_minus;
    const bool finite_ratio = f.gamma_minus > 0.0 && f.gamma_plus > 0.0;
    j["width_ratio"] = finite_ratio ? json(f.width_ratio()) : json(nullptr);
    j["decomposition_residual"] = analysis::fano_decomposition_residual(d.config, d.params, d.grid);
    try {
        const auto a = analysis::fano_approximation(f);
        const auto [lo, hi] = a.window();
        j["approximation"] = {{"narrow", a.upper ? "minus" : "plus"}, {"center", a.center}, {"width", a.width},
                              {"q", a.q}, {"c", a.c}, {"ratio", a.ratio}, {"fano_regime", a.ratio >= 15.0},
                              {"window", {lo, hi}}};
    } catch (const NotApplicable&) {
        j["approximation"] = nullptr;
    }
    return j;
}

// ---- verify -------------------------------------------------------------------------

struct VerifySample {
    Configuration config{};
    SystemParams params{};
    double delta = 0.0;
};

struct VerifyReport {
    std::size_t samples = 0;
    double max_rel_error = 0.0;
    std::optional<VerifySample> worst;
    std::optional<VerifySample> first_failure;
    bool passed() const noexcept { return !first_failure; }
};

inline double relative_error(const closedform::Amplitudes& a, const realspace::InternalAmplitudes& o) {
    const double num = std::sqrt(std::norm(a.t - o.t()) + std::norm(a.r - o.r()));
    const double den = std::sqrt(std::norm(o.t()) + std::norm(o.r()));
    return den > 0.0 ? num / den : num;
}

// Relative amplitude error between the closed form and the linear-system solve at one
// sample. Where the linear system is singular both sides move by the same nudge.
inline double sample_error(const VerifySample& s, VariantChoice choice) {
    const FormulaVariant v = resolve_variant(choice, s.params);
    double delta = s.delta;
    realspace::InternalAmplitudes o;
    try {
        o = realspace::solve_amplitudes(s.config, s.params, delta);
    } catch (const SingularSystem&) {
        delta += closedform::kNudge;
        o = realspace::solve_amplitudes(s.config, s.params, delta);
    }
    const auto e = closedform::evaluate(s.config, s.params, v, delta).point;
    return relative_error({e.t, e.r}, o);
}

inline std::vector<VerifySample> draw_samples(const VerifyOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> pick_config(0, 2);
    std::uniform_int_distribution<int> pick_tau(0, 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<VerifySample> out;
    out.reserve(o.samples);
    for (std::size_t k = 0; k < o.samples; ++k) {
        // Every draw is consumed even when fixed, so fixing one parameter leaves the others' streams intact.
        const int c = pick_config(rng);
        const double gamma2 = 0.2 + 4.8 * u01(rng);
        const double g = 5.0 * u01(rng);
        const double th = 2.0 * u01(rng);
        const double tau = pick_tau(rng) ? 2.0 : 0.0;
        const double delta = -20.0 + 40.0 * u01(rng);
        VerifySample s;
        s.config = Configuration::of(o.config.value_or(all_configurations[static_cast<std::size_t>(c)].kind));
        s.params.gamma1 = o.gamma1.value_or(1.0);
        s.params.gamma2 = o.gamma2.value_or(gamma2);
        s.params.g = o.g.value_or(g);
        s.params.kappa = o.kappa.value_or(0.0);
        s.params.phase.theta0_over_pi = o.theta0_pi.value_or(th);
        s.params.phase.tau = o.tau.value_or(tau);
        s.params.phase.markovian = s.params.phase.tau == 0.0;
        s.delta = o.delta.value_or(delta);
        s.params.validate();
        out.push_back(s);
    }
    return out;
}

inline VerifyReport run_verify(const RunDescriptor& d) {
    if (d.verify.samples < 1) throw InvalidParams("--samples", "must be >= 1");
    VerifyReport rep;
    for (const auto& s : draw_samples(d.verify)) {
        double err = sample_error(s, d.variant);
        if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
        ++rep.samples;
        if (!rep.worst || err > rep.max_rel_error) {
            rep.max_rel_error = err;
            rep.worst = s;
        }
        if (!(err <= d.verify.tolerance) && !rep.first_failure) rep.first_failure = s;
    }
    return rep;
}

inline std::string reproduce_command(const VerifySample& s, double tolerance) {
    const auto& p = s.params;
    std::string cmd = std::string(kToolName) + " verify --samples 1";
    cmd += " --config " + std::string(to_string(s.config.kind));
    cmd += " --gamma1 " + format_double(p.gamma1);
    cmd += " --gamma2 " + format_double(p.gamma2);
    cmd += " --g " + format_double(p.g);
    cmd += " --kappa " + format_double(p.kappa);
    cmd += " --theta0-pi " + format_double(p.phase.theta0_over_pi);
    cmd += " --tau " + format_double(p.phase.tau);
    cmd += " --at-delta " + format_double(s.delta);
    cmd += " --tolerance " + format_double(tolerance);
    return cmd;
}

inline void write_verify_report(std::ostream& os, const RunDescriptor& d, const VerifyReport& r) {
    Metadata m = describe(d);
    m.emplace_back("max_rel_error", format_double(r.max_rel_error));
    m.emplace_back("status", r.passed() ? "PASS" : "FAIL");
    if (r.first_failure) m.emplace_back("first_failure", reproduce_command(*r.first_failure, d.verify.tolerance));
    write_metadata(os, m);
    os << "max relative amplitude error " << format_double(r.max_rel_error) << " over " << r.samples
       << " samples (tolerance " << format_double(d.verify.tolerance) << "): " << (r.passed() ? "PASS" : "FAIL") << '\n';
    if (r.first_failure) os << "reproduce: " << reproduce_command(*r.first_failure, d.verify.tolerance) << '\n';
}

// ---- plot script --------------------------------------------------------------------

inline std::string plot_script(const RunDescriptor& d) {
    const std::string csv = d.output.to_stdout() ? "spectrum.csv" : d.output.path;
    std::ostringstream py;
    py << "import sys\n"
          "import numpy as np\n"
          "import matplotlib.pyplot as plt\n\n"
       << "path = sys.argv[1] if len(sys.argv) > 1 else " << json(csv).dump() << "\n"
       << "data = np.genfromtxt(path, delimiter=',', comments='#', names=True)\n";
    if (d.command == Command::Map) {
        const std::string y = d.axis2 == MapAxis::G ? "g" : "theta0_pi";
        py << "x = np.unique(data['delta'])\n"
           << "y = np.unique(data['" << y << "'])\n"
           << "R = data['R'].reshape(len(x), len(y)).T\n"
           << "plt.pcolormesh(x, y, R, shading='auto', vmin=0, vmax=1)\n"
           << "plt.colorbar(label='R')\n"
           << "plt.xlabel('delta')\n"
           << "plt.ylabel('" << y << "')\n";
    } else {
        py << "plt.plot(data['delta'], data['T'], label='T')\n"
              "plt.plot(data['delta'], data['R'], label='R')\n"
              "plt.xlabel('delta')\n"
              "plt.legend()\n";
    }
    py << "plt.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
    return py.str();
}

// ---- dispatch -----------------------------------------------------------------------

inline void write_output(const RunDescriptor& d, std::ostream& out, const std::string& body) {
    if (d.output.to_stdout()) {
        out << body;
    } else {
        std::ofstream f(d.output.path, std::ios::binary);
        if (!f) throw IoError("cannot open output file '" + d.output.path + "'");
        f << body;
        if (!f.flush()) throw IoError("failed writing '" + d.output.path + "'");
    }
    if (!d.output.plot_script.empty()) {
        std::ofstream f(d.output.plot_script, std::ios::binary);
        if (!f) throw IoError("cannot open plot script '" + d.output.plot_script + "'");
        f << plot_script(d);
        if (!f.flush()) throw IoError("failed writing '" + d.output.plot_script + "'");
    }
}

// Produces the command's output text. Verification outcome is reported through `passed`.
inline std::string render(const RunDescriptor& d, bool* passed = nullptr) {
    std::ostringstream os;
    if (passed) *passed = true;
    switch (d.command) {
        case Command::Spectrum: {
            const Spectrum s = run_spectrum(d);
            if (d.output.format == Format::Json) {
                json j;
                j["metadata"] = metadata_json(describe(d));
                j["points"] = json::array();
                for (const auto& p : s.points)
                    j["points"].push_back({p.delta, p.t.real(), p.t.imag(), p.r.real(), p.r.imag(), p.T, p.R,
                                           phase_shift(s.params, p.delta)});
                j["oracle_fallback_rows"] = s.oracle_fallbacks;
                j["nudged_rows"] = s.nudged;
                os << j.dump(2) << '\n';
            } else {
                write_spectrum_csv(os, d, s);
            }
            break;
        }
        case Command::Map: write_map_csv(os, d, run_map(d)); break;
        case Command::Peaks: os << peaks_json(d, run_peaks(d)).dump(2) << '\n'; break;
        case Command::Fano: os << fano_json(d).dump(2) << '\n'; break;
        case Command::Verify: {
            const VerifyReport r = run_verify(d);
            if (passed) *passed = r.passed();
            write_verify_report(os, d, r);
            break;
        }
    }
    return os.str();
}

// Runs a descriptor end to end and maps library errors onto exit codes.
inline int execute(const RunDescriptor& d, std::ostream& out, std::ostream& err) {
    try {
        bool passed = true;
        const std::string body = render(d, &passed);
        write_output(d, out, body);
        if (d.command == Command::Verify && !d.output.to_stdout()) out << body.substr(body.rfind("max relative"));
        return passed ? kOk : kVerifyFailed;
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const NotApplicable& e) {
        err << "error: not applicable: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace giantmol::cli
