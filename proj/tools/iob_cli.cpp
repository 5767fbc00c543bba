// Command-line front end: hysteresis, spectrum, peaks, dynamics, verify.
// Talks to the library only through the C interface.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iob/iob.h"
#include "output.hpp"

namespace {

using iob_cli::Cell;
using iob_cli::Document;
using json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_branch_absent = 4;
constexpr std::size_t max_grid_points = 1000000;

struct Failure : std::runtime_error
{
    Failure(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
    int exit_code;
};

Failure config_error(const std::string& msg)
{
    return Failure(exit_config, msg);
}

void check(iob_status s, const char* what)
{
    if (s == IOB_OK) return;
    const std::string msg = std::string(what) + ": " + iob_last_error();
    switch (s) {
    case IOB_ERR_INVALID_ARGUMENT:
    case IOB_ERR_INCONSISTENT_MECHANISM:
        throw Failure(exit_config, msg);
    case IOB_ERR_BRANCH_ABSENT:
        throw Failure(exit_branch_absent, msg);
    default:
        throw Failure(exit_numerical, msg);
    }
}

struct RunConfig
{
    double gamma = 1.0;
    double delta = 0.0;
    double zeta_l = 0.0;
    double zeta_m = 0.0;
    std::string mechanism;
    std::string omega;
    std::string branch = "lower";
    std::string nu_grid;
    std::string format = "csv";
    std::string out;
    std::string normalize = "none";
    std::uint64_t seed = 1;
    bool verbose = false;

    // dynamics
    std::string sweep;
    double ramp_rate = 1e-3;
    double t_end = 50.0;
    std::size_t samples = 501;
    std::string start = "ground";
    double perturb = 0.0;

    // verify
    bool inject_printed_b2 = false;
};

double parse_number(const std::string& s)
{
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw config_error("not a finite number: '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (true) {
        const std::size_t pos = s.find(sep, begin);
        parts.push_back(s.substr(begin, pos - begin));
        if (pos == std::string::npos) break;
        begin = pos + 1;
    }
    return parts;
}

/// "x" or "start:end:count"
std::vector<double> parse_grid(const std::string& spec, const char* name)
{
    const auto parts = split(spec, ':');
    try {
        if (parts.size() == 1) return {parse_number(parts[0])};
        if (parts.size() != 3) throw config_error("expected start:end:count");
        const double a = parse_number(parts[0]);
        const double b = parse_number(parts[1]);
        const double n = parse_number(parts[2]);
        if (n != std::floor(n) || n < 2 || n > static_cast<double>(max_grid_points)) {
            throw config_error("count must be an integer in [2, 1000000]");
        }
        if (!(b > a)) throw config_error("end must exceed start");
        const auto count = static_cast<std::size_t>(n);
        std::vector<double> g(count);
        for (std::size_t k = 0; k < count; ++k) {
            g[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1);
        }
        return g;
    } catch (const Failure& f) {
        throw config_error(std::string("bad ") + name + " grid '" + spec + "': " + f.what());
    }
}

double parse_scalar(const std::string& spec, const char* name)
{
    const auto g = parse_grid(spec, name);
    if (g.size() != 1) throw config_error(std::string(name) + " must be a single value");
    return g[0];
}

iob_mechanism parse_mechanism(const std::string& s)
{
    if (s == "lorentz") return IOB_MECH_LORENTZ;
    if (s == "detuning") return IOB_MECH_DETUNING;
    if (s == "joint") return IOB_MECH_JOINT;
    throw config_error("unknown mechanism '" + s + "'");
}

const char* mechanism_name(iob_mechanism m)
{
    switch (m) {
    case IOB_MECH_LORENTZ:
        return "lorentz";
    case IOB_MECH_DETUNING:
        return "detuning";
    case IOB_MECH_JOINT:
        return "joint";
    }
    return "?";
}

iob_branch parse_branch(const std::string& s)
{
    if (s == "lower") return IOB_BRANCH_LOWER;
    if (s == "middle") return IOB_BRANCH_MIDDLE;
    if (s == "upper") return IOB_BRANCH_UPPER;
    throw config_error("unknown branch '" + s + "'");
}

iob_mechanism mechanism_of(const RunConfig& c)
{
    if (!c.mechanism.empty()) return parse_mechanism(c.mechanism);
    if (c.zeta_l > 0.0 && c.zeta_m > 0.0) return IOB_MECH_JOINT;
    if (c.zeta_m > 0.0) return IOB_MECH_DETUNING;
    return IOB_MECH_LORENTZ;
}

iob_params params_of(const RunConfig& c, double omega = 0.0)
{
    iob_params p = iob_default_params();
    p.gamma = c.gamma;
    p.delta = c.delta;
    p.omega = omega;
    p.zeta_lorentz = c.zeta_l;
    p.zeta_detuning = c.zeta_m;
    return p;
}

void describe(Document& doc, const RunConfig& c, const char* command, iob_mechanism m)
{
    doc.set("format_version", 1);
    doc.set("build", iob_version());
    doc.set("command", command);
    doc.set("units", "frequencies in units of gamma");
    doc.set("gamma", c.gamma);
    doc.set("delta", c.delta);
    doc.set("zeta_lorentz", c.zeta_l);
    doc.set("zeta_detuning", c.zeta_m);
    doc.set("mechanism", mechanism_name(m));
    if (m == IOB_MECH_JOINT) doc.set("experimental", "joint mechanism");
}

using Solutions = std::vector<iob_solution>;

Solutions solutions_at(const iob_params& p, iob_mechanism m)
{
    Solutions s(3);
    std::size_t n = 0;
    check(iob_steady_states(&p, m, s.data(), s.size(), &n), "steady state");
    s.resize(n);
    return s;
}

double abs_omega_eff(const iob_solution& s)
{
    return std::hypot(s.omega_eff_re, s.omega_eff_im);
}

Document cmd_hysteresis(const RunConfig& c)
{
    if (c.omega.empty()) throw config_error("--omega grid is required");
    const auto grid = parse_grid(c.omega, "omega");
    const iob_mechanism m = mechanism_of(c);
    const iob_params p = params_of(c);
    check(iob_validate_params(&p, m), "parameters");

    iob_scan* raw = nullptr;
    check(iob_scan_create(&p, m, grid.data(), grid.size(), &raw), "scan");
    const std::unique_ptr<iob_scan, decltype(&iob_scan_destroy)> scan(raw, iob_scan_destroy);

    Document doc;
    describe(doc, c, "hysteresis", m);
    doc.set("omega_grid", c.omega);
    int found = 0;
    int warn = 0;
    double up = 0.0;
    double down = 0.0;
    check(iob_scan_thresholds(scan.get(), &found, &up, &down, &warn), "thresholds");
    doc.set("bistable", found != 0);
    doc.set("omega_up", found ? json(up) : json(nullptr));
    doc.set("omega_down", found ? json(down) : json(nullptr));
    doc.set("range_warning", warn != 0);
    doc.set("branch_codes", "0=lower 1=middle 2=upper");
    if (warn && c.verbose) std::cerr << "warning: a fold lies at an end of the omega range\n";

    doc.columns = {"omega", "branch", "W", "rho22", "stable", "marginal", "abs_omega_eff",
                   "delta_eff"};
    Solutions buf(3);
    for (std::size_t i = 0; i < iob_scan_size(scan.get()); ++i) {
        double omega = 0.0;
        std::size_t n = 0;
        check(iob_scan_point(scan.get(), i, &omega, buf.data(), buf.size(), &n), "scan point");
        for (std::size_t k = 0; k < n; ++k) {
            const auto& s = buf[k];
            doc.rows.push_back({omega, double(s.branch), s.w, s.rho22, double(s.stable),
                                double(s.marginal), abs_omega_eff(s), s.delta_eff});
        }
    }
    return doc;
}

Document cmd_spectrum(const RunConfig& c)
{
    if (c.omega.empty()) throw config_error("--omega value is required");
    const double omega = parse_scalar(c.omega, "omega");
    std::vector<double> nu;
    if (!c.nu_grid.empty()) nu = parse_grid(c.nu_grid, "nu");
    if (c.normalize != "none" && c.normalize != "free-atom-max") {
        throw config_error("--normalize must be none or free-atom-max");
    }
    const iob_mechanism m = mechanism_of(c);
    const iob_branch b = parse_branch(c.branch);
    const iob_params p = params_of(c, omega);
    check(iob_validate_params(&p, m), "parameters");

    iob_spectrum* raw = nullptr;
    check(iob_spectrum_create(&p, m, b, nu.empty() ? nullptr : nu.data(), nu.size(), &raw),
          "spectrum");
    const std::unique_ptr<iob_spectrum, decltype(&iob_spectrum_destroy)> spec(
        raw, iob_spectrum_destroy);
    iob_spectrum_info info{};
    check(iob_spectrum_get_info(spec.get(), &info), "spectrum info");

    const double scale =
        c.normalize == "free-atom-max" ? iob_free_atom_saturation_max(c.gamma) : 1.0;

    Document doc;
    describe(doc, c, "spectrum", m);
    doc.set("omega", omega);
    doc.set("branch", c.branch);
    doc.set("unstable", info.unstable != 0);
    doc.set("W", info.state.w);
    doc.set("rho22", info.state.rho22);
    doc.set("rho12_re", info.state.rho12_re);
    doc.set("rho12_im", info.state.rho12_im);
    doc.set("abs_omega_eff", abs_omega_eff(info.state));
    doc.set("delta_eff", info.state.delta_eff);
    doc.set("elastic_weight", info.elastic_weight);
    doc.set("nu_p", info.has_sidebands ? json(info.nu_p) : json(nullptr));
    const auto& k = info.coefficients;
    doc.set("a", k.a);
    doc.set("a0", k.a0);
    doc.set("b4", k.b4);
    doc.set("b2", k.b2);
    doc.set("b0", k.b0);
    doc.set("nu_p_sq", k.nu_p_sq);
    doc.set("gamma6", k.gamma6);
    doc.set("normalization", c.normalize);
    doc.set("normalization_factor", scale);

    doc.columns = {"nu", "density"};
    const double* x = iob_spectrum_nu(spec.get());
    const double* y = iob_spectrum_density(spec.get());
    for (std::size_t i = 0; i < iob_spectrum_size(spec.get()); ++i) {
        doc.rows.push_back({x[i], y[i] / scale});
    }
    return doc;
}

Document cmd_peaks(const RunConfig& c)
{
    if (c.omega.empty()) throw config_error("--omega grid is required");
    const auto grid = parse_grid(c.omega, "omega");

    struct Series
    {
        double code;
        iob_mechanism mech;
        iob_params params;
    };
    std::vector<Series> series;
    std::vector<std::string> names;
    const std::string list = c.mechanism.empty() ? mechanism_name(mechanism_of(c)) : c.mechanism;
    for (const auto& name : split(list, ',')) {
        const iob_mechanism m = parse_mechanism(name);
        iob_params p = params_of(c);
        // each single mechanism sees only its own feedback parameter
        if (m == IOB_MECH_LORENTZ) p.zeta_detuning = 0.0;
        if (m == IOB_MECH_DETUNING) p.zeta_lorentz = 0.0;
        check(iob_validate_params(&p, m), "parameters");
        series.push_back({double(m), m, p});
        names.push_back(name);
    }
    iob_params free = params_of(c);
    free.zeta_lorentz = 0.0;
    free.zeta_detuning = 0.0;
    series.push_back({3.0, IOB_MECH_LORENTZ, free});

    Document doc;
    describe(doc, c, "peaks", IOB_MECH_LORENTZ);
    for (auto& [key, value] : doc.meta) {
        if (key == "mechanism") value = list;
    }
    for (const auto& s : series) {
        if (s.mech == IOB_MECH_JOINT) doc.set("experimental", "joint mechanism");
    }
    doc.set("omega_grid", c.omega);
    doc.set("series_codes", "0=lorentz 1=detuning 2=joint 3=free-atom");
    doc.set("branch_codes", "0=lower 1=middle 2=upper");
    doc.columns = {"omega", "series", "branch", "stable", "rho22", "nu_minus", "nu_plus"};

    for (double omega : grid) {
        for (const auto& s : series) {
            iob_params p = s.params;
            p.omega = omega;
            for (const auto& sol : solutions_at(p, s.mech)) {
                iob_spectrum_coefficients k{};
                const double o2 = sol.omega_eff_re * sol.omega_eff_re +
                                  sol.omega_eff_im * sol.omega_eff_im;
                check(iob_spectrum_coefficients_eval(o2, sol.delta_eff, c.gamma, &k),
                      "coefficients");
                Cell minus;
                Cell plus;
                if (k.nu_p_sq > 0.0) {
                    plus = std::sqrt(k.nu_p_sq);
                    minus = -*plus;
                }
                doc.rows.push_back({omega, s.code, double(sol.branch), double(sol.stable),
                                    sol.rho22, minus, plus});
            }
        }
    }
    return doc;
}

Document trajectory_document(const RunConfig& c, iob_mechanism m, const iob_trajectory* t,
                             const char* mode)
{
    Document doc;
    describe(doc, c, "dynamics", m);
    doc.set("mode", mode);
    doc.columns = {"t", "omega", "u", "v", "W", "rho22"};
    for (std::size_t i = 0; i < iob_trajectory_size(t); ++i) {
        double time = 0.0;
        double omega = 0.0;
        iob_bloch_state s{};
        check(iob_trajectory_sample(t, i, &time, &s, &omega), "trajectory");
        doc.rows.push_back({time, omega, s.u, s.v, s.w, 0.5 * (1.0 - s.w)});
    }
    return doc;
}

Document cmd_dynamics(const RunConfig& c)
{
    const iob_mechanism m = mechanism_of(c);
    using Handle = std::unique_ptr<iob_trajectory, decltype(&iob_trajectory_destroy)>;

    if (!c.sweep.empty()) {
        const auto ends = split(c.sweep, ':');
        if (ends.size() != 2) throw config_error("--sweep expects start:end");
        const double a = parse_number(ends[0]);
        const double b = parse_number(ends[1]);
        const iob_params p = params_of(c, a);
        check(iob_validate_params(&p, m), "parameters");
        iob_trajectory* raw = nullptr;
        check(iob_sweep(&p, m, a, b, c.ramp_rate, &raw), "sweep");
        const Handle t(raw, iob_trajectory_destroy);

        Document doc = trajectory_document(c, m, t.get(), "sweep");
        doc.set("sweep", c.sweep);
        doc.set("ramp_rate", c.ramp_rate);
        json jumps = json::array();
        for (std::size_t i = 0; i < iob_trajectory_jump_count(t.get()); ++i) {
            jumps.push_back(iob_trajectory_jump(t.get(), i));
        }
        doc.set("jumps", jumps);
        doc.set("non_adiabatic", iob_trajectory_non_adiabatic(t.get()) != 0);
        doc.set("max_manifold_distance", iob_trajectory_manifold_distance(t.get()));
        if (iob_trajectory_non_adiabatic(t.get())) {
            std::cerr << "warning: sweep left the stable manifold by more than 0.05\n";
        }
        return doc;
    }

    if (c.omega.empty()) throw config_error("--omega or --sweep is required");
    const double omega = parse_scalar(c.omega, "omega");
    const iob_params p = params_of(c, omega);
    check(iob_validate_params(&p, m), "parameters");
    if (c.samples < 2) throw config_error("--samples must be at least 2");

    iob_bloch_state s0{0.0, 0.0, 1.0};
    if (c.start != "ground") {
        const iob_branch b = parse_branch(c.start);
        bool present = false;
        for (const auto& s : solutions_at(p, m)) {
            if (s.branch == b) {
                s0 = {2.0 * s.rho12_re, 2.0 * s.rho12_im, s.w};
                present = true;
            }
        }
        if (!present) throw Failure(exit_branch_absent, c.start + " branch absent at this omega");
    }
    s0.w += c.perturb;

    iob_trajectory* raw = nullptr;
    check(iob_integrate(&s0, &p, m, c.t_end, c.samples, 1e-9, 1e-11, &raw), "integration");
    const Handle t(raw, iob_trajectory_destroy);
    Document doc = trajectory_document(c, m, t.get(), "relaxation");
    doc.set("omega", omega);
    doc.set("start", c.start);
    doc.set("perturb", c.perturb);
    doc.set("t_end", c.t_end);
    if (c.verbose) {
        const std::size_t n = iob_trajectory_size(t.get());
        for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 10)) {
            std::cerr << "t = " << doc.rows[i][0].value() << "  W = " << doc.rows[i][4].value()
                      << '\n';
        }
    }
    return doc;
}

Document cmd_verify(const RunConfig& c, bool& all_passed)
{
    iob_verify_report* raw = nullptr;
    check(iob_verify_run(c.seed, c.inject_printed_b2 ? 1 : 0, &raw), "verify");
    const std::unique_ptr<iob_verify_report, decltype(&iob_verify_destroy)> report(
        raw, iob_verify_destroy);

    Document doc;
    doc.set("format_version", 1);
    doc.set("build", iob_version());
    doc.set("command", "verify");
    doc.set("seed", c.seed);
    doc.set("inject_printed_b2", c.inject_printed_b2);
    json names = json::array();
    doc.columns = {"check", "passed", "max_deviation", "tolerance"};
    for (std::size_t i = 0; i < iob_verify_count(report.get()); ++i) {
        const char* name = nullptr;
        int passed = 0;
        double dev = 0.0;
        double tol = 0.0;
        check(iob_verify_check(report.get(), i, &name, &passed, &dev, &tol), "verify");
        names.push_back(name);
        doc.rows.push_back({double(i), double(passed), dev, tol});
        std::cerr << (passed ? "PASS " : "FAIL ") << name << "  max_deviation=" << dev
                  << "  tolerance=" << tol << '\n';
    }
    all_passed = iob_verify_all_passed(report.get()) != 0;
    doc.set("checks", names);
    doc.set("all_passed", all_passed);
    return doc;
}

void add_medium_options(CLI::App* cmd, RunConfig& c)
{
    cmd->add_option("--gamma", c.gamma, "decay rate (frequency unit)");
    cmd->add_option("--delta", c.delta, "bare detuning");
    cmd->add_option("--zeta-l", c.zeta_l, "Lorentz local-field parameter");
    cmd->add_option("--zeta-m", c.zeta_m, "excitation-dependent detuning parameter");
    cmd->add_option("--mechanism", c.mechanism, "lorentz | detuning | joint");
}

void add_output_options(CLI::App* cmd, RunConfig& c)
{
    cmd->add_option("--format", c.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out, "output path (default stdout)");
    cmd->add_option("--seed", c.seed, "seed for randomized parameter sets");
    cmd->add_flag("-v,--verbose", c.verbose, "diagnostics on stderr");
}

void emit(const Document& doc, const RunConfig& c)
{
    const std::string text = c.format == "json" ? doc.to_json() : doc.to_csv();
    if (c.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Failure(exit_config, "cannot open output file " + c.out);
    f << text;
    if (!f) throw Failure(exit_numerical, "failed writing " + c.out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Intrinsic optical bistability and resonance fluorescence of a dense "
                 "two-level medium"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* hyst = app.add_subcommand("hysteresis", "steady-state excitation over an omega grid");
    add_medium_options(hyst, cfg);
    hyst->add_option("--omega", cfg.omega, "omega grid start:end:count");
    add_output_options(hyst, cfg);

    auto* spec = app.add_subcommand("spectrum", "inelastic emission spectrum on one branch");
    add_medium_options(spec, cfg);
    spec->add_option("--omega", cfg.omega, "Rabi frequency");
    spec->add_option("--branch", cfg.branch, "lower | middle | upper");
    spec->add_option("--nu-grid", cfg.nu_grid, "frequency grid start:end:count");
    spec->add_option("--normalize", cfg.normalize, "none | free-atom-max");
    add_output_options(spec, cfg);

    auto* peaks = app.add_subcommand("peaks", "satellite positions over an omega grid");
    add_medium_options(peaks, cfg);
    peaks->add_option("--omega", cfg.omega, "omega grid start:end:count");
    add_output_options(peaks, cfg);

    auto* dyn = app.add_subcommand("dynamics", "time-domain Bloch trajectories");
    add_medium_options(dyn, cfg);
    dyn->add_option("--omega", cfg.omega, "constant Rabi frequency for a relaxation run");
    dyn->add_option("--sweep", cfg.sweep, "ramp drive start:end");
    dyn->add_option("--ramp-rate", cfg.ramp_rate, "|dOmega/dt| in gamma^2");
    dyn->add_option("--t-end", cfg.t_end, "duration of a relaxation run (1/gamma)");
    dyn->add_option("--samples", cfg.samples, "samples of a relaxation run");
    dyn->add_option("--start", cfg.start, "ground | lower | middle | upper");
    dyn->add_option("--perturb", cfg.perturb, "offset added to the starting W");
    add_output_options(dyn, cfg);

    auto* ver = app.add_subcommand("verify", "run the internal consistency checks");
    ver->add_flag("--inject-printed-b2", cfg.inject_printed_b2,
                  "use the uncorrected 16|Omega|^2 term in b2 (fault injection)");
    add_output_options(ver, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (hyst->parsed()) {
            emit(cmd_hysteresis(cfg), cfg);
        } else if (spec->parsed()) {
            emit(cmd_spectrum(cfg), cfg);
        } else if (peaks->parsed()) {
            emit(cmd_peaks(cfg), cfg);
        } else if (dyn->parsed()) {
            emit(cmd_dynamics(cfg), cfg);
        } else if (ver->parsed()) {
            bool ok = false;
            const Document doc = cmd_verify(cfg, ok);
            emit(doc, cfg);
            return ok ? exit_ok : exit_verify_failed;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.what() << '\n';
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}
