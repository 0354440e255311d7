// lce: simulate escape ensembles, evaluate the spectral asymptotics, analyze
// ensembles and run the verification gate.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lce/lce.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using clock_type = std::chrono::steady_clock;

double elapsed(clock_type::time_point t0) { return std::chrono::duration<double>(clock_type::now() - t0).count(); }

lce::FieldSpec make_field(double alpha, double omega) {
    try {
        return lce::FieldSpec(alpha, omega);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--alpha/--omega: ") + e.what());
    }
}

// Writes to `path`, or to stdout when the path is "-".
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    lce::io::write_file(path, body);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    const auto slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
    double alpha = 0.9;
    double omega = 15.0;
    double eps = 1e-3;
    std::size_t n = 1000;
    double dt = 1e-4;
    std::uint64_t seed = 42;
    double x0 = -0.5;
    double y0 = 0.0;
    std::optional<double> tmax;
    std::string out = "-";
};

int cmd_simulate(const SimulateArgs& a) {
    const auto t0 = clock_type::now();
    const auto field = make_field(a.alpha, a.omega);
    lce::SimConfig cfg;
    cfg.eps = a.eps;
    cfg.dt = a.dt;
    cfg.x0 = {a.x0, a.y0};
    cfg.n_trajectories = a.n;
    cfg.master_seed = a.seed;
    if (!(a.eps > 0.0)) throw ConfigError("--eps must be positive");
    if (std::norm(cfg.x0) >= 1.0) throw ConfigError("--x0/--y0 must lie inside the unit disk");
    if (a.n == 0) throw ConfigError("--n must be positive");
    cfg.t_max = a.tmax ? *a.tmax : lce::verify::default_t_max(field, a.eps);
    try {
        cfg.validate(field);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto result = lce::run_ensemble(field, cfg);
    lce::io::RunManifest m;
    m.command = "simulate";
    lce::io::describe_simulation(m, field, cfg);
    m.outputs = {a.out};
    m.set("censored_fraction", lce::io::format_real(result.censored_fraction()));
    m.duration_seconds = elapsed(t0);
    emit(a.out, [&](std::ostream& os) { lce::io::write_ensemble(os, result.records, m); });
    std::cerr << "simulated " << result.records.size() << " trajectories in " << lce::io::format_real(m.duration_seconds)
              << " s; censored fraction " << lce::io::format_real(result.censored_fraction()) << '\n';
    return exit_ok;
}

// ------------------------------------------------------------------ spectrum

struct SpectrumArgs {
    double alpha = 0.9;
    double omega = 15.0;
    double eps = 1e-3;
    int nmax = 3;
    int mmax = 3;
    std::size_t grid = 4096;
    std::string out = "-";
};

int cmd_spectrum(const SpectrumArgs& a) {
    const auto t0 = clock_type::now();
    const auto field = make_field(a.alpha, a.omega);
    if (a.grid < lce::min_boundary_grid) {
        throw ConfigError("--grid must be at least " + std::to_string(lce::min_boundary_grid));
    }
    if (!(a.eps > 0.0)) throw ConfigError("--eps must be positive");
    if (a.nmax < 1 || a.mmax < 0) throw ConfigError("--nmax must be >= 1 and --mmax >= 0");
    lce::SpectrumOptions opt;
    opt.grid = a.grid;
    opt.n_max = a.nmax;
    opt.m_max = a.mmax;
    const auto an = lce::compute_spectrum(field, a.eps, opt);

    lce::io::RunManifest m;
    m.command = "spectrum";
    m.set("alpha", field.alpha());
    m.set("omega", field.omega());
    m.set("eps", a.eps);
    m.set("nmax", std::to_string(a.nmax));
    m.set("mmax", std::to_string(a.mmax));
    m.set("grid", std::to_string(a.grid));
    m.outputs = {a.out};
    m.duration_seconds = elapsed(t0);
    emit(a.out, [&](std::ostream& os) { lce::io::write_spectrum(os, an, m); });
    return exit_ok;
}

// -------------------------------------------------------------- exit-density

struct ExitDensityArgs {
    double alpha = 0.9;
    double omega = 15.0;
    std::size_t grid = 1024;
    bool closed_form = false;
    std::string out = "-";
};

int cmd_exit_density(const ExitDensityArgs& a) {
    const auto t0 = clock_type::now();
    const auto field = make_field(a.alpha, a.omega);
    if (a.grid < lce::min_boundary_grid) {
        throw ConfigError("--grid must be at least " + std::to_string(lce::min_boundary_grid));
    }
    lce::ExitDensity d;
    if (a.closed_form) {
        d = lce::exit_density_closed_form(field.alpha(), lce::sample_boundary(field, a.grid).theta);
    } else {
        const auto bd = lce::sample_boundary(field, a.grid);
        d = lce::exit_density(bd, lce::solve_bernoulli_periodic(bd));
    }
    lce::io::RunManifest m;
    m.command = "exit-density";
    m.set("alpha", field.alpha());
    m.set("omega", field.omega());
    m.set("grid", std::to_string(a.grid));
    m.set("closed_form", std::string(a.closed_form ? "true" : "false"));
    m.outputs = {a.out};
    m.duration_seconds = elapsed(t0);
    emit(a.out, [&](std::ostream& os) { lce::io::write_exit_density(os, d, m); });
    return exit_ok;
}

// ------------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string in;
    std::size_t bins = 200;
    std::optional<double> omega;
    std::string out = "-";
    bool svg = false;
};

void write_svgs(const std::string& base, const lce::AnalysisReport& rep, const std::optional<double>& alpha,
                std::span<const lce::ExitRecord> records) {
    using lce::svg::Series;
    const auto& h = rep.window_histogram;
    Series hist{"histogram", {}, h.normalized_density, "#1f77b4", true};
    Series model{"two-exponential fit", {}, {}, "#d62728", false};
    for (std::size_t i = 0; i < h.bins(); ++i) {
        hist.x.push_back(h.bin_edges[i]);
        model.x.push_back(h.center(i));
        model.y.push_back(lce::two_exponential_model(rep.fit, h.center(i)));
    }
    lce::io::write_file(with_suffix(base, "_histogram.svg"), [&](std::ostream& os) {
        os << lce::svg::plot({hist, model}, {"Exit-time density", "t", "density"});
    });

    Series surv{"survival", {}, {}, "#1f77b4", true};
    for (const auto& p : rep.survival) {
        surv.x.push_back(p.t);
        surv.y.push_back(p.fraction);
    }
    lce::svg::PlotOptions so{"Survival probability", "t", "fraction surviving"};
    so.log_y = true;
    lce::io::write_file(with_suffix(base, "_survival.svg"), [&](std::ostream& os) { os << lce::svg::plot({surv}, so); });

    constexpr std::size_t bins = 64;
    const auto emp = lce::exit_angle_density(records, bins);
    Series e{"exit angles", {}, emp, "#1f77b4", true};
    for (std::size_t i = 0; i < bins; ++i) e.x.push_back(lce::two_pi * static_cast<double>(i) / bins);
    std::vector<Series> series{e};
    if (alpha) {
        std::vector<double> grid(512);
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = lce::two_pi * static_cast<double>(k) / grid.size();
        const auto cf = lce::exit_density_closed_form(*alpha, grid);
        series.push_back({"closed form", cf.theta, cf.density, "#d62728", false});
    }
    lce::io::write_file(with_suffix(base, "_exit_density.svg"),
                        [&](std::ostream& os) { os << lce::svg::plot(series, {"Exit-point density", "theta", "density"}); });
}

int cmd_analyze(const AnalyzeArgs& a) {
    const auto t0 = clock_type::now();
    std::ifstream in(a.in, std::ios::binary);
    if (!in) throw ConfigError("--in: cannot open '" + a.in + "'");
    lce::io::LoadedEnsemble loaded;
    try {
        loaded = lce::io::read_ensemble(in);
    } catch (const lce::io::FormatError& e) {
        throw ConfigError(std::string("--in: ") + e.what());
    }
    std::optional<lce::FieldSpec> field;
    try {
        field = loaded.field();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("--in: bad manifest: ") + e.what());
    }
    lce::AnalysisOptions opt;
    opt.bins = a.bins;
    if (a.omega) {
        opt.omega = *a.omega;
    } else if (field) {
        opt.omega = field->omega();
    } else {
        throw ConfigError("--omega is required when the input has no manifest");
    }
    if (!(opt.omega > 0.0)) throw ConfigError("--omega must be positive");
    if (a.bins < 50) throw ConfigError("--bins must be at least 50");
    std::optional<double> alpha;
    if (field) {
        alpha = field->alpha();
        opt.alpha = alpha;
    }

    lce::AnalysisReport rep;
    try {
        rep = lce::analyze_ensemble(loaded.records, opt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--in: ") + e.what());
    }

    lce::io::RunManifest m;
    m.command = "analyze";
    if (loaded.manifest.contains("master_seed")) m.master_seed = std::stoull(loaded.manifest.at("master_seed"));
    m.set("input", a.in);
    m.set("bins", std::to_string(a.bins));
    m.set("omega", opt.omega);
    if (alpha) m.set("alpha", *alpha);
    m.outputs = {a.out};
    if (a.out != "-") {
        m.outputs.push_back(with_suffix(a.out, "_histogram.csv"));
        m.outputs.push_back(with_suffix(a.out, "_survival.csv"));
    }
    m.duration_seconds = elapsed(t0);
    emit(a.out, [&](std::ostream& os) { lce::io::write_report(os, rep, m); });
    if (a.out != "-") {
        lce::io::write_file(with_suffix(a.out, "_histogram.csv"),
                            [&](std::ostream& os) { lce::io::write_histogram(os, rep.histogram, m); });
        lce::io::write_file(with_suffix(a.out, "_survival.csv"),
                            [&](std::ostream& os) { lce::io::write_survival(os, rep.survival, m); });
        if (a.svg) write_svgs(a.out, rep, alpha, loaded.records);
    }
    return exit_ok;
}

// -------------------------------------------------------------------- verify

int cmd_verify() {
    std::size_t failed = 0;
    const auto results = lce::verify::run_desk_checks([&](const lce::verify::CheckResult& r) {
        std::cout << lce::verify::format_line(r) << std::endl;
        if (!r.pass) ++failed;
    });
    std::cout << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed:");
    for (const auto& r : results) {
        if (!r.pass) std::cout << ' ' << r.id;
    }
    std::cout << '\n';
    return failed == 0 ? exit_ok : exit_verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Escape through a repelling limit cycle: simulation, spectral asymptotics and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lce::io::tool_version));

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run an Euler-Maruyama escape ensemble");
    simulate->add_option("--alpha", sim.alpha, "Focus displacement, |alpha| < 1")->capture_default_str();
    simulate->add_option("--omega", sim.omega, "Rotation rate, > 0")->capture_default_str();
    simulate->add_option("--eps", sim.eps, "Noise intensity")->capture_default_str();
    simulate->add_option("--n", sim.n, "Number of trajectories")->capture_default_str();
    simulate->add_option("--dt", sim.dt, "Time step (<= 1e-3 and <= 0.1/omega)")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simulate->add_option("--x0", sim.x0, "Initial x")->capture_default_str();
    simulate->add_option("--y0", sim.y0, "Initial y")->capture_default_str();
    simulate->add_option("--tmax", sim.tmax, "Per-trajectory time cap (default 200 x the spectral MFPT)");
    simulate->add_option("--out", sim.out, "Output file ('-' for stdout)")->capture_default_str();

    SpectrumArgs spec;
    auto* spectrum = app.add_subcommand("spectrum", "Evaluate the spectral asymptotics");
    spectrum->add_option("--alpha", spec.alpha)->capture_default_str();
    spectrum->add_option("--omega", spec.omega)->capture_default_str();
    spectrum->add_option("--eps", spec.eps)->capture_default_str();
    spectrum->add_option("--nmax", spec.nmax, "Largest ladder index n")->capture_default_str();
    spectrum->add_option("--mmax", spec.mmax, "Largest |m| in the ladder")->capture_default_str();
    spectrum->add_option("--grid", spec.grid, "Boundary grid size (>= 16)")->capture_default_str();
    spectrum->add_option("--out", spec.out)->capture_default_str();

    ExitDensityArgs ed;
    auto* exit_density = app.add_subcommand("exit-density", "Exit-point density on the circle");
    exit_density->add_option("--alpha", ed.alpha)->capture_default_str();
    exit_density->add_option("--omega", ed.omega)->capture_default_str();
    exit_density->add_option("--grid", ed.grid)->capture_default_str();
    exit_density->add_flag("--closed-form", ed.closed_form, "Use the Hopf closed form");
    exit_density->add_option("--out", ed.out)->capture_default_str();

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Analyze an ensemble file");
    analyze->add_option("--in", an.in, "Ensemble file")->required();
    analyze->add_option("--bins", an.bins, "Histogram bins")->capture_default_str();
    analyze->add_option("--omega", an.omega, "Rotation rate (default: from the file manifest)");
    analyze->add_option("--out", an.out, "Report file ('-' for stdout)")->capture_default_str();
    analyze->add_flag("--svg", an.svg, "Also write SVG plots next to the report");

    auto* verify = app.add_subcommand("verify", "Run the desk-scale verification gate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*spectrum) return cmd_spectrum(spec);
        if (*exit_density) return cmd_exit_density(ed);
        if (*analyze) return cmd_analyze(an);
        if (*verify) return cmd_verify();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const lce::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}
