#pragma once

// Text formats: ensemble files, spectrum and analysis documents, two-column
// exports. Every file starts with manifest comment lines ("# key: value");
// dropping lines that begin with '#' leaves pure data. Reals are written with
// 12 significant digits, except manifest parameters, which carry 17 so a run
// can be reproduced exactly. Output is ASCII with LF line endings.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lce/analysis.hpp"
#include "lce/field_model.hpp"
#include "lce/sde_engine.hpp"
#include "lce/spectral.hpp"

namespace lce::io {

inline constexpr const char* tool_version = "1.0.0";

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline double parse_real(const std::string& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw FormatError("not a number: '" + text + "'");
    }
    if (used != text.size()) throw FormatError("not a number: '" + text + "'");
    return v;
}

struct RunManifest {
    std::string command;
    std::string version = tool_version;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;

    void set(const std::string& key, const std::string& value) {
        for (auto& [k, v] : parameters) {
            if (k == key) {
                v = value;
                return;
            }
        }
        parameters.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, format_exact(value)); }

    std::string comment_block() const {
        std::ostringstream os;
        os << "# tool: lce " << version << '\n';
        os << "# command: " << command << '\n';
        os << "# master_seed: " << master_seed << '\n';
        for (const auto& [k, v] : parameters) os << "# " << k << ": " << v << '\n';
        for (const auto& o : outputs) os << "# output: " << o << '\n';
        os << "# duration_s: " << format_real(duration_seconds) << '\n';
        return os.str();
    }
};

/// Manifest parameters for a simulation run.
inline void describe_simulation(RunManifest& m, const FieldSpec& field, const SimConfig& config) {
    m.master_seed = config.master_seed;
    m.set("alpha", field.alpha());
    m.set("omega", field.omega());
    if (field.identity_noise()) {
        m.set("noise", std::string("identity"));
    } else {
        const Mat2& a = field.noise();
        m.set("noise", format_exact(a.a11) + " " + format_exact(a.a12) + " " + format_exact(a.a21) + " " +
                           format_exact(a.a22));
    }
    m.set("eps", config.eps);
    m.set("dt", config.dt);
    m.set("x0", config.x0.real());
    m.set("y0", config.x0.imag());
    m.set("n", std::to_string(config.n_trajectories));
    m.set("t_max", config.t_max);
}

/// Key-value pairs from "# key: value" comment lines.
inline std::map<std::string, std::string> parse_comment_lines(const std::vector<std::string>& lines) {
    std::map<std::string, std::string> out;
    for (const auto& line : lines) {
        if (line.empty() || line[0] != '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const auto key = detail::trim(line.substr(1, colon - 1));
        const auto value = detail::trim(line.substr(colon + 1));
        if (!key.empty() && !out.contains(key)) out[key] = value;
    }
    return out;
}

// ---------------------------------------------------------------- ensembles

inline constexpr const char* ensemble_header = "trajectory_index,exit_time,exit_angle,winding,censored";

inline void write_ensemble(std::ostream& os, std::span<const ExitRecord> records, const RunManifest& manifest) {
    os << manifest.comment_block();
    os << ensemble_header << '\n';
    for (const auto& r : records) {
        os << r.trajectory_index << ',' << format_real(r.exit_time) << ',' << format_real(r.exit_angle) << ','
           << r.winding_number << ',' << (r.censored ? 1 : 0) << '\n';
    }
}

struct LoadedEnsemble {
    std::vector<ExitRecord> records;
    std::map<std::string, std::string> manifest;

    std::optional<FieldSpec> field() const {
        if (!manifest.contains("alpha") || !manifest.contains("omega")) return std::nullopt;
        std::string text = "alpha = " + manifest.at("alpha") + "\nomega = " + manifest.at("omega") + "\n";
        if (manifest.contains("noise")) text += "noise = " + manifest.at("noise") + "\n";
        return field_from_config_text(text);
    }
};

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(detail::trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline LoadedEnsemble read_ensemble(std::istream& is) {
    LoadedEnsemble out;
    std::vector<std::string> comments;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            comments.push_back(line);
            continue;
        }
        if (!header_seen) {
            if (line != ensemble_header) throw FormatError("ensemble file: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 5) throw FormatError("ensemble file line " + std::to_string(line_no) + ": expected 5 fields");
        ExitRecord r;
        try {
            r.trajectory_index = std::stoull(cells[0]);
            r.winding_number = static_cast<std::uint32_t>(std::stoul(cells[3]));
        } catch (const std::exception&) {
            throw FormatError("ensemble file line " + std::to_string(line_no) + ": bad integer field");
        }
        r.exit_time = parse_real(cells[1]);
        r.exit_angle = parse_real(cells[2]);
        if (cells[4] != "0" && cells[4] != "1") {
            throw FormatError("ensemble file line " + std::to_string(line_no) + ": censored must be 0 or 1");
        }
        r.censored = cells[4] == "1";
        if (!(r.exit_time >= 0.0)) throw FormatError("ensemble file line " + std::to_string(line_no) + ": bad exit time");
        out.records.push_back(r);
    }
    if (!header_seen) throw FormatError("ensemble file: missing header");
    out.manifest = parse_comment_lines(comments);
    return out;
}

// ------------------------------------------------------ key-value documents

/// Parses "key = value" lines, skipping comments; repeated keys keep order.
inline std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError("expected 'key = value': '" + t + "'");
        out.emplace_back(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
    return out;
}

inline std::vector<double> parse_reals(const std::string& value) {
    std::vector<double> out;
    std::istringstream ss(value);
    std::string tok;
    while (ss >> tok) out.push_back(parse_real(tok));
    return out;
}

inline void write_spectrum(std::ostream& os, const SpectrumAnalysis& an, const RunManifest& manifest) {
    const auto& s = an.spectrum;
    const auto& c = an.closed_forms;
    os << manifest.comment_block();
    os << "lambda0 = " << format_real(s.lambda0) << '\n';
    os << "mfpt = " << format_real(s.mfpt) << '\n';
    os << "omega_tilde = " << format_real(s.omega_tilde) << '\n';
    os << "kappa = " << format_real(s.kappa) << '\n';
    os << "psi_hat = " << format_real(s.psi_hat) << '\n';
    os << "H = " << format_real(s.H.a11) << ' ' << format_real(s.H.a12) << ' ' << format_real(s.H.a21) << ' '
       << format_real(s.H.a22) << '\n';
    os << "riccati_residual = " << format_real(s.riccati_residual) << '\n';
    os << "xi_residual = " << format_real(s.xi_residual) << '\n';
    os << "xi_converged = " << (s.xi_converged ? "true" : "false") << '\n';
    os << "# eigenvalue = n m re im\n";
    for (const auto& e : s.eigenvalues) {
        os << "eigenvalue = " << e.n << ' ' << e.m << ' ' << format_real(e.value.real()) << ' '
           << format_real(e.value.imag()) << '\n';
    }
    os << "k0_xi_integral = " << format_real(c.k0_xi_integral) << '\n';
    os << "k0_xi_integral_closed_form = " << format_real(c.k0_xi_integral_closed) << '\n';
    os << "k0_xi_relative_deviation = " << format_real(c.k0_xi_relative_deviation) << '\n';
    os << "mfpt_closed_form_sum_squared = " << format_real(c.mfpt_with_sum_sq) << '\n';
    os << "mfpt_closed_form_squares_summed = " << format_real(c.mfpt_with_sq_sum) << '\n';
    os << "exit_density_l1_general_vs_closed_form = " << format_real(c.exit_density_l1) << '\n';
}

inline Spectrum read_spectrum(std::istream& is) {
    Spectrum s;
    bool have_lambda = false;
    for (const auto& [k, v] : read_key_values(is)) {
        if (k == "lambda0") {
            s.lambda0 = parse_real(v);
            have_lambda = true;
        } else if (k == "mfpt") {
            s.mfpt = parse_real(v);
        } else if (k == "omega_tilde") {
            s.omega_tilde = parse_real(v);
        } else if (k == "kappa") {
            s.kappa = parse_real(v);
        } else if (k == "psi_hat") {
            s.psi_hat = parse_real(v);
        } else if (k == "H") {
            const auto h = parse_reals(v);
            if (h.size() != 4) throw FormatError("H needs four entries");
            s.H = {h[0], h[1], h[2], h[3]};
        } else if (k == "riccati_residual") {
            s.riccati_residual = parse_real(v);
        } else if (k == "xi_residual") {
            s.xi_residual = parse_real(v);
        } else if (k == "xi_converged") {
            s.xi_converged = v == "true";
        } else if (k == "eigenvalue") {
            const auto e = parse_reals(v);
            if (e.size() != 4) throw FormatError("eigenvalue needs n m re im");
            s.eigenvalues.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), {e[2], e[3]}});
        }
    }
    if (!have_lambda) throw FormatError("spectrum document: missing lambda0");
    return s;
}

inline void write_report(std::ostream& os, const AnalysisReport& r, const RunManifest& manifest) {
    os << manifest.comment_block();
    os << "n_records = " << r.n_records << '\n';
    os << "n_censored = " << r.n_censored << '\n';
    os << "censored_fraction = " << format_real(r.censored_fraction) << '\n';
    os << "mfpt_empirical = " << format_real(r.mfpt_empirical) << '\n';
    os << "tail_log_survival_slope = " << format_real(r.tail.slope) << '\n';
    os << "tail_log_survival_correlation = " << format_real(r.tail.correlation) << '\n';
    os << "histogram_bins = " << r.histogram.bins() << '\n';
    os << "histogram_upper = " << format_real(r.histogram.bin_edges.back()) << '\n';
    os << "oscillation_window = " << format_real(r.window_histogram.bin_edges.back()) << '\n';
    os << "peak_period = " << (r.peak_period ? format_real(*r.peak_period) : std::string("absent")) << '\n';
    os << "n_peaks = " << r.n_peaks << '\n';
    os << "peak_times =";
    for (double t : r.peak_times) os << ' ' << format_real(t);
    os << '\n';
    os << "fit_C0 = " << format_real(r.fit.C0) << '\n';
    os << "fit_lambda0 = " << format_real(r.fit.lambda0_hat) << '\n';
    os << "fit_C1 = " << format_real(r.fit.C1) << '\n';
    os << "fit_omega1 = " << format_real(r.fit.omega1_hat) << '\n';
    os << "fit_omega = " << format_real(r.fit.omega_hat) << '\n';
    os << "fit_phase = " << format_real(r.fit.phase) << '\n';
    os << "fit_rms = " << format_real(r.fit.rms_residual) << '\n';
    os << "fit_converged = " << (r.fit.converged ? "true" : "false") << '\n';
    os << "single_exponential_C0 = " << format_real(r.single_fit.C0) << '\n';
    os << "single_exponential_lambda = " << format_real(r.single_fit.lambda0_hat) << '\n';
    os << "single_exponential_rms = " << format_real(r.single_fit.rms_residual) << '\n';
    if (r.winding) {
        const auto& w = *r.winding;
        os << "winding_p = " << (w.p_estimate ? format_real(*w.p_estimate) : std::string("absent")) << '\n';
        os << "winding_mean_time_slope = " << format_real(w.linear_slope) << '\n';
        os << "winding_log_count_correlation = "
           << (r.winding_log_correlation ? format_real(*r.winding_log_correlation) : std::string("absent")) << '\n';
        os << "# winding = n count mean_exit_time\n";
        for (const auto& [n, c] : w.counts_per_turn) {
            os << "winding = " << n << ' ' << c << ' ' << format_real(w.conditional_mean_exit_time.at(n)) << '\n';
        }
    }
    os << "exit_density_l1 = " << (r.exit_density_l1 ? format_real(*r.exit_density_l1) : std::string("absent"))
       << '\n';
}

/// Two-column delimited text with a header line.
inline void write_columns(std::ostream& os, const std::string& header, std::span<const double> x,
                          std::span<const double> y, const RunManifest& manifest) {
    if (x.size() != y.size()) throw std::invalid_argument("write_columns: column lengths differ");
    os << manifest.comment_block();
    os << header << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) os << format_real(x[i]) << ',' << format_real(y[i]) << '\n';
}

inline void write_exit_density(std::ostream& os, const ExitDensity& d, const RunManifest& manifest) {
    write_columns(os, "theta,density", d.theta, d.density, manifest);
}

inline void write_histogram(std::ostream& os, const Histogram& h, const RunManifest& manifest) {
    std::vector<double> t(h.bins());
    for (std::size_t i = 0; i < h.bins(); ++i) t[i] = h.center(i);
    write_columns(os, "t,density", t, h.normalized_density, manifest);
}

inline void write_survival(std::ostream& os, std::span<const SurvivalPoint> curve, const RunManifest& manifest) {
    std::vector<double> t, s;
    t.reserve(curve.size());
    s.reserve(curve.size());
    for (const auto& p : curve) {
        t.push_back(p.t);
        s.push_back(p.fraction);
    }
    write_columns(os, "t,survival", t, s, manifest);
}

/// Opens `path` in binary mode (no newline translation) and runs `emit`.
inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    emit(out);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace lce::io
