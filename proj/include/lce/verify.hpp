#pragma once

// End-to-end checks of the simulator, spectral theory and analysis against
// the reference figures. Each check returns one pass/fail line; the ensemble
// sizes and tolerances come from a Scale, so the same checks run at desk scale
// (`lce verify`) and at full figure scale (the acceptance test).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lce/analysis.hpp"
#include "lce/sde_engine.hpp"
#include "lce/spectral.hpp"

namespace lce::verify {

struct CheckResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Scale {
    std::size_t oscillation_trajectories = 20000;
    std::size_t exit_point_trajectories = 50000;
    double period_tolerance = 0.10;
    double exit_l1_tolerance = 0.10;
    std::size_t determinism_trajectories = 256;
    unsigned workers = 0;
};

inline Scale paper_scale() { return {}; }

inline Scale desk_scale() {
    Scale s;
    s.oscillation_trajectories = 4000;
    s.exit_point_trajectories = 2000;
    s.period_tolerance = 0.20;
    s.exit_l1_tolerance = 0.20;
    s.determinism_trajectories = 64;
    return s;
}

namespace detail {

inline std::string printf_string(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline CheckResult timed(int id, std::string title, const std::function<void(CheckResult&)>& body) {
    CheckResult r;
    r.id = id;
    r.title = std::move(title);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    return r;
}

inline double circular_distance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

}  // namespace detail

// Reference parameter sets.
inline constexpr double osc_alpha = 0.9, osc_omega = 15.0, osc_eps = 1e-3;
inline constexpr double exit_alpha = -0.9, exit_omega = 10.0, exit_eps = 5e-3;
inline constexpr std::uint64_t reference_seed = 42;

/// t_max = 200 x the spectral MFPT estimate, or 1e4 without one.
inline double default_t_max(const FieldSpec& field, double eps) {
    try {
        const double tau = compute_spectrum(field, eps).spectrum.mfpt;
        if (std::isfinite(tau) && tau > 0.0) return 200.0 * tau;
    } catch (const std::exception&) {
    }
    return 1e4;
}

inline SimConfig oscillation_config(std::size_t n) {
    SimConfig c;
    c.eps = osc_eps;
    c.dt = 1e-4;
    c.x0 = {-0.5, 0.0};
    c.n_trajectories = n;
    c.master_seed = reference_seed;
    c.t_max = default_t_max(FieldSpec(osc_alpha, osc_omega), osc_eps);
    return c;
}

/// Exit-point ensemble; starts at the focus unless x0 is given.
inline SimConfig exit_point_config(std::size_t n, std::optional<Point> x0 = std::nullopt) {
    const FieldSpec field(exit_alpha, exit_omega);
    SimConfig c;
    c.eps = exit_eps;
    c.dt = 1e-4;
    c.x0 = x0.value_or(field.focus());
    c.n_trajectories = n;
    c.master_seed = reference_seed;
    c.t_max = default_t_max(field, exit_eps);
    return c;
}

inline CheckResult within_one_second(CheckResult r) {
    if (r.seconds >= 1.0) {
        r.pass = false;
        r.detail += detail::printf_string("; runtime %.2fs exceeds 1 s", r.seconds);
    }
    return r;
}

inline CheckResult check_constant_coefficient() {
    return within_one_second(detail::timed(1, "constant-coefficient spectrum (alpha=0, omega=15)", [](CheckResult& r) {
        const auto an = compute_spectrum(FieldSpec(0.0, 15.0), osc_eps);
        double xi_err = 0.0;
        for (double v : an.xi.xi) xi_err = std::max(xi_err, std::abs(v - std::sqrt(2.0)));
        double re_err = 0.0;
        for (const auto& e : an.spectrum.eigenvalues) {
            if (e.n == 1) re_err = std::max(re_err, std::abs(e.value.real() - 4.0));
        }
        const double wt_err = std::abs(an.spectrum.omega_tilde - 15.0);
        const double kappa_err = std::abs(an.spectrum.kappa - 4.0);
        r.pass = wt_err < 1e-8 && xi_err < 1e-8 && kappa_err < 1e-6 && re_err < 1e-6;
        r.detail = detail::printf_string("|omega_tilde-15|=%.1e |xi-sqrt2|=%.1e |kappa-4|=%.1e |Re lambda_m1-4|=%.1e",
                                         wt_err, xi_err, kappa_err, re_err);
    }));
}

inline CheckResult check_omega_tilde() {
    return within_one_second(detail::timed(2, "omega_tilde = omega for alpha in {+-0.5, +-0.9}, omega in {10, 15}", [](CheckResult& r) {
        double worst = 0.0;
        for (double a : {-0.9, -0.5, 0.5, 0.9}) {
            for (double w : {10.0, 15.0}) {
                const auto bd = sample_boundary(FieldSpec(a, w), 4096);
                worst = std::max(worst, std::abs(omega_tilde(bd) - w));
            }
        }
        r.pass = worst < 1e-8;
        r.detail = detail::printf_string("max |omega_tilde-omega|=%.1e", worst);
    }));
}

inline CheckResult check_riccati() {
    return detail::timed(8, "Riccati H = I for the focus linearization", [](CheckResult& r) {
        double worst_dev = 0.0, worst_res = 0.0;
        for (double a : {-0.9, 0.0, 0.5, 0.9}) {
            for (double w : {10.0, 15.0}) {
                const FieldSpec f(a, w);
                const auto ric = riccati_H(linearization_at_focus(f), f.sigma());
                worst_dev = std::max(worst_dev, (ric.H - Mat2::identity()).frobenius());
                worst_res = std::max(worst_res, ric.residual);
            }
        }
        r.pass = worst_dev < 1e-10 && worst_res < 1e-12;
        r.detail = detail::printf_string("max |H-I|=%.1e max residual=%.1e", worst_dev, worst_res);
    });
}

inline CheckResult check_large_omega_convergence() {
    return detail::timed(9, "exit density: general -> closed form as omega grows (alpha=0.5)", [](CheckResult& r) {
        std::vector<double> l1;
        for (double w : {5.0, 10.0, 20.0, 40.0}) {
            l1.push_back(compute_spectrum(FieldSpec(0.5, w), osc_eps).closed_forms.exit_density_l1);
        }
        r.pass = l1[0] > l1[1] && l1[1] > l1[2] && l1[2] > l1[3];
        r.detail = detail::printf_string("L1 at omega=5,10,20,40: %.4f %.4f %.4f %.4f", l1[0], l1[1], l1[2], l1[3]);
    });
}

/// Analysis of the oscillation ensemble shared by checks 3, 5, 6 and 7.
struct OscillationRun {
    EnsembleResult ensemble;
    AnalysisReport report;
    SpectrumAnalysis spectrum;
    double seconds = 0.0;
};

inline OscillationRun run_oscillation_ensemble(const Scale& scale) {
    const FieldSpec field(osc_alpha, osc_omega);
    auto spectrum = compute_spectrum(field, osc_eps);
    const auto t0 = std::chrono::steady_clock::now();
    auto ensemble = run_ensemble(field, oscillation_config(scale.oscillation_trajectories), scale.workers);
    const double seconds = detail::seconds_since(t0);
    AnalysisOptions opt;
    opt.omega = osc_omega;
    opt.alpha = osc_alpha;
    opt.omega1_seed = spectrum.spectrum.kappa;
    auto report = analyze_ensemble(ensemble.records, opt);
    return {std::move(ensemble), std::move(report), std::move(spectrum), seconds};
}

inline CheckResult check_period(const OscillationRun& run, const Scale& scale) {
    return detail::timed(3, "oscillation period of the exit-time density", [&](CheckResult& r) {
        const double target = two_pi / osc_omega;
        const auto& rep = run.report;
        const double rel = rep.peak_period ? std::abs(*rep.peak_period - target) / target : INFINITY;
        r.pass = rep.n_peaks >= 3 && rel <= scale.period_tolerance;
        r.detail = detail::printf_string("n=%zu peaks=%zu period=%s (target %.4f, rel err %.3f, tol %.2f), sim %.0fs",
                                         run.ensemble.records.size(), rep.n_peaks,
                                         rep.peak_period ? detail::printf_string("%.4f", *rep.peak_period).c_str() : "absent",
                                         target, rel, scale.period_tolerance, run.seconds);
    });
}

inline CheckResult check_winding(const OscillationRun& run) {
    return detail::timed(5, "winding law: log-linear counts, increasing conditional means", [&](CheckResult& r) {
        const auto& rep = run.report;
        if (!rep.winding) throw std::runtime_error("too few uncensored records for winding statistics");
        const double corr = rep.winding_log_correlation.value_or(0.0);
        const bool increasing = conditional_means_increasing(*rep.winding, 0, 5);
        r.pass = std::abs(corr) >= 0.95 && increasing;
        r.detail = detail::printf_string("|r(log f(n), n=1..5)|=%.4f, means increasing over n=0..5: %s, p=%.4f", std::abs(corr),
                                         increasing ? "yes" : "no", rep.winding->p_estimate.value_or(NAN));
    });
}

inline CheckResult check_mfpt(const OscillationRun& run) {
    return detail::timed(6, "MFPT: asymptotic formula vs empirical mean (factor 2)", [&](CheckResult& r) {
        const double tau = run.spectrum.spectrum.mfpt;
        const double emp = run.report.mfpt_empirical;
        const double ratio = tau / emp;
        r.pass = ratio >= 0.5 && ratio <= 2.0 && run.report.n_censored == 0;
        r.detail = detail::printf_string(
            "formula %.3f, empirical %.3f (ratio %.3f, censored %zu); closed forms: (1+a)^2 %.3f, (1+a^2) %.3f", tau, emp,
            ratio, run.report.n_censored, run.spectrum.closed_forms.mfpt_with_sum_sq,
            run.spectrum.closed_forms.mfpt_with_sq_sum);
    });
}

/// Known-parameter synthetic histogram for the fit round trip.
inline Histogram synthetic_fit_histogram(const FitParams& truth, double t_end, std::size_t bins, double rel_noise,
                                         std::uint64_t seed) {
    Histogram h;
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = t_end * static_cast<double>(i) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    h.normalized_density.resize(bins);
    GaussianStream g(seed, 0);
    for (std::size_t i = 0; i < bins; ++i) {
        h.normalized_density[i] = two_exponential_model(truth, h.center(i)) * (1.0 + rel_noise * g.next_normal());
    }
    return h;
}

inline CheckResult check_fit(const OscillationRun& run) {
    return detail::timed(7, "two-exponential fit: synthetic round trip and oscillation ensemble", [&](CheckResult& r) {
        FitParams truth;
        truth.C0 = 1.2;
        truth.lambda0_hat = 0.35;
        truth.C1 = 0.6;
        truth.omega1_hat = 4.0;
        truth.omega_hat = 15.0;
        truth.phase = 0.3;
        const auto h = synthetic_fit_histogram(truth, 3.0, 200, 0.005, 7);
        const auto peaks = detect_peak_period(h);
        TwoExponentialSeeds seeds;
        seeds.omega = peaks.period ? two_pi / *peaks.period : 15.0;
        const auto f = fit_two_exponential(h, seeds);
        auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
        const double worst = std::max({rel(f.C0, truth.C0), rel(f.lambda0_hat, truth.lambda0_hat), rel(f.C1, truth.C1),
                                       rel(f.omega1_hat, truth.omega1_hat), rel(f.omega_hat, truth.omega_hat),
                                       rel(f.phase, truth.phase)});
        const auto& rep = run.report;
        const double w_rel = rel(rep.fit.omega_hat, osc_omega);
        r.pass = worst <= 0.05 && w_rel <= 0.10 && rep.fit.rms_residual < rep.single_fit.rms_residual;
        r.detail = detail::printf_string(
            "synthetic worst rel err %.4f; ensemble omega_hat=%.3f (rel err %.3f), rms %.4f vs single-exp %.4f", worst,
            rep.fit.omega_hat, w_rel, rep.fit.rms_residual, rep.single_fit.rms_residual);
    });
}

inline CheckResult check_exit_density(const Scale& scale) {
    return detail::timed(4, "exit-point density vs closed form (alpha=-0.9, omega=10, eps=0.005)", [&](CheckResult& r) {
        const FieldSpec field(exit_alpha, exit_omega);
        constexpr std::size_t bins = 64;
        std::vector<double> grid(4096);
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = two_pi * static_cast<double>(k) / static_cast<double>(grid.size());
        const auto analytic = exit_density_closed_form(exit_alpha, grid);

        const auto ens = run_ensemble(field, exit_point_config(scale.exit_point_trajectories), scale.workers);
        const double l1 = compare_exit_density(ens.records, analytic, bins);
        const auto dens = exit_angle_density(ens.records, bins);
        const auto mode = static_cast<std::size_t>(std::max_element(dens.begin(), dens.end()) - dens.begin());
        const double w = two_pi / static_cast<double>(bins);
        const double mode_centre = (static_cast<double>(mode) + 0.5) * w;
        const bool mode_ok = detail::circular_distance(mode_centre, 0.0) <= 1.5 * w;

        // Sensitivity to the initial condition, reported only.
        const auto alt = run_ensemble(field, exit_point_config(scale.exit_point_trajectories, Point{-0.5, 0.0}),
                                      scale.workers);
        const double l1_alt = compare_exit_density(alt.records, analytic, bins);

        r.pass = l1 <= scale.exit_l1_tolerance && mode_ok;
        r.detail = detail::printf_string(
            "n=%zu from focus: L1=%.4f (tol %.2f), mode bin centre %.3f rad (%s); from (-0.5,0): L1=%.4f",
            ens.records.size(), l1, scale.exit_l1_tolerance, mode_centre, mode_ok ? "at 0" : "off 0", l1_alt);
    });
}

inline CheckResult check_determinism(const Scale& scale) {
    return detail::timed(10, "determinism across worker counts {1, 2, 8}", [&](CheckResult& r) {
        const FieldSpec field(osc_alpha, osc_omega);
        const auto cfg = oscillation_config(scale.determinism_trajectories);
        const auto a = run_ensemble(field, cfg, 1);
        const auto b = run_ensemble(field, cfg, 2);
        const auto c = run_ensemble(field, cfg, 8);
        r.pass = a.records == b.records && a.records == c.records;
        r.detail = detail::printf_string("%zu trajectories, records %s", cfg.n_trajectories,
                                         r.pass ? "bit-identical" : "differ");
    });
}

inline std::string format_line(const CheckResult& r) {
    return detail::printf_string("[%s] %2d %s (%.1fs): %s", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds,
                                 r.detail.c_str());
}

/// Desk-scale gate: checks 1, 2, 8, 9 and reduced versions of 3, 4, 5.
inline std::vector<CheckResult> run_desk_checks(const std::function<void(const CheckResult&)>& on_result = {}) {
    const Scale scale = desk_scale();
    std::vector<CheckResult> out;
    auto add = [&](CheckResult r) {
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    };
    add(check_constant_coefficient());
    add(check_omega_tilde());
    add(check_riccati());
    add(check_large_omega_convergence());
    const auto run = run_oscillation_ensemble(scale);
    add(check_period(run, scale));
    add(check_exit_density(scale));
    add(check_winding(run));
    return out;
}

}  // namespace lce::verify
