#pragma once

// Empirical statistics of escape ensembles: exit-time histogram and survival
// curve, oscillation period of the exit-time density, the two-exponential
// model fit, winding-number statistics and exit-point density comparison.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lce/sde_engine.hpp"
#include "lce/spectral.hpp"

namespace lce {

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> counts;
    std::vector<double> normalized_density;
    /// Uncensored records the density is normalized by (including those
    /// beyond the last edge when an upper limit was set).
    std::size_t normalization_count = 0;

    std::size_t bins() const { return counts.size(); }
    double width() const { return bin_edges.size() > 1 ? bin_edges[1] - bin_edges[0] : 0.0; }
    double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

namespace detail {

inline std::vector<double> uncensored_times(std::span<const ExitRecord> records) {
    std::vector<double> t;
    t.reserve(records.size());
    for (const auto& r : records) {
        if (!r.censored) t.push_back(r.exit_time);
    }
    return t;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    return {slope, my - slope * mx};
}

}  // namespace detail

/// Uniform histogram of uncensored exit times on [0, t_upper], where t_upper
/// defaults to the largest uncensored exit time. Density is count divided by
/// (bin width x number of uncensored records), so it integrates to the
/// fraction of uncensored exits inside the window.
inline Histogram build_histogram(std::span<const ExitRecord> records, std::size_t n_bins,
                                 std::optional<double> t_upper = std::nullopt) {
    if (n_bins < 10) throw std::invalid_argument("build_histogram: need at least 10 bins");
    const auto times = detail::uncensored_times(records);
    if (times.empty()) throw std::invalid_argument("build_histogram: no uncensored records");
    double hi = t_upper.value_or(*std::max_element(times.begin(), times.end()));
    if (!(hi > 0.0)) hi = 1.0;  // every exit at t = 0: one occupied bin

    Histogram h;
    h.bin_edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = hi * static_cast<double>(i) / static_cast<double>(n_bins);
    h.counts.assign(n_bins, 0);
    const double w = hi / static_cast<double>(n_bins);
    for (double t : times) {
        if (t > hi) continue;
        auto i = static_cast<std::size_t>(t / w);
        if (i >= n_bins) i = n_bins - 1;
        ++h.counts[i];
    }
    h.normalization_count = times.size();
    h.normalized_density.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        h.normalized_density[i] = static_cast<double>(h.counts[i]) / (w * static_cast<double>(times.size()));
    }
    return h;
}

struct SurvivalPoint {
    double t;
    double fraction;
};

/// Empirical survival probability: fraction of trajectories with exit time
/// greater than t, evaluated at t = 0 and at each distinct uncensored exit time
/// (right-continuous steps). Censored trajectories survive through t_max.
inline std::vector<SurvivalPoint> survival_curve(std::span<const ExitRecord> records) {
    if (records.empty()) throw std::invalid_argument("survival_curve: no records");
    auto times = detail::uncensored_times(records);
    std::sort(times.begin(), times.end());
    const double n = static_cast<double>(records.size());
    std::vector<SurvivalPoint> out;
    out.reserve(times.size() + 1);
    std::size_t exited_by_zero = 0;
    while (exited_by_zero < times.size() && times[exited_by_zero] <= 0.0) ++exited_by_zero;
    out.push_back({0.0, 1.0 - static_cast<double>(exited_by_zero) / n});
    for (std::size_t i = exited_by_zero; i < times.size();) {
        std::size_t j = i;
        while (j < times.size() && times[j] == times[i]) ++j;
        out.push_back({times[i], 1.0 - static_cast<double>(j) / n});
        i = j;
    }
    return out;
}

struct TailFit {
    double slope = 0.0;        // d log S / dt
    double correlation = 0.0;  // Pearson r of (t, log S)
    std::size_t points = 0;
};

/// Linear fit of log survival against time over the part of the curve where
/// the surviving fraction is in (min_fraction, max_fraction].
inline TailFit survival_tail_fit(std::span<const SurvivalPoint> curve, double max_fraction = 0.5,
                                 double min_fraction = 1e-3) {
    std::vector<double> t, ls;
    for (const auto& p : curve) {
        if (p.fraction <= max_fraction && p.fraction > min_fraction) {
            t.push_back(p.t);
            ls.push_back(std::log(p.fraction));
        }
    }
    TailFit fit;
    fit.points = t.size();
    if (t.size() < 3) return fit;
    fit.slope = detail::least_squares_line(t, ls).slope;
    fit.correlation = detail::pearson(t, ls);
    return fit;
}

struct PeakPeriod {
    std::optional<double> period;  // absent when fewer than two peaks
    std::size_t n_peaks = 0;
    std::vector<double> peak_times;
};

/// Oscillation period of a histogram density.
///
/// The density is smoothed with a centered moving average of `smooth_window`
/// bins; interior local maxima above 10% of the smoothed maximum are peak
/// candidates. Two neighbouring candidates that are not separated by a dip to
/// below 75% of the lower one are treated as one peak (the higher survives),
/// which keeps sampling noise on a single crest from counting twice. The period
/// is the mean spacing of consecutive peaks.
inline PeakPeriod detect_peak_period(const Histogram& hist, std::size_t smooth_window = 3) {
    const std::size_t n = hist.bins();
    if (n < 30) throw std::invalid_argument("detect_peak_period: need at least 30 bins");
    if (smooth_window == 0) smooth_window = 1;
    const auto& d = hist.normalized_density;

    std::vector<double> s(n);
    const std::size_t left = (smooth_window - 1) / 2;
    const std::size_t right = smooth_window - 1 - left;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= left ? i - left : 0;
        const std::size_t hi = std::min(n - 1, i + right);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += d[j];
        s[i] = acc / static_cast<double>(hi - lo + 1);
    }
    const double smax = *std::max_element(s.begin(), s.end());

    PeakPeriod out;
    if (!(smax > 0.0)) return out;
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] >= 0.1 * smax) cand.push_back(i);
    }

    bool merged = true;
    while (merged && cand.size() > 1) {
        merged = false;
        for (std::size_t k = 0; k + 1 < cand.size(); ++k) {
            const std::size_t a = cand[k], b = cand[k + 1];
            const double dip = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(a),
                                                 s.begin() + static_cast<std::ptrdiff_t>(b) + 1);
            if (dip > 0.75 * std::min(s[a], s[b])) {
                cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(s[a] >= s[b] ? k + 1 : k));
                merged = true;
                break;
            }
        }
    }

    out.n_peaks = cand.size();
    for (std::size_t i : cand) out.peak_times.push_back(hist.center(i));
    if (cand.size() >= 2) {
        out.period = (out.peak_times.back() - out.peak_times.front()) / static_cast<double>(cand.size() - 1);
    }
    return out;
}

struct FitParams {
    double C0 = 0.0;
    double lambda0_hat = 0.0;
    double C1 = 0.0;
    double omega1_hat = 0.0;
    double omega_hat = 0.0;
    double phase = 0.0;
    double rms_residual = 0.0;
    bool converged = false;
};

/// C0 exp(-lambda0 t) + C1 exp(-omega1 t) cos(omega t + phase).
inline double two_exponential_model(const FitParams& p, double t) {
    return p.C0 * std::exp(-p.lambda0_hat * t) +
           p.C1 * std::exp(-p.omega1_hat * t) * std::cos(p.omega_hat * t + p.phase);
}

namespace detail {

struct Samples {
    std::vector<double> t;
    std::vector<double> y;
};

inline Samples histogram_samples(const Histogram& h) {
    Samples s;
    s.t.resize(h.bins());
    s.y = h.normalized_density;
    for (std::size_t i = 0; i < h.bins(); ++i) s.t[i] = h.center(i);
    return s;
}

// Linear least squares for the amplitudes of the given basis functions;
// returns the rms residual and writes the amplitudes.
template <std::size_t K>
double solve_amplitudes(const Samples& s, const std::array<std::vector<double>, K>& basis, std::array<double, K>& amp) {
    std::array<std::array<double, K>, K> g{};
    std::array<double, K> rhs{};
    const std::size_t n = s.t.size();
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = 0; b < K; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += basis[a][i] * basis[b][i];
            g[a][b] = acc;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += basis[a][i] * s.y[i];
        rhs[a] = acc;
    }
    // Tikhonov floor keeps the system solvable when a basis function vanishes.
    double diag = 0.0;
    for (std::size_t a = 0; a < K; ++a) diag = std::max(diag, g[a][a]);
    for (std::size_t a = 0; a < K; ++a) g[a][a] += 1e-14 * diag + 1e-300;
    amp = solve_dense<K>(g, rhs);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t a = 0; a < K; ++a) m += amp[a] * basis[a][i];
        ss += (s.y[i] - m) * (s.y[i] - m);
    }
    return std::sqrt(ss / static_cast<double>(n));
}

inline double wrap_phase(double phi) {
    const double pi = std::numbers::pi;
    phi = std::fmod(phi + pi, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;
    return phi - pi;
}

// rms of the two-exponential model with amplitudes solved for fixed
// nonlinear parameters {lambda0, omega1, omega, phase}.
inline double variable_projection_rms(const Samples& s, const std::array<double, 4>& nl, std::array<double, 2>& amp) {
    const std::size_t n = s.t.size();
    std::array<std::vector<double>, 2> basis{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        basis[0][i] = std::exp(-nl[0] * s.t[i]);
        basis[1][i] = std::exp(-nl[1] * s.t[i]) * std::cos(nl[2] * s.t[i] + nl[3]);
    }
    return solve_amplitudes<2>(s, basis, amp);
}

}  // namespace detail

/// Best single exponential C0 exp(-lambda t) to the histogram density; the
/// rate is found by golden-section search on log(lambda).
inline FitParams fit_single_exponential(const Histogram& hist) {
    const auto s = detail::histogram_samples(hist);
    auto rms_at = [&](double log_rate, std::array<double, 1>& amp) {
        std::array<std::vector<double>, 1> basis{std::vector<double>(s.t.size())};
        for (std::size_t i = 0; i < s.t.size(); ++i) basis[0][i] = std::exp(-std::exp(log_rate) * s.t[i]);
        return detail::solve_amplitudes<1>(s, basis, amp);
    };
    const double span_t = std::max(hist.bin_edges.back(), 1e-12);
    // Coarse scan then golden refinement.
    double best = std::log(1e-3 / span_t), best_rms = std::numeric_limits<double>::infinity();
    std::array<double, 1> amp{};
    const double lo_scan = std::log(1e-3 / span_t), hi_scan = std::log(1e3 / span_t);
    for (int k = 0; k <= 120; ++k) {
        const double x = lo_scan + (hi_scan - lo_scan) * k / 120.0;
        const double r = rms_at(x, amp);
        if (r < best_rms) {
            best_rms = r;
            best = x;
        }
    }
    double a = best - (hi_scan - lo_scan) / 120.0, b = best + (hi_scan - lo_scan) / 120.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (rms_at(c, amp) < rms_at(d, amp)) b = d; else a = c;
    }
    FitParams p;
    p.lambda0_hat = std::exp(0.5 * (a + b));
    p.rms_residual = rms_at(0.5 * (a + b), amp);
    p.C0 = amp[0];
    p.converged = true;
    return p;
}

struct TwoExponentialSeeds {
    std::optional<double> lambda0;  // default: tail log-slope of the density
    std::optional<double> omega1;   // default: kappa when supplied, else 4
    double omega = 0.0;             // required, > 0
};

/// Least-squares fit of C0 exp(-lambda0 t) + C1 exp(-omega1 t) cos(omega t + phase)
/// to the histogram bin centres.
///
/// For fixed (lambda0, omega1, omega, phase) the amplitudes solve a 2x2 linear
/// problem. The four nonlinear parameters are refined by coordinate descent:
/// each sweep scans every parameter over a bracket around its current value
/// and then shrinks the brackets; iteration stops once a sweep improves the rms
/// by less than 1e-6 (relative).
inline FitParams fit_two_exponential(const Histogram& hist, const TwoExponentialSeeds& seeds) {
    if (hist.bins() < 50) throw std::invalid_argument("fit_two_exponential: need at least 50 bins");
    if (!(seeds.omega > 0.0)) throw std::invalid_argument("fit_two_exponential: initial omega must be positive");
    const auto s = detail::histogram_samples(hist);
    const double ymax = *std::max_element(s.y.begin(), s.y.end());
    if (!(ymax > 0.0)) throw std::invalid_argument("fit_two_exponential: histogram is empty");

    double lambda_seed = 0.0;
    if (seeds.lambda0) {
        lambda_seed = *seeds.lambda0;
    } else {
        std::vector<double> t, ly;
        for (std::size_t i = s.t.size() / 2; i < s.t.size(); ++i) {
            if (s.y[i] > 0.0) {
                t.push_back(s.t[i]);
                ly.push_back(std::log(s.y[i]));
            }
        }
        if (t.size() >= 2) lambda_seed = -detail::least_squares_line(t, ly).slope;
        if (!(lambda_seed > 0.0)) lambda_seed = 1.0 / std::max(s.t.back(), 1e-12);
    }
    std::array<double, 4> nl{lambda_seed, seeds.omega1.value_or(4.0), seeds.omega, 0.0};
    std::array<double, 2> amp{};

    // Phase seed by scan.
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 64; ++k) {
        std::array<double, 4> trial = nl;
        trial[3] = -std::numbers::pi + 2.0 * std::numbers::pi * k / 64.0;
        const double r = detail::variable_projection_rms(s, trial, amp);
        if (r < best) {
            best = r;
            nl = trial;
        }
    }

    std::array<double, 4> width{0.9 * nl[0], 0.9 * nl[1], 0.1 * nl[2], std::numbers::pi / 8.0};
    constexpr int scan_points = 16;
    FitParams out;
    int quiet_sweeps = 0;
    for (int sweep = 0; sweep < 400; ++sweep) {
        const double before = best;
        for (std::size_t p = 0; p < 4; ++p) {
            const double centre = nl[p];
            for (int k = -scan_points; k <= scan_points; ++k) {
                std::array<double, 4> trial = nl;
                trial[p] = centre + width[p] * k / scan_points;
                if (p < 3 && !(trial[p] > 0.0)) continue;
                if (p == 3) trial[p] = detail::wrap_phase(trial[p]);
                const double r = detail::variable_projection_rms(s, trial, amp);
                if (r < best) {
                    best = r;
                    nl = trial;
                }
            }
        }
        for (auto& w : width) w *= 0.7;
        if (before - best < 1e-6 * before) {
            if (++quiet_sweeps >= 8) {
                out.converged = true;
                break;
            }
        } else {
            quiet_sweeps = 0;
        }
    }

    out.rms_residual = detail::variable_projection_rms(s, nl, amp);
    out.C0 = amp[0];
    out.C1 = amp[1];
    out.lambda0_hat = nl[0];
    out.omega1_hat = nl[1];
    out.omega_hat = nl[2];
    out.phase = nl[3];
    // Canonical sign: C1 >= 0 with the phase absorbing the sign.
    if (out.C1 < 0.0) {
        out.C1 = -out.C1;
        out.phase = detail::wrap_phase(out.phase + std::numbers::pi);
    }
    return out;
}

struct WindingStats {
    std::map<std::uint32_t, std::size_t> counts_per_turn;
    std::optional<double> p_estimate;  // absent unless f(1) > 0 and f(2) > 0
    std::map<std::uint32_t, double> conditional_mean_exit_time;
    double linear_slope = 0.0;  // over the occupied bins n = 0..max_turn_for_slope
    std::size_t uncensored = 0;
};

/// Turn counts, the geometric-law parameter p = 1 - f(2)/f(1), conditional
/// mean exit times and their least-squares slope against n over the occupied
/// bins n <= max_turn_for_slope.
inline WindingStats winding_statistics(std::span<const ExitRecord> records, std::uint32_t max_turn_for_slope = 5) {
    WindingStats ws;
    std::map<std::uint32_t, double> sums;
    for (const auto& r : records) {
        if (r.censored) continue;
        ++ws.counts_per_turn[r.winding_number];
        sums[r.winding_number] += r.exit_time;
        ++ws.uncensored;
    }
    if (ws.uncensored < 100) throw std::invalid_argument("winding_statistics: need at least 100 uncensored records");
    for (const auto& [n, c] : ws.counts_per_turn) ws.conditional_mean_exit_time[n] = sums[n] / static_cast<double>(c);

    const auto f1 = ws.counts_per_turn.find(1);
    const auto f2 = ws.counts_per_turn.find(2);
    if (f1 != ws.counts_per_turn.end() && f2 != ws.counts_per_turn.end()) {
        const double p = 1.0 - static_cast<double>(f2->second) / static_cast<double>(f1->second);
        if (p > 0.0 && p < 1.0) ws.p_estimate = p;
    }

    std::vector<double> xs, ys;
    for (const auto& [n, m] : ws.conditional_mean_exit_time) {
        if (n > max_turn_for_slope) break;
        xs.push_back(static_cast<double>(n));
        ys.push_back(m);
    }
    if (xs.size() >= 2) ws.linear_slope = detail::least_squares_line(xs, ys).slope;
    return ws;
}

/// Pearson correlation of log f(n) against n over n = first..last (all bins
/// must be occupied; NaN otherwise).
inline double winding_log_linearity(const WindingStats& ws, std::uint32_t first = 1, std::uint32_t last = 5) {
    std::vector<double> xs, ys;
    for (std::uint32_t n = first; n <= last; ++n) {
        const auto it = ws.counts_per_turn.find(n);
        if (it == ws.counts_per_turn.end() || it->second == 0) return std::numeric_limits<double>::quiet_NaN();
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(static_cast<double>(it->second)));
    }
    return detail::pearson(xs, ys);
}

/// True when the conditional mean exit times are strictly increasing over
/// n = first..last and every bin in that range is occupied.
inline bool conditional_means_increasing(const WindingStats& ws, std::uint32_t first = 0, std::uint32_t last = 5) {
    double prev = -std::numeric_limits<double>::infinity();
    for (std::uint32_t n = first; n <= last; ++n) {
        const auto it = ws.conditional_mean_exit_time.find(n);
        if (it == ws.conditional_mean_exit_time.end() || !(it->second > prev)) return false;
        prev = it->second;
    }
    return true;
}

/// Geometric-law prediction p (1 - p)^{n - 1} scaled to the count at n = 1.
inline double geometric_law(double p, std::uint32_t n) {
    return p * std::pow(1.0 - p, static_cast<double>(n) - 1.0);
}

/// Empirical exit-angle density on n_bins uniform bins of [0, 2pi).
inline std::vector<double> exit_angle_density(std::span<const ExitRecord> records, std::size_t n_bins) {
    std::vector<double> dens(n_bins, 0.0);
    std::size_t total = 0;
    const double w = two_pi / static_cast<double>(n_bins);
    for (const auto& r : records) {
        if (r.censored) continue;
        auto i = static_cast<std::size_t>(r.exit_angle / w);
        if (i >= n_bins) i = n_bins - 1;
        dens[i] += 1.0;
        ++total;
    }
    if (total == 0) throw std::invalid_argument("exit_angle_density: no uncensored records");
    for (auto& v : dens) v /= w * static_cast<double>(total);
    return dens;
}

/// Mean of the analytic density over each of n_bins uniform bins of [0, 2pi),
/// by the midpoint rule on `sub` points per bin.
inline std::vector<double> bin_averaged_density(const ExitDensity& analytic, std::size_t n_bins,
                                                std::size_t sub = 32) {
    std::vector<double> out(n_bins, 0.0);
    const double w = two_pi / static_cast<double>(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sub; ++j) {
            acc += analytic.at(w * (static_cast<double>(i) + (static_cast<double>(j) + 0.5) / static_cast<double>(sub)));
        }
        out[i] = acc / static_cast<double>(sub);
    }
    return out;
}

/// L1 distance between the binned empirical exit-angle density and the
/// bin-averaged analytic density.
inline double compare_exit_density(std::span<const ExitRecord> records, const ExitDensity& analytic,
                                   std::size_t n_bins) {
    const auto uncensored = std::count_if(records.begin(), records.end(), [](const ExitRecord& r) { return !r.censored; });
    if (uncensored < 1000) throw std::invalid_argument("compare_exit_density: need at least 1000 uncensored records");
    const auto emp = exit_angle_density(records, n_bins);
    const auto ref = bin_averaged_density(analytic, n_bins);
    const double w = two_pi / static_cast<double>(n_bins);
    double l1 = 0.0;
    for (std::size_t i = 0; i < n_bins; ++i) l1 += std::abs(emp[i] - ref[i]) * w;
    return l1;
}

/// lambda0 exp(-lambda0 t) + sum_k Re[C_k exp(-lambda_k t)] over the spectrum's
/// eigenvalue list.
inline double model_exit_time_density(const Spectrum& spectrum, std::span<const std::complex<double>> coefficients,
                                      double t) {
    if (!coefficients.empty() && coefficients.size() != spectrum.eigenvalues.size()) {
        throw std::invalid_argument("model_exit_time_density: coefficient count does not match eigenvalue count");
    }
    if (t < 0.0) throw std::invalid_argument("model_exit_time_density: t must be non-negative");
    double v = spectrum.lambda0 * std::exp(-spectrum.lambda0 * t);
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        v += (coefficients[k] * std::exp(-spectrum.eigenvalues[k].value * t)).real();
    }
    return v;
}

/// Two-sample Kolmogorov-Smirnov statistic of uncensored exit times.
inline double ks_distance(std::span<const ExitRecord> a, std::span<const ExitRecord> b) {
    auto ta = detail::uncensored_times(a);
    auto tb = detail::uncensored_times(b);
    if (ta.empty() || tb.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < ta.size() && j < tb.size()) {
        const double t = std::min(ta[i], tb[j]);
        while (i < ta.size() && ta[i] <= t) ++i;
        while (j < tb.size() && tb[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / ta.size() - static_cast<double>(j) / tb.size()));
    }
    return d;
}

/// Time window for oscillation analysis: a fixed number of periods 2pi/omega.
inline double oscillation_window(double omega, double periods = 16.0) {
    if (!(omega > 0.0)) throw std::invalid_argument("oscillation_window: omega must be positive");
    return periods * two_pi / omega;
}

struct AnalysisOptions {
    std::size_t bins = 200;
    double omega = 0.0;                 // field rotation rate; seeds the window and the fit
    std::optional<double> alpha;        // enables the exit-density comparison
    std::optional<double> omega1_seed;  // e.g. kappa from the spectral module
    double window_periods = 16.0;
    std::size_t smooth_window = 3;
    std::size_t exit_bins = 64;
};

struct AnalysisReport {
    Histogram histogram;         // [0, largest exit time]
    Histogram window_histogram;  // [0, oscillation window], used for peaks and the fit
    std::vector<SurvivalPoint> survival;
    TailFit tail;
    std::optional<double> peak_period;  // absent unless at least 3 peaks
    std::size_t n_peaks = 0;
    std::vector<double> peak_times;
    FitParams fit;
    FitParams single_fit;
    std::optional<WindingStats> winding;
    std::optional<double> winding_log_correlation;
    std::optional<double> exit_density_l1;  // against the closed form for the given alpha
    double mfpt_empirical = 0.0;            // mean over uncensored records
    std::size_t n_records = 0;
    std::size_t n_censored = 0;
    double censored_fraction = 0.0;
};

inline AnalysisReport analyze_ensemble(std::span<const ExitRecord> records, const AnalysisOptions& opt) {
    if (!(opt.omega > 0.0)) throw std::invalid_argument("analyze_ensemble: omega must be positive");
    AnalysisReport rep;
    rep.n_records = records.size();
    const auto times = detail::uncensored_times(records);
    rep.n_censored = records.size() - times.size();
    rep.censored_fraction = records.empty() ? 0.0 : static_cast<double>(rep.n_censored) / static_cast<double>(records.size());
    if (times.empty()) throw std::invalid_argument("analyze_ensemble: no uncensored records");
    double sum = 0.0;
    for (double t : times) sum += t;
    rep.mfpt_empirical = sum / static_cast<double>(times.size());

    rep.histogram = build_histogram(records, opt.bins);
    rep.window_histogram = build_histogram(records, opt.bins, oscillation_window(opt.omega, opt.window_periods));
    rep.survival = survival_curve(records);
    rep.tail = survival_tail_fit(rep.survival);

    const auto peaks = detect_peak_period(rep.window_histogram, opt.smooth_window);
    rep.n_peaks = peaks.n_peaks;
    rep.peak_times = peaks.peak_times;
    if (peaks.n_peaks >= 3) rep.peak_period = peaks.period;

    TwoExponentialSeeds seeds;
    seeds.omega = peaks.period ? two_pi / *peaks.period : opt.omega;
    seeds.omega1 = opt.omega1_seed;
    rep.fit = fit_two_exponential(rep.window_histogram, seeds);
    rep.single_fit = fit_single_exponential(rep.window_histogram);

    if (times.size() >= 100) {
        rep.winding = winding_statistics(records);
        const double r = winding_log_linearity(*rep.winding);
        if (!std::isnan(r)) rep.winding_log_correlation = r;
    }
    if (opt.alpha && times.size() >= 1000) {
        std::vector<double> grid(4096);
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = two_pi * static_cast<double>(k) / static_cast<double>(grid.size());
        rep.exit_density_l1 = compare_exit_density(records, exit_density_closed_form(*opt.alpha, grid), opt.exit_bins);
    }
    return rep;
}

}  // namespace lce
