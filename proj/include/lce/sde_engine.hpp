#pragma once

// Euler-Maruyama ensembles for dx = b(x) dt + sqrt(2 eps) a dW on the unit
// disk, absorbed on the unit circle.
//
// Every trajectory draws its noise from its own Philox substream keyed by
// (master_seed, trajectory_index), so an ensemble is bit-identical for any
// number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lce/field_model.hpp"
#include "lce/philox.hpp"

namespace lce {

struct SimConfig {
    double eps = 1e-3;
    double dt = 1e-4;
    Point x0{-0.5, 0.0};
    std::size_t n_trajectories = 1000;
    std::uint64_t master_seed = 42;
    double t_max = 1e4;

    /// Throws std::invalid_argument naming the offending field. eps = 0 is
    /// accepted as the deterministic limit and x0 may sit on the circle
    /// (immediate absorption); points outside the closed disk are rejected.
    void validate(const FieldSpec& field) const {
        if (!std::isfinite(eps) || eps < 0.0) throw std::invalid_argument("eps must be non-negative");
        if (!std::isfinite(dt) || !(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (dt > 1e-3 * (1.0 + 1e-12)) throw std::invalid_argument("dt must not exceed 1e-3");
        if (dt > 0.1 / field.omega() * (1.0 + 1e-12)) throw std::invalid_argument("dt must not exceed 0.1/omega");
        if (!std::isfinite(std::abs(x0)) || std::abs(x0) > 1.0) {
            throw std::invalid_argument("x0 must lie in the closed unit disk");
        }
        if (!std::isfinite(t_max) || !(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    }
};

struct ExitRecord {
    double exit_time = 0.0;
    /// In [0, 2pi); NaN for censored trajectories.
    double exit_angle = std::numeric_limits<double>::quiet_NaN();
    std::uint32_t winding_number = 0;
    std::uint64_t trajectory_index = 0;
    bool censored = false;

    friend bool operator==(const ExitRecord& a, const ExitRecord& b) {
        const bool angles_equal =
            (std::isnan(a.exit_angle) && std::isnan(b.exit_angle)) || a.exit_angle == b.exit_angle;
        return a.exit_time == b.exit_time && angles_equal && a.winding_number == b.winding_number &&
               a.trajectory_index == b.trajectory_index && a.censored == b.censored;
    }
};

struct EnsembleResult {
    SimConfig config;
    FieldSpec field;
    std::vector<ExitRecord> records;

    std::size_t censored_count() const {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [](const ExitRecord& r) { return r.censored; }));
    }
    double censored_fraction() const {
        return records.empty() ? 0.0 : static_cast<double>(censored_count()) / static_cast<double>(records.size());
    }
};

/// One Euler-Maruyama step with a supplied standard-normal pair.
inline Point step(const FieldSpec& field, double eps, double dt, Point z, std::pair<double, double> gaussian_pair) {
    const Point xi{gaussian_pair.first, gaussian_pair.second};
    return z + drift(field, z) * dt + std::sqrt(2.0 * eps * dt) * field.noise().apply(xi);
}

namespace detail {

inline double wrap_angle(double theta) {
    double a = std::fmod(theta, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

// Signed angle from u to v in (-pi, pi].
inline double angle_between(Point u, Point v) {
    return std::atan2(u.real() * v.imag() - u.imag() * v.real(), u.real() * v.real() + u.imag() * v.imag());
}

// Fraction s in [0, 1] along inside -> outside where |inside + s d| = 1.
inline double circle_crossing_fraction(Point inside, Point outside) {
    const Point d = outside - inside;
    const double a = std::norm(d);
    if (a == 0.0) return 0.0;
    const double b = inside.real() * d.real() + inside.imag() * d.imag();
    const double c = std::norm(inside) - 1.0;
    const double root = std::sqrt(std::max(0.0, b * b - a * c));
    const double s = b >= 0.0 ? -c / (b + root) : (root - b) / a;
    return std::clamp(s, 0.0, 1.0);
}

struct NoObserver {
    void operator()(double, Point) const noexcept {}
};

// Drift evaluated in real arithmetic; the hot loop avoids the NaN-recovery
// paths of std::complex multiplication and division.
struct DriftKernel {
    double alpha, omega, inv_one_m_a2;

    explicit DriftKernel(const FieldSpec& f)
        : alpha(f.alpha()), omega(f.omega()), inv_one_m_a2(1.0 / (1.0 - f.alpha() * f.alpha())) {}

    Point operator()(double x, double y) const {
        const double nx = x + alpha, ny = y;
        const double dx = 1.0 + alpha * x, dy = alpha * y;
        const double w2 = (nx * nx + ny * ny) / (dx * dx + dy * dy);
        const double px = (nx * dx - ny * dy) * inv_one_m_a2;
        const double py = (nx * dy + ny * dx) * inv_one_m_a2;
        const double re = w2 - 1.0;
        return {px * re - py * omega, px * omega + py * re};
    }
};

}  // namespace detail

/// Integrates one trajectory until it reaches |z| = 1 or t_max.
///
/// The crossing is located by intersecting the last Euler segment with the
/// circle; exit time and angle are taken at that point. The winding number is
/// floor(|Theta| / 2pi) where Theta is the unwrapped polar angle of z about
/// the focus. Theta is tracked as arg(end) - arg(start) plus 2pi per signed
/// crossing of the branch cut (the ray from the focus along -x), which equals
/// step-by-step unwrapping whenever each step turns by less than pi.
/// `observer(t, z)` sees the initial point and every interior state.
template <class Observer = detail::NoObserver>
ExitRecord run_trajectory(const FieldSpec& field, const SimConfig& config, std::uint64_t trajectory_index,
                          Observer&& observer = {}) {
    ExitRecord rec;
    rec.trajectory_index = trajectory_index;

    Point z = config.x0;
    observer(0.0, z);
    if (std::norm(z) >= 1.0) {
        rec.exit_time = 0.0;
        rec.exit_angle = detail::wrap_angle(std::arg(z));
        return rec;
    }

    GaussianStream noise(config.master_seed, trajectory_index);
    const detail::DriftKernel b(field);
    const double fx = field.focus().real(), fy = field.focus().imag();
    const double dt = config.dt;
    const double scale = std::sqrt(2.0 * config.eps * dt);
    const Mat2 a = field.noise();
    const double a11 = scale * a.a11, a12 = scale * a.a12, a21 = scale * a.a21, a22 = scale * a.a22;
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(config.t_max / dt));

    double x = z.real(), y = z.imag();
    const double start_arg = std::atan2(y - fy, x - fx);
    std::int64_t cut_crossings = 0;

    // Signed crossing of the ray {focus + (-s, 0), s > 0} by the segment p -> q.
    auto count_cut = [&](double px, double py, double qx, double qy) {
        const double ry0 = py - fy, ry1 = qy - fy;
        const bool up0 = ry0 >= 0.0, up1 = ry1 >= 0.0;
        if (up0 == up1) return;
        const double rx0 = px - fx, rx1 = qx - fx;
        const double xc = rx0 + (rx1 - rx0) * (ry0 / (ry0 - ry1));
        if (xc < 0.0) cut_crossings += up0 ? 1 : -1;
    };
    auto winding_of = [&](double ex, double ey) {
        const double theta = std::atan2(ey - fy, ex - fx) - start_arg + two_pi * static_cast<double>(cut_crossings);
        return static_cast<std::uint32_t>(std::floor(std::abs(theta) / two_pi));
    };

    for (std::uint64_t k = 0; k < max_steps; ++k) {
        const auto [g1, g2] = noise.next_pair();
        const Point v = b(x, y);
        const double nx = x + v.real() * dt + a11 * g1 + a12 * g2;
        const double ny = y + v.imag() * dt + a21 * g1 + a22 * g2;
        if (nx * nx + ny * ny >= 1.0) {
            const Point here{x, y};
            const double s = detail::circle_crossing_fraction(here, {nx, ny});
            const Point crossing = here + s * (Point{nx, ny} - here);
            count_cut(x, y, crossing.real(), crossing.imag());
            rec.exit_time = (static_cast<double>(k) + s) * dt;
            rec.exit_angle = detail::wrap_angle(std::arg(crossing));
            rec.winding_number = winding_of(crossing.real(), crossing.imag());
            return rec;
        }
        count_cut(x, y, nx, ny);
        x = nx;
        y = ny;
        observer(static_cast<double>(k + 1) * dt, Point{x, y});
    }

    rec.censored = true;
    rec.exit_time = config.t_max;
    rec.winding_number = winding_of(x, y);
    return rec;
}

/// Worker count from LCE_THREADS if set (>= 1), else the hardware concurrency.
inline unsigned default_worker_count() {
    if (const char* env = std::getenv("LCE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs all trajectories on `workers` threads (0 selects the default). Records
/// are stored by trajectory_index, so the output does not depend on scheduling.
inline EnsembleResult run_ensemble(const FieldSpec& field, const SimConfig& config, unsigned workers = 0) {
    config.validate(field);
    EnsembleResult result{config, field, {}};
    result.records.resize(config.n_trajectories);
    if (config.n_trajectories == 0) return result;

    if (workers == 0) workers = default_worker_count();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.n_trajectories));

    constexpr std::size_t chunk = 16;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= config.n_trajectories) return;
            const std::size_t end = std::min(begin + chunk, config.n_trajectories);
            for (std::size_t i = begin; i < end; ++i) {
                result.records[i] = run_trajectory(field, config, i);
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return result;
}

}  // namespace lce
