#pragma once

// Small-noise spectral asymptotics of the Dirichlet Fokker-Planck operator
// inside the limit cycle.
//
// The boundary-layer width xi(theta) is the positive 2pi-periodic solution of
//
//   -sigma xi^3 + (b0 + 2 sigma phi) xi + B xi' = 0.
//
// With u = xi^-2 this becomes the linear equation u' = a u - g, where
// a = 2 (b0 + 2 sigma phi)/B and g = 2 sigma/B. Writing a = c + P' with
// c = mean(a) > 0 and P periodic, the periodic solution is
//
//   u = -exp(P) W,   W' - c W = g exp(-P),
//
// and W has the Fourier coefficients q_k/(ik - c). This is the integrating
// factor construction mu = exp(-int a) with the quadratures done mode by mode
// on the trapezoid-sampled Fourier series, which is spectrally accurate for the
// smooth periodic data here.
//
// From xi follow the eigenvalue ladder
//   lambda_{m,n} = [(n/pi) int sigma xi^2/B ds + i m] omega_tilde,
//   omega_tilde  = 2pi / int ds/B,
// the mean first passage time
//   tau = pi^{3/2} sqrt(2 eps) exp(psi_hat/eps) / (sqrt(det H) int xi^2/B ds),
// with H from 2 H sigma H + H A + A^T H = 0 at the focus, and the long-time
// exit-point density P(theta) proportional to sigma xi^2 / B.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lce/field_model.hpp"
#include "lce/fourier.hpp"
#include "lce/linalg.hpp"

namespace lce {

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct XiSolution {
    std::vector<double> theta;
    std::vector<double> xi;
    std::vector<double> u;  // xi^-2
    double residual_max = 0.0;
    /// |u(0) on this grid - u(0) on the stride-2 subgrid|.
    double refinement_change = 0.0;
    bool converged = false;
};

namespace detail {

inline std::vector<double> every_other(std::span<const double> v) {
    std::vector<double> out;
    out.reserve(v.size() / 2);
    for (std::size_t k = 0; k < v.size(); k += 2) out.push_back(v[k]);
    return out;
}

// Periodic solution u of u' = a u - g on the grid; a and g sampled.
inline std::vector<double> periodic_linear_solution(std::span<const double> a, std::span<const double> g) {
    const std::size_t m = a.size();
    const double c = fourier::mean(a);
    if (!(c > 0.0)) {
        throw NumericalError("Bernoulli equation: mean growth rate is not positive, no decaying periodic solution", c);
    }
    const auto p = fourier::periodic_antiderivative(a);
    std::vector<double> q(m);
    for (std::size_t k = 0; k < m; ++k) q[k] = g[k] * std::exp(-p[k]);
    auto w = fourier::coefficients(q);
    for (std::size_t k = 0; k < m; ++k) {
        w[k] /= fourier::cplx(-c, fourier::wavenumber(k, m));
    }
    const auto wv = fourier::synthesize(std::move(w));
    std::vector<double> u(m);
    for (std::size_t k = 0; k < m; ++k) u[k] = -std::exp(p[k]) * wv[k];
    return u;
}

}  // namespace detail

/// Max over the grid of |-sigma xi^3 + (b0 + 2 sigma phi) xi + B xi'|, with xi'
/// by spectral differentiation.
inline double bernoulli_residual(const BoundaryData& bd, std::span<const double> xi) {
    const auto dxi = fourier::derivative(xi);
    double worst = 0.0;
    for (std::size_t k = 0; k < bd.grid_size; ++k) {
        const double b0 = bd.b0[k] + 2.0 * bd.sigma[k] * bd.phi[k];
        const double r = -bd.sigma[k] * xi[k] * xi[k] * xi[k] + b0 * xi[k] + bd.B[k] * dxi[k];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

/// Positive periodic solution of the Bernoulli equation on bd's grid.
/// `converged` reports whether u(0) agrees with the stride-2 subgrid solve to
/// within `tol`; use solve_bernoulli_refined to refine until it does.
inline XiSolution solve_bernoulli_periodic(const BoundaryData& bd, double tol = 1e-10) {
    bd.validate();
    const std::size_t m = bd.grid_size;
    std::vector<double> a(m), g(m);
    for (std::size_t k = 0; k < m; ++k) {
        a[k] = 2.0 * (bd.b0[k] + 2.0 * bd.sigma[k] * bd.phi[k]) / bd.B[k];
        g[k] = 2.0 * bd.sigma[k] / bd.B[k];
    }
    XiSolution sol;
    sol.theta = bd.theta;
    sol.u = detail::periodic_linear_solution(a, g);
    sol.xi.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (!(sol.u[k] > 0.0)) {
            throw NumericalError("Bernoulli equation: u = xi^-2 is not positive on the grid", sol.u[k]);
        }
        sol.xi[k] = 1.0 / std::sqrt(sol.u[k]);
    }
    if (m % 2 == 0 && m / 2 >= 4) {
        const auto coarse = detail::periodic_linear_solution(detail::every_other(a), detail::every_other(g));
        sol.refinement_change = std::abs(coarse[0] - sol.u[0]);
    } else {
        sol.refinement_change = std::numeric_limits<double>::infinity();
    }
    sol.converged = sol.refinement_change < tol;
    sol.residual_max = bernoulli_residual(bd, sol.xi);
    return sol;
}

struct RefinedXi {
    BoundaryData boundary;
    XiSolution xi;
};

/// Doubles the boundary grid from `start_grid` until u(0) changes by less
/// than tol between successive grids.
inline RefinedXi solve_bernoulli_refined(const FieldSpec& spec, double tol = 1e-10, std::size_t start_grid = 64,
                                         std::size_t max_grid = std::size_t{1} << 16) {
    std::size_t grid = std::max(start_grid, min_boundary_grid);
    for (;;) {
        auto bd = sample_boundary(spec, grid);
        double change = std::numeric_limits<double>::infinity();
        try {
            auto xi = solve_bernoulli_periodic(bd, tol);
            if (xi.converged) return {std::move(bd), std::move(xi)};
            change = xi.refinement_change;
        } catch (const NumericalError&) {
            // Coarse grids can under-resolve sharp boundary data; keep refining.
        }
        if (grid * 2 > max_grid) {
            throw NumericalError("Bernoulli equation: grid refinement did not converge", change);
        }
        grid *= 2;
    }
}

/// Trapezoid rule over one period for periodic samples.
inline double periodic_integral(std::span<const double> f) {
    return two_pi * fourier::mean(f);
}

inline double omega_tilde(const BoundaryData& bd) {
    std::vector<double> inv(bd.grid_size);
    for (std::size_t k = 0; k < bd.grid_size; ++k) inv[k] = 1.0 / bd.B[k];
    return two_pi / periodic_integral(inv);
}

/// int_0^{2pi} sigma xi^2 / B ds.
inline double boundary_layer_weight(const BoundaryData& bd, const XiSolution& xi) {
    std::vector<double> f(bd.grid_size);
    for (std::size_t k = 0; k < bd.grid_size; ++k) f[k] = bd.sigma[k] * xi.xi[k] * xi.xi[k] / bd.B[k];
    return periodic_integral(f);
}

/// int_0^{2pi} K0(0,s) xi(s) ds with K0(0,s) = xi(s)/B(s).
inline double k0_xi_integral(const BoundaryData& bd, const XiSolution& xi) {
    std::vector<double> f(bd.grid_size);
    for (std::size_t k = 0; k < bd.grid_size; ++k) f[k] = xi.xi[k] * xi.xi[k] / bd.B[k];
    return periodic_integral(f);
}

struct Eigenvalue {
    int n = 0;
    int m = 0;
    std::complex<double> value;
};

/// Real-part spacing kappa = (omega_tilde / pi) int sigma xi^2/B ds.
inline double ladder_spacing(const BoundaryData& bd, const XiSolution& xi) {
    return omega_tilde(bd) / std::numbers::pi * boundary_layer_weight(bd, xi);
}

/// lambda_{m,n} = n kappa + i m omega_tilde for n in [n_min, n_max] and
/// m in [-m_max, m_max], n-major. n_min defaults to 1; pass 0 to include the
/// purely imaginary n = 0, m != 0 entries (the n = 0, m = 0 entry is the
/// principal eigenvalue and is never listed here).
inline std::vector<Eigenvalue> eigenvalues(const BoundaryData& bd, const XiSolution& xi, int n_max, int m_max,
                                           int n_min = 1) {
    if (n_min < 0 || n_max < n_min || m_max < 0) throw std::invalid_argument("eigenvalues: bad index range");
    const double wt = omega_tilde(bd);
    const double kappa = wt / std::numbers::pi * boundary_layer_weight(bd, xi);
    std::vector<Eigenvalue> out;
    for (int n = n_min; n <= n_max; ++n) {
        for (int m = -m_max; m <= m_max; ++m) {
            if (n == 0 && m == 0) continue;
            out.push_back({n, m, {n * kappa, m * wt}});
        }
    }
    return out;
}

struct RiccatiResult {
    Mat2 H;
    double residual = 0.0;
    int iterations = 0;
};

inline Mat2 riccati_residual(const Mat2& H, const Mat2& A, const Mat2& sigma) {
    return 2.0 * (H * sigma * H) + H * A + A.transpose() * H;
}

/// Nonzero symmetric positive-definite solution of 2 H sigma H + H A + A^T H = 0
/// for stable A.
///
/// For invertible H, G = H^{-1} solves the Lyapunov equation
/// A G + G A^T = -2 sigma, which gives the starting point; Newton steps on the
/// quadratic equation then polish the residual below `tol`.
inline RiccatiResult riccati_H(const Mat2& A, const Mat2& sigma, double tol = 1e-12, int max_iter = 50) {
    for (const auto& ev : A.eigenvalues()) {
        if (!(ev.real() < 0.0)) throw std::invalid_argument("riccati_H: linearization must be stable");
    }
    if (!sigma.is_spd()) throw std::invalid_argument("riccati_H: sigma must be symmetric positive definite");

    const Mat2 G = detail::solve_linear_matrix_equation(
        [&](const Mat2& X) { return A * X + X * A.transpose(); }, -2.0 * sigma);
    RiccatiResult res;
    res.H = G.inverse();
    res.H = 0.5 * (res.H + res.H.transpose());
    Mat2 F = riccati_residual(res.H, A, sigma);
    res.residual = F.frobenius();
    while (res.residual >= tol && res.iterations < max_iter) {
        const Mat2& H = res.H;
        const Mat2 dH = detail::solve_linear_matrix_equation(
            [&](const Mat2& E) {
                return 2.0 * (E * sigma * H) + 2.0 * (H * sigma * E) + E * A + A.transpose() * E;
            },
            -1.0 * F);
        res.H = H + dH;
        res.H = 0.5 * (res.H + res.H.transpose());
        F = riccati_residual(res.H, A, sigma);
        res.residual = F.frobenius();
        ++res.iterations;
    }
    if (!(res.residual < tol)) {
        throw NumericalError("riccati_H: Newton iteration did not converge, residual " +
                                 std::to_string(res.residual),
                             res.residual);
    }
    if (!res.H.is_spd()) throw NumericalError("riccati_H: solution is not positive definite", res.residual);
    return res;
}

/// Asymptotic mean first passage time.
inline double mfpt(const BoundaryData& bd, const XiSolution& xi, const Mat2& H, double psi_hat, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("mfpt: eps must be positive");
    if (!(psi_hat >= 0.0)) throw std::invalid_argument("mfpt: psi_hat must be non-negative");
    const double denom = std::sqrt(H.det()) * k0_xi_integral(bd, xi);
    return std::pow(std::numbers::pi, 1.5) * std::sqrt(2.0 * eps) * std::exp(psi_hat / eps) / denom;
}

/// Barrier height (1 - |alpha|)^2 / 2 used for the Hopf-Moebius family.
inline double hopf_psi_hat(double alpha) {
    const double d = 1.0 - std::abs(alpha);
    return 0.5 * d * d;
}

inline double c_of_omega(double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("c_of_omega: omega must be positive");
    const double r = 4.0 / omega;
    return 3.0 * omega / 8.0 - (8.0 / omega) / (1.0 + r * r) + (4.0 / omega) / (4.0 + r * r);
}

/// Closed-form value of int K0 xi ds quoted for the Hopf-Moebius field.
inline double hopf_k0_xi_integral_closed_form(double alpha, double omega) {
    const double a2 = alpha * alpha;
    return 4.0 * std::numbers::pi * (a2 * a2 + 4.0 * a2 + 1.0) / (c_of_omega(omega) * (1.0 + a2));
}

/// The two closed-form MFPT expressions for the Hopf-Moebius field. `with_sum_sq`
/// carries (1 + alpha)^2 in the numerator (the quoted final display);
/// `with_sq_sum` carries (1 + alpha^2), which is what substituting the closed
/// integral into the general formula gives.
struct HopfMfptClosedForms {
    double with_sum_sq;
    double with_sq_sum;
};

inline HopfMfptClosedForms hopf_mfpt_closed_forms(double alpha, double omega, double eps) {
    const double a2 = alpha * alpha;
    const double common = c_of_omega(omega) * std::sqrt(2.0 * std::numbers::pi * eps) /
                          (4.0 * (1.0 + 4.0 * a2 + a2 * a2)) * std::exp(hopf_psi_hat(alpha) / eps);
    return {common * (1.0 + alpha) * (1.0 + alpha), common * (1.0 + a2)};
}

struct ExitDensity {
    std::vector<double> theta;
    std::vector<double> density;
    bool closed_form_available = false;

    /// Density at an arbitrary angle by periodic linear interpolation.
    double at(double angle) const {
        const std::size_t m = theta.size();
        const double h = two_pi / static_cast<double>(m);
        double x = std::fmod(angle, two_pi);
        if (x < 0.0) x += two_pi;
        const double pos = x / h;
        auto i = static_cast<std::size_t>(pos);
        if (i >= m) i = m - 1;
        const double f = pos - static_cast<double>(i);
        return (1.0 - f) * density[i] + f * density[(i + 1) % m];
    }
};

inline void normalize_periodic(std::vector<double>& p) {
    const double total = periodic_integral(p);
    for (auto& v : p) v /= total;
}

/// Long-time exit-point density P proportional to xi^2 sigma / B.
inline ExitDensity exit_density(const BoundaryData& bd, const XiSolution& xi) {
    ExitDensity d;
    d.theta = bd.theta;
    d.density.resize(bd.grid_size);
    for (std::size_t k = 0; k < bd.grid_size; ++k) d.density[k] = xi.xi[k] * xi.xi[k] * bd.sigma[k] / bd.B[k];
    normalize_periodic(d.density);
    d.closed_form_available = false;
    return d;
}

/// Hopf-Moebius closed form P proportional to (1 + 2 alpha cos theta + alpha^2)^-3,
/// normalized on the given grid (uniform over [0, 2pi)).
inline ExitDensity exit_density_closed_form(double alpha, std::span<const double> theta_grid) {
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("exit_density_closed_form: |alpha| must be < 1");
    ExitDensity d;
    d.theta.assign(theta_grid.begin(), theta_grid.end());
    d.density.resize(theta_grid.size());
    for (std::size_t k = 0; k < theta_grid.size(); ++k) {
        const double c = 1.0 + 2.0 * alpha * std::cos(theta_grid[k]) + alpha * alpha;
        d.density[k] = 1.0 / (c * c * c);
    }
    normalize_periodic(d.density);
    d.closed_form_available = true;
    return d;
}

inline double l1_distance(const ExitDensity& a, const ExitDensity& b) {
    if (a.density.size() != b.density.size()) throw std::invalid_argument("l1_distance: grids differ");
    std::vector<double> diff(a.density.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = std::abs(a.density[k] - b.density[k]);
    return periodic_integral(diff);
}

/// Leading boundary-layer profile Q0 = -sqrt(2/pi) int_0^{xi zeta} exp(-z^2/2) dz,
/// with zeta <= 0 on the interior side.
inline double boundary_layer_Q0(double xi_at_s, double zeta) {
    if (!(xi_at_s > 0.0)) throw std::invalid_argument("boundary_layer_Q0: xi must be positive");
    if (zeta > 0.0) throw std::invalid_argument("boundary_layer_Q0: zeta must be <= 0");
    return -std::erf(xi_at_s * zeta / std::numbers::sqrt2);
}

/// Physicists' Hermite polynomial H_k(x) by the three-term recurrence.
inline double hermite(int k, double x) {
    if (k < 0) throw std::invalid_argument("hermite: negative order");
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = 2.0 * x;
    for (int j = 1; j < k; ++j) {
        const double next = 2.0 * x * cur - 2.0 * j * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Radial boundary-layer eigenfunction exp(-eta^2/2) H_{2n+1}(eta/sqrt2); its
/// separation constant is 2n.
inline double radial_eigenfunction_R(int n, double eta) {
    if (n < 1) throw std::invalid_argument("radial_eigenfunction_R: n must be >= 1");
    return std::exp(-0.5 * eta * eta) * hermite(2 * n + 1, eta / std::numbers::sqrt2);
}

inline double radial_separation_constant(int n) { return 2.0 * n; }

/// T(s) = exp(-lambda int_0^s ds'/B + 2n int_0^s sigma xi^2/B ds'), integrals
/// of the trigonometric interpolants.
inline std::complex<double> tangential_factor_T(const BoundaryData& bd, const XiSolution& xi,
                                                std::complex<double> lambda, int n, double s) {
    if (s < 0.0 || s > two_pi * (1.0 + 1e-12)) throw std::invalid_argument("tangential_factor_T: s outside [0, 2pi]");
    std::vector<double> inv_b(bd.grid_size), w(bd.grid_size);
    for (std::size_t k = 0; k < bd.grid_size; ++k) {
        inv_b[k] = 1.0 / bd.B[k];
        w[k] = bd.sigma[k] * xi.xi[k] * xi.xi[k] / bd.B[k];
    }
    const double i1 = fourier::integrate_to(fourier::coefficients(inv_b), s);
    const double i2 = fourier::integrate_to(fourier::coefficients(w), s);
    return std::exp(-lambda * i1 + 2.0 * n * i2);
}

struct RadialEikonal {
    std::vector<double> r;
    std::vector<double> psi;
};

/// Quasi-potential of the rotationally symmetric field (alpha = 0): integrates
/// psi'(r) = r (1 - r^2) from psi(0) = 0 with the classical RK4 scheme.
inline RadialEikonal radial_eikonal_oracle(const FieldSpec& spec, std::size_t n_points) {
    if (spec.alpha() != 0.0) throw std::invalid_argument("radial_eikonal_oracle: only defined for alpha = 0");
    if (n_points < 2) throw std::invalid_argument("radial_eikonal_oracle: need at least two points");
    RadialEikonal out;
    out.r.resize(n_points);
    out.psi.resize(n_points);
    const double h = 1.0 / static_cast<double>(n_points - 1);
    auto f = [](double r) { return r * (1.0 - r * r); };
    out.r[0] = 0.0;
    out.psi[0] = 0.0;
    for (std::size_t k = 1; k < n_points; ++k) {
        const double r0 = h * static_cast<double>(k - 1);
        out.r[k] = h * static_cast<double>(k);
        out.psi[k] = out.psi[k - 1] + h / 6.0 * (f(r0) + 4.0 * f(r0 + 0.5 * h) + f(r0 + h));
    }
    return out;
}

struct SpectrumOptions {
    std::size_t grid = 4096;
    int n_max = 3;
    int m_max = 3;
    bool include_n0 = false;
    std::optional<double> psi_hat;  // defaults to hopf_psi_hat(alpha)
    double tol = 1e-10;
};

struct Spectrum {
    double lambda0 = 0.0;
    double mfpt = 0.0;
    double omega_tilde = 0.0;
    double kappa = 0.0;
    double psi_hat = 0.0;
    Mat2 H;
    double riccati_residual = 0.0;
    std::vector<Eigenvalue> eigenvalues;
    double xi_residual = 0.0;
    bool xi_converged = false;
};

/// Deviation of the general quadratures from the Hopf-Moebius closed forms.
struct ClosedFormReport {
    double k0_xi_integral = 0.0;
    double k0_xi_integral_closed = 0.0;
    double k0_xi_relative_deviation = 0.0;
    double mfpt_with_sum_sq = 0.0;
    double mfpt_with_sq_sum = 0.0;
    double exit_density_l1 = 0.0;
};

struct SpectrumAnalysis {
    Spectrum spectrum;
    ClosedFormReport closed_forms;
    BoundaryData boundary;
    XiSolution xi;
};

inline SpectrumAnalysis compute_spectrum(const FieldSpec& spec, double eps, const SpectrumOptions& opt = {}) {
    if (opt.grid < min_boundary_grid) throw std::invalid_argument("grid must be at least 16");
    SpectrumAnalysis out;
    out.boundary = sample_boundary(spec, opt.grid);
    out.xi = solve_bernoulli_periodic(out.boundary, opt.tol);
    const auto& bd = out.boundary;
    const auto& xi = out.xi;

    Spectrum& sp = out.spectrum;
    const auto ric = riccati_H(linearization_at_focus(spec), spec.sigma());
    sp.H = ric.H;
    sp.riccati_residual = ric.residual;
    sp.psi_hat = opt.psi_hat.value_or(hopf_psi_hat(spec.alpha()));
    sp.omega_tilde = omega_tilde(bd);
    sp.kappa = ladder_spacing(bd, xi);
    sp.eigenvalues = eigenvalues(bd, xi, opt.n_max, opt.m_max, opt.include_n0 ? 0 : 1);
    sp.mfpt = mfpt(bd, xi, sp.H, sp.psi_hat, eps);
    sp.lambda0 = 1.0 / sp.mfpt;
    sp.xi_residual = xi.residual_max;
    sp.xi_converged = xi.converged;

    ClosedFormReport& cf = out.closed_forms;
    cf.k0_xi_integral = k0_xi_integral(bd, xi);
    cf.k0_xi_integral_closed = hopf_k0_xi_integral_closed_form(spec.alpha(), spec.omega());
    cf.k0_xi_relative_deviation = (cf.k0_xi_integral - cf.k0_xi_integral_closed) / cf.k0_xi_integral_closed;
    const auto forms = hopf_mfpt_closed_forms(spec.alpha(), spec.omega(), eps);
    cf.mfpt_with_sum_sq = forms.with_sum_sq;
    cf.mfpt_with_sq_sum = forms.with_sq_sum;
    cf.exit_density_l1 = l1_distance(exit_density(bd, xi), exit_density_closed_form(spec.alpha(), bd.theta));
    return out;
}

}  // namespace lce
