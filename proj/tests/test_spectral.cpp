#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lce/spectral.hpp"

using lce::FieldSpec;
using lce::Mat2;

namespace {

constexpr double pi = std::numbers::pi;

struct Solved {
    lce::BoundaryData bd;
    lce::XiSolution xi;
};

Solved solve(double alpha, double omega, std::size_t m = 4096) {
    auto bd = lce::sample_boundary(FieldSpec(alpha, omega), m);
    auto xi = lce::solve_bernoulli_periodic(bd);
    return {std::move(bd), std::move(xi)};
}

// Backward RK4 on xi' = (sigma xi^3 - b0 xi)/B with coefficients evaluated
// analytically; the periodic orbit attracts in reverse time.
double xi_by_backward_rk4(double alpha, double omega, double theta_end, int periods, int steps_per_period) {
    const FieldSpec f(alpha, omega);
    auto rhs = [&](double th, double x) {
        const auto c = lce::boundary_components(f, th);
        return (lce::normal_diffusion(f, th) * x * x * x - c.b0 * x) / c.B;
    };
    const double h = -lce::two_pi / steps_per_period;
    double th = theta_end + lce::two_pi * periods;
    double x = 1.0;
    for (int k = 0; k < periods * steps_per_period; ++k) {
        const double k1 = rhs(th, x);
        const double k2 = rhs(th + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = rhs(th + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = rhs(th + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        th += h;
    }
    return x;
}

}  // namespace

TEST(Bernoulli, ConstantCoefficientSolutionIsSqrtTwo) {
    const auto s = solve(0.0, 15.0, 64);
    for (double v : s.xi.xi) EXPECT_NEAR(v, std::sqrt(2.0), 1e-14);
    EXPECT_TRUE(s.xi.converged);
}

TEST(Bernoulli, MatchesBackwardIntegrationOfTheOde) {
    for (auto [alpha, omega] : {std::pair{0.5, 10.0}, std::pair{0.9, 15.0}, std::pair{-0.9, 10.0}}) {
        const auto s = solve(alpha, omega);
        for (std::size_t k : {0u, 512u, 1500u, 2048u, 3333u}) {
            const double oracle = xi_by_backward_rk4(alpha, omega, s.xi.theta[k], 40, 20000);
            // The marching oracle accumulates roundoff near 1e-8 relative.
            EXPECT_NEAR(s.xi.xi[k], oracle, 1e-7 * oracle) << "alpha=" << alpha << " k=" << k;
        }
    }
}

TEST(Bernoulli, ResidualAndGridConvergence) {
    for (double alpha : {-0.95, -0.5, 0.0, 0.5, 0.9, 0.95}) {
        for (double omega : {5.0, 10.0, 15.0, 20.0}) {
            const auto a = solve(alpha, omega, 4096);
            const auto b = solve(alpha, omega, 8192);
            EXPECT_LT(a.xi.residual_max, 1e-6) << alpha << " " << omega;
            EXPECT_LT(std::abs(a.xi.u[0] - b.xi.u[0]), 1e-8) << alpha << " " << omega;
            for (double v : a.xi.xi) EXPECT_GT(v, 0.0);
        }
    }
}

// For large omega, u = xi^-2 follows c^2 with c = 1 + 2 alpha cos + alpha^2; the
// relative spread of xi^2 c^2 decays like 1/omega.
TEST(Bernoulli, LargeOmegaBalance) {
    const double alpha = 0.5;
    auto spread = [&](double omega) {
        const auto s = solve(alpha, omega, 8192);
        double lo = INFINITY, hi = 0.0;
        for (std::size_t k = 0; k < s.xi.xi.size(); ++k) {
            const double c = 1.0 + 2.0 * alpha * std::cos(s.xi.theta[k]) + alpha * alpha;
            const double v = s.xi.xi[k] * s.xi.xi[k] * c * c;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi / lo - 1.0;
    };
    const double s200 = spread(200.0), s400 = spread(400.0), s800 = spread(800.0);
    EXPECT_LT(s200, 0.06);
    EXPECT_LT(s800, 0.02);
    EXPECT_NEAR(s200 / s400, 2.0, 0.1);
    EXPECT_NEAR(s400 / s800, 2.0, 0.1);
}

TEST(Bernoulli, RefinedSolveConverges) {
    const auto r = lce::solve_bernoulli_refined(FieldSpec(0.9, 15.0), 1e-10);
    EXPECT_TRUE(r.xi.converged);
    EXPECT_LT(r.xi.refinement_change, 1e-10);
}

TEST(Bernoulli, RejectsBoundaryWithoutDecayingSolution) {
    auto bd = lce::sample_boundary(FieldSpec(0.0, 1.0), 32);
    for (auto& v : bd.b0) v = -1.0;
    EXPECT_THROW(lce::solve_bernoulli_periodic(bd), std::invalid_argument);
}

TEST(OmegaTilde, EqualsOmegaForIdentityNoise) {
    for (double alpha : {-0.9, -0.3, 0.0, 0.6, 0.95}) {
        for (double omega : {1.0, 10.0, 15.0}) {
            const auto bd = lce::sample_boundary(FieldSpec(alpha, omega), 4096);
            EXPECT_NEAR(lce::omega_tilde(bd), omega, 1e-8 * omega);
        }
    }
}

TEST(Ladder, ConstantCaseIsFourNPlusIMOmega) {
    const auto s = solve(0.0, 15.0, 256);
    EXPECT_NEAR(lce::ladder_spacing(s.bd, s.xi), 4.0, 1e-13);
    const auto ev = lce::eigenvalues(s.bd, s.xi, 3, 3);
    ASSERT_EQ(ev.size(), 21u);
    for (const auto& e : ev) {
        EXPECT_NEAR(e.value.real(), 4.0 * e.n, 1e-12);
        EXPECT_NEAR(e.value.imag(), 15.0 * e.m, 1e-11);
    }
    EXPECT_EQ(ev.front().n, 1);
    EXPECT_EQ(ev.front().m, -3);
}

TEST(Ladder, HopfSpacingIsFourForEveryAlpha) {
    for (double alpha : {-0.9, 0.5, 0.9}) {
        const auto s = solve(alpha, 10.0);
        EXPECT_NEAR(lce::ladder_spacing(s.bd, s.xi), 4.0, 1e-9);
        EXPECT_NEAR(lce::k0_xi_integral(s.bd, s.xi), 4.0 * pi / 10.0, 1e-10);
    }
}

TEST(Ladder, StructureAndConjugateSymmetry) {
    const auto s = solve(0.5, 10.0, 1024);
    const auto ev = lce::eigenvalues(s.bd, s.xi, 3, 2);
    auto find = [&](int n, int m) {
        return std::find_if(ev.begin(), ev.end(), [&](const auto& e) { return e.n == n && e.m == m; })->value;
    };
    for (int n = 1; n <= 3; ++n) {
        EXPECT_EQ(find(n, 0).imag(), 0.0);
        for (int m = -2; m <= 2; ++m) {
            EXPECT_EQ(find(n, -m), std::conj(find(n, m)));
            EXPECT_NEAR(find(n, m).real(), n * find(1, m).real(), 1e-12);
        }
    }
    const auto with0 = lce::eigenvalues(s.bd, s.xi, 1, 2, 0);
    EXPECT_EQ(with0.size(), 4u + 5u);
    EXPECT_THROW(lce::eigenvalues(s.bd, s.xi, 0, 1), std::invalid_argument);
}

TEST(Riccati, WorkedExamples) {
    const Mat2 A{-1.0, -15.0, 15.0, -1.0};
    const auto h1 = lce::riccati_H(A, Mat2::identity());
    EXPECT_NEAR((h1.H - Mat2::identity()).frobenius(), 0.0, 1e-12);
    EXPECT_LT(h1.residual, 1e-12);
    const auto h2 = lce::riccati_H(3.0 * A, Mat2::identity());
    EXPECT_NEAR((h2.H - 3.0 * Mat2::identity()).frobenius(), 0.0, 1e-11);
    const auto h3 = lce::riccati_H(A, 2.0 * Mat2::identity());
    EXPECT_NEAR((h3.H - 0.5 * Mat2::identity()).frobenius(), 0.0, 1e-12);
}

TEST(Riccati, NonNormalCaseAgainstExplicitLyapunovInverse) {
    // For 2x2, G = H^-1 solves A G + G A^T = -2 sigma; solve that system by hand.
    const Mat2 A{-2.0, 3.0, -0.5, -1.0};
    const Mat2 S{1.5, 0.2, 0.2, 0.7};
    const double a = A.a11, b = A.a12, c = A.a21, d = A.a22;
    // Unknowns g11, g12 (= g21), g22 of the symmetric G.
    const std::array<std::array<double, 3>, 3> m{{{2 * a, 2 * b, 0.0}, {c, a + d, b}, {0.0, 2 * c, 2 * d}}};
    const auto g = lce::detail::solve_dense<3>(m, {-2 * S.a11, -2 * S.a12, -2 * S.a22});
    const Mat2 expected = Mat2{g[0], g[1], g[1], g[2]}.inverse();
    const auto res = lce::riccati_H(A, S);
    EXPECT_NEAR((res.H - expected).frobenius(), 0.0, 1e-12);
    EXPECT_TRUE(res.H.is_spd());
    EXPECT_LT(lce::riccati_residual(res.H, A, S).frobenius(), 1e-12);
}

TEST(Riccati, ResidualBelowToleranceAcrossHopfFamily) {
    for (double omega : {1.0, 10.0, 15.0, 100.0}) {
        const auto A = lce::linearization_at_focus(FieldSpec(0.3, omega));
        EXPECT_LT(lce::riccati_H(A, Mat2::identity()).residual, 1e-12);
    }
}

TEST(Riccati, RejectsBadInputs) {
    EXPECT_THROW(lce::riccati_H(Mat2{1.0, 0.0, 0.0, -1.0}, Mat2::identity()), std::invalid_argument);
    EXPECT_THROW(lce::riccati_H(Mat2{0.0, -1.0, 1.0, 0.0}, Mat2::identity()), std::invalid_argument);
    EXPECT_THROW(lce::riccati_H(-1.0 * Mat2::identity(), Mat2{1.0, 2.0, 2.0, 1.0}), std::invalid_argument);
}

TEST(Mfpt, ConstantCaseFormula) {
    const auto s = solve(0.0, 15.0, 64);
    const double eps = 0.01, psi = 0.5;
    const double expected = std::pow(pi, 1.5) * std::sqrt(2.0 * eps) * std::exp(psi / eps) / (4.0 * pi / 15.0);
    EXPECT_NEAR(lce::mfpt(s.bd, s.xi, Mat2::identity(), psi, eps) / expected, 1.0, 1e-13);
    EXPECT_THROW(lce::mfpt(s.bd, s.xi, Mat2::identity(), psi, 0.0), std::invalid_argument);
    EXPECT_THROW(lce::mfpt(s.bd, s.xi, Mat2::identity(), -1.0, 0.1), std::invalid_argument);
}

TEST(Mfpt, ScalingInEpsAndMonotonicity) {
    const auto s = solve(0.9, 15.0, 1024);
    const double psi = lce::hopf_psi_hat(0.9);
    auto scaled = [&](double eps) {
        return lce::mfpt(s.bd, s.xi, Mat2::identity(), psi, eps) / (std::sqrt(eps) * std::exp(psi / eps));
    };
    EXPECT_NEAR(scaled(1e-3) / scaled(5e-3), 1.0, 1e-13);
    double prev = INFINITY;
    for (double eps = 1e-4; eps < 2.0 * psi; eps *= 1.3) {
        const double t = lce::mfpt(s.bd, s.xi, Mat2::identity(), psi, eps);
        EXPECT_LT(t, prev);
        prev = t;
    }
}

TEST(Mfpt, DeterminantOfHEntersAsSquareRoot) {
    const auto s = solve(0.0, 15.0, 64);
    const double t1 = lce::mfpt(s.bd, s.xi, Mat2::identity(), 0.1, 0.05);
    const double t4 = lce::mfpt(s.bd, s.xi, 2.0 * Mat2::identity(), 0.1, 0.05);
    EXPECT_NEAR(t1 / t4, 2.0, 1e-13);
}

TEST(HopfClosedForms, BarrierAndC) {
    EXPECT_NEAR(lce::hopf_psi_hat(0.9), 0.005, 1e-15);
    EXPECT_NEAR(lce::hopf_psi_hat(-0.9), 0.005, 1e-15);
    EXPECT_DOUBLE_EQ(lce::hopf_psi_hat(0.0), 0.5);
    EXPECT_NEAR(lce::c_of_omega(10.0), 3.1565, 1e-4);
    EXPECT_NEAR(lce::c_of_omega(15.0), 5.1926, 1e-4);
    EXPECT_NEAR(lce::c_of_omega(1e8) / 1e8, 3.0 / 8.0, 1e-12);
    EXPECT_THROW(lce::c_of_omega(0.0), std::invalid_argument);
}

TEST(HopfClosedForms, IntegralAtZeroAlphaAndMfptVariants) {
    EXPECT_NEAR(lce::hopf_k0_xi_integral_closed_form(0.0, 10.0), 4.0 * pi / lce::c_of_omega(10.0), 1e-14);
    const auto zero = lce::hopf_mfpt_closed_forms(0.0, 15.0, 1e-2);
    EXPECT_DOUBLE_EQ(zero.with_sum_sq, zero.with_sq_sum);
    const auto f = lce::hopf_mfpt_closed_forms(0.9, 15.0, 1e-3);
    EXPECT_NEAR(f.with_sum_sq / f.with_sq_sum, 1.9 * 1.9 / 1.81, 1e-13);
}

TEST(ExitDensity, NormalizedAndUniformAtZeroAlpha) {
    const auto s = solve(0.0, 10.0, 128);
    const auto p = lce::exit_density(s.bd, s.xi);
    for (double v : p.density) EXPECT_NEAR(v, 1.0 / (2.0 * pi), 1e-14);
    const auto q = lce::exit_density_closed_form(0.0, s.bd.theta);
    for (double v : q.density) EXPECT_NEAR(v, 1.0 / (2.0 * pi), 1e-14);
    for (double alpha : {-0.9, 0.5}) {
        const auto t = solve(alpha, 10.0);
        EXPECT_NEAR(lce::periodic_integral(lce::exit_density(t.bd, t.xi).density), 1.0, 1e-13);
    }
}

TEST(ExitDensity, ClosedFormModeSymmetryAndRatio) {
    const auto bd = lce::sample_boundary(FieldSpec(0.0, 1.0), 1024);
    const auto neg = lce::exit_density_closed_form(-0.9, bd.theta);
    const auto pos = lce::exit_density_closed_form(0.9, bd.theta);
    EXPECT_EQ(std::max_element(neg.density.begin(), neg.density.end()) - neg.density.begin(), 0);
    EXPECT_EQ(std::max_element(pos.density.begin(), pos.density.end()) - pos.density.begin(), 512);
    for (std::size_t k = 1; k < 1024; ++k) EXPECT_NEAR(pos.density[k], pos.density[1024 - k], 1e-12 * pos.density[k]);
    EXPECT_NEAR(pos.density[512] / pos.density[0], std::pow(19.0, 6), 1e-6 * std::pow(19.0, 6));
    EXPECT_THROW(lce::exit_density_closed_form(1.0, bd.theta), std::invalid_argument);
}

TEST(ExitDensity, GeneralApproachesClosedFormAsOmegaGrows) {
    std::vector<double> l1;
    for (double omega : {5.0, 10.0, 20.0, 40.0}) {
        const auto s = solve(0.5, omega);
        l1.push_back(lce::l1_distance(lce::exit_density(s.bd, s.xi), lce::exit_density_closed_form(0.5, s.bd.theta)));
    }
    for (std::size_t i = 1; i < l1.size(); ++i) EXPECT_LT(l1[i], l1[i - 1]);
}

TEST(ExitDensity, InterpolationAtArbitraryAngle) {
    const auto s = solve(0.5, 10.0, 256);
    const auto p = lce::exit_density(s.bd, s.xi);
    EXPECT_DOUBLE_EQ(p.at(s.bd.theta[7]), p.density[7]);
    EXPECT_NEAR(p.at(-0.3), p.at(lce::two_pi - 0.3), 1e-14);
    EXPECT_NEAR(p.at(0.5 * (s.bd.theta[3] + s.bd.theta[4])), 0.5 * (p.density[3] + p.density[4]), 1e-14);
}

TEST(BoundaryLayer, Q0Values) {
    EXPECT_EQ(lce::boundary_layer_Q0(1.3, 0.0), 0.0);
    EXPECT_NEAR(lce::boundary_layer_Q0(1.0, -1.0), 0.682689492, 1e-9);
    EXPECT_NEAR(lce::boundary_layer_Q0(2.0, -0.5), 0.682689492, 1e-9);
    EXPECT_NEAR(lce::boundary_layer_Q0(1.0, -40.0), 1.0, 1e-15);
    EXPECT_THROW(lce::boundary_layer_Q0(1.0, 0.1), std::invalid_argument);
    EXPECT_THROW(lce::boundary_layer_Q0(0.0, -1.0), std::invalid_argument);
}

TEST(BoundaryLayer, HermiteRecurrence) {
    const double x = 0.37;
    EXPECT_DOUBLE_EQ(lce::hermite(0, x), 1.0);
    EXPECT_DOUBLE_EQ(lce::hermite(1, x), 2.0 * x);
    EXPECT_NEAR(lce::hermite(2, x), 4.0 * x * x - 2.0, 1e-15);
    EXPECT_NEAR(lce::hermite(3, x), 8.0 * x * x * x - 12.0 * x, 1e-14);
    EXPECT_NEAR(lce::hermite(5, x), 32 * std::pow(x, 5) - 160 * std::pow(x, 3) + 120 * x, 1e-12);
    EXPECT_THROW(lce::hermite(-1, x), std::invalid_argument);
}

TEST(BoundaryLayer, RadialEigenfunctions) {
    const double r2 = std::sqrt(2.0);
    for (double eta : {-3.0, -1.1, -0.2, 0.5}) {
        const double y = eta / r2;
        EXPECT_NEAR(lce::radial_eigenfunction_R(1, eta), std::exp(-0.5 * eta * eta) * (8 * y * y * y - 12 * y), 1e-13);
    }
    for (int n = 1; n <= 4; ++n) {
        EXPECT_EQ(lce::radial_eigenfunction_R(n, 0.0), 0.0);
        EXPECT_LT(std::abs(lce::radial_eigenfunction_R(n, -30.0)), 1e-100);
        EXPECT_EQ(lce::radial_separation_constant(n), 2.0 * n);
        // R'' + eta R' + (2 + mu_n) R = 0 by finite differences.
        const double h = 1e-4;
        for (double eta : {-2.5, -1.0, -0.3}) {
            auto R = [&](double e) { return lce::radial_eigenfunction_R(n, e); };
            const double d2 = (R(eta + h) - 2.0 * R(eta) + R(eta - h)) / (h * h);
            const double d1 = (R(eta + h) - R(eta - h)) / (2.0 * h);
            const double scale = 1.0 + std::abs(lce::hermite(2 * n + 1, eta / r2));
            EXPECT_NEAR(d2 + eta * d1 + (2.0 + lce::radial_separation_constant(n)) * R(eta), 0.0, 1e-4 * scale);
        }
    }
    EXPECT_THROW(lce::radial_eigenfunction_R(0, 1.0), std::invalid_argument);
}

TEST(TangentialFactor, PeriodicExactlyOnTheLadder) {
    const auto s = solve(0.5, 10.0, 2048);
    const double wt = lce::omega_tilde(s.bd);
    for (const auto& e : lce::eigenvalues(s.bd, s.xi, 3, 3)) {
        const auto t0 = lce::tangential_factor_T(s.bd, s.xi, e.value, e.n, 0.0);
        const auto t1 = lce::tangential_factor_T(s.bd, s.xi, e.value, e.n, lce::two_pi);
        EXPECT_NEAR(std::abs(t0 - 1.0), 0.0, 1e-15);
        EXPECT_LT(std::abs(t1 - t0), 1e-8);
        const auto off = lce::tangential_factor_T(s.bd, s.xi, e.value + 0.5 * wt, e.n, lce::two_pi);
        EXPECT_GT(std::abs(off - t0), 0.5);
        const auto shifted = lce::tangential_factor_T(s.bd, s.xi, e.value + 0.3, e.n, lce::two_pi);
        EXPECT_GT(std::abs(std::abs(shifted) - 1.0), 1e-3);
    }
    for (double x : {0.0, 1.0, 4.0, 6.0}) {
        EXPECT_EQ(lce::tangential_factor_T(s.bd, s.xi, 0.0, 0, x), 1.0);
    }
    EXPECT_THROW(lce::tangential_factor_T(s.bd, s.xi, 0.0, 0, -0.1), std::invalid_argument);
    EXPECT_THROW(lce::tangential_factor_T(s.bd, s.xi, 0.0, 0, 7.0), std::invalid_argument);
}

TEST(TangentialFactor, SolvesItsFirstOrderEquation) {
    const auto s = solve(0.9, 15.0, 4096);
    const std::complex<double> lambda{4.0, 15.0};
    const FieldSpec f(0.9, 15.0);
    const double h = 1e-5;
    for (double x : {0.7, 2.0, 3.1, 5.5}) {
        const auto d = (lce::tangential_factor_T(s.bd, s.xi, lambda, 1, x + h) -
                        lce::tangential_factor_T(s.bd, s.xi, lambda, 1, x - h)) / (2.0 * h);
        const double B = lce::boundary_components(f, x).B;
        // xi^2 at x from the trigonometric interpolant of u.
        const auto cu = lce::fourier::coefficients(s.xi.u);
        std::complex<double> u{};
        for (std::size_t k = 0; k < cu.size(); ++k) u += cu[k] * std::polar(1.0, lce::fourier::wavenumber(k, cu.size()) * x);
        const double w = 1.0 / (u.real() * B);
        const auto T = lce::tangential_factor_T(s.bd, s.xi, lambda, 1, x);
        EXPECT_LT(std::abs(d - (-lambda / B + 2.0 * w) * T), 1e-5 * std::abs(T) * (1.0 + std::abs(lambda) / B));
    }
}

TEST(Eikonal, RadialOracle) {
    const auto e = lce::radial_eikonal_oracle(FieldSpec(0.0, 15.0), 101);
    EXPECT_EQ(e.psi.front(), 0.0);
    EXPECT_NEAR(e.psi.back(), 0.25, 1e-14);
    for (std::size_t k = 1; k < e.r.size(); ++k) {
        EXPECT_GT(e.psi[k], e.psi[k - 1]);
        const double r = e.r[k];
        EXPECT_NEAR(e.psi[k], r * r / 2 - r * r * r * r / 4, 1e-14);
    }
    EXPECT_NEAR((e.psi[1] - e.psi[0]) / (e.r[1] - e.r[0]), 0.0, 0.01);
    EXPECT_THROW(lce::radial_eikonal_oracle(FieldSpec(0.5, 15.0), 10), std::invalid_argument);
    EXPECT_THROW(lce::radial_eikonal_oracle(FieldSpec(0.0, 15.0), 1), std::invalid_argument);
}

TEST(ComputeSpectrum, ConstantCaseAndReport) {
    const auto a = lce::compute_spectrum(FieldSpec(0.0, 15.0), 1e-2);
    EXPECT_NEAR(a.spectrum.kappa, 4.0, 1e-12);
    EXPECT_NEAR(a.spectrum.omega_tilde, 15.0, 1e-12);
    EXPECT_NEAR(a.spectrum.lambda0 * a.spectrum.mfpt, 1.0, 1e-15);
    EXPECT_EQ(a.spectrum.psi_hat, 0.5);
    EXPECT_EQ(a.spectrum.eigenvalues.size(), 21u);
    EXPECT_TRUE(a.spectrum.xi_converged);
    EXPECT_NEAR(a.closed_forms.exit_density_l1, 0.0, 1e-13);
    lce::SpectrumOptions opt;
    opt.psi_hat = 0.25;
    opt.include_n0 = true;
    const auto b = lce::compute_spectrum(FieldSpec(0.0, 15.0), 1e-2, opt);
    EXPECT_EQ(b.spectrum.psi_hat, 0.25);
    EXPECT_EQ(b.spectrum.eigenvalues.size(), 27u);
    opt.grid = 8;
    EXPECT_THROW(lce::compute_spectrum(FieldSpec(0.0, 15.0), 1e-2, opt), std::invalid_argument);
}

TEST(ComputeSpectrum, OscillationParameters) {
    const auto a = lce::compute_spectrum(FieldSpec(0.9, 15.0), 1e-3);
    EXPECT_NEAR(a.spectrum.kappa, 4.0, 1e-9);
    EXPECT_NEAR((a.spectrum.H - Mat2::identity()).frobenius(), 0.0, 1e-10);
    EXPECT_LT(a.spectrum.riccati_residual, 1e-12);
    const double expected = std::pow(pi, 1.5) * std::sqrt(2e-3) * std::exp(5.0) / (4.0 * pi / 15.0);
    EXPECT_NEAR(a.spectrum.mfpt / expected, 1.0, 1e-9);
}
