#pragma once

// Discrete Fourier tools for real periodic samples on a uniform grid over
// [0, 2pi): coefficients, spectral differentiation, and exact integration of
// the trigonometric interpolant.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace lce::fourier {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place DFT, X_k = sum_j x_j exp(-+2 pi i jk/N) (minus sign forward). Radix-2
/// for power-of-two sizes, direct summation otherwise. No 1/N scaling.
inline void dft(std::vector<cplx>& data, bool inverse = false) {
    const std::size_t n = data.size();
    if (n <= 1) return;
    const double sign = inverse ? 1.0 : -1.0;
    if (!is_power_of_two(n)) {
        std::vector<cplx> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc{};
            for (std::size_t j = 0; j < n; ++j) {
                const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
                acc += data[j] * cplx(std::cos(ang), std::sin(ang));
            }
            out[k] = acc;
        }
        data.swap(out);
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                // Twiddles from the angle directly, not by repeated multiplication.
                const double a = ang * static_cast<double>(k);
                const cplx w(std::cos(a), std::sin(a));
                const cplx u = data[i + k];
                const cplx v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
            }
        }
    }
}

/// Signed wavenumber of DFT bin k for size n; the Nyquist bin maps to 0 for
/// derivative purposes (its derivative is ambiguous on a real grid).
inline double wavenumber(std::size_t k, std::size_t n) {
    if (2 * k == n) return 0.0;
    return k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

/// Fourier coefficients c_k with f(theta_j) = sum_k c_k exp(i k theta_j).
inline std::vector<cplx> coefficients(std::span<const double> samples) {
    std::vector<cplx> c(samples.begin(), samples.end());
    dft(c);
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (auto& v : c) v *= inv_n;
    return c;
}

/// Samples of the trigonometric interpolant from its coefficients.
inline std::vector<double> synthesize(std::vector<cplx> coeffs) {
    dft(coeffs, true);
    std::vector<double> out(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) out[j] = coeffs[j].real();
    return out;
}

inline std::vector<double> derivative(std::span<const double> samples) {
    auto c = coefficients(samples);
    const std::size_t n = c.size();
    for (std::size_t k = 0; k < n; ++k) c[k] *= cplx(0.0, wavenumber(k, n));
    return synthesize(std::move(c));
}

/// Mean value of periodic samples (the trapezoid rule over one period / 2pi).
inline double mean(std::span<const double> samples) {
    double s = 0.0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
}

/// Integral over [0, s] of the trigonometric interpolant given by `coeffs`,
/// for any real s.
inline double integrate_to(const std::vector<cplx>& coeffs, double s) {
    const std::size_t n = coeffs.size();
    double acc = coeffs[0].real() * s;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = wavenumber(k, n);
        if (kk == 0.0) continue;
        // c_k (e^{iks} - 1)/(ik)
        const cplx e(std::cos(kk * s) - 1.0, std::sin(kk * s));
        acc += (coeffs[k] * e / cplx(0.0, kk)).real();
    }
    return acc;
}

/// Periodic part of the antiderivative at the grid points: returns P with
/// P(theta_j) = int_0^{theta_j} (f - mean f), so P(0) = 0.
inline std::vector<double> periodic_antiderivative(std::span<const double> samples) {
    auto c = coefficients(samples);
    const std::size_t n = c.size();
    c[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = wavenumber(k, n);
        c[k] = kk == 0.0 ? cplx{} : c[k] / cplx(0.0, kk);
    }
    auto p = synthesize(std::move(c));
    const double p0 = p[0];
    for (auto& v : p) v -= p0;
    return p;
}

}  // namespace lce::fourier
