#pragma once

// Fixed-size 2x2 real matrices. Everything the toolkit needs in the plane
// (noise matrices, Jacobians, the Riccati solve) lives at this size, so a
// dedicated value type beats pulling in a general linear-algebra package.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace lce {

using Point = std::complex<double>;

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    constexpr double trace() const { return a11 + a22; }
    constexpr double det() const { return a11 * a22 - a12 * a21; }
    constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }

    Mat2 inverse() const {
        const double d = det();
        if (d == 0.0 || !std::isfinite(d)) {
            throw std::domain_error("Mat2::inverse: singular matrix");
        }
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    double frobenius() const {
        return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
    }

    bool is_symmetric(double tol = 0.0) const { return std::abs(a12 - a21) <= tol; }

    /// Symmetric positive definite by Sylvester's criterion.
    bool is_spd(double sym_tol = 1e-12) const {
        return is_symmetric(sym_tol * (1.0 + frobenius())) && a11 > 0.0 && det() > 0.0;
    }

    /// Eigenvalues as a complex pair (first has non-negative imaginary part).
    std::array<std::complex<double>, 2> eigenvalues() const {
        const double half_tr = 0.5 * trace();
        const std::complex<double> disc = std::sqrt(std::complex<double>(half_tr * half_tr - det()));
        std::complex<double> l1 = half_tr + disc;
        std::complex<double> l2 = half_tr - disc;
        if (l1.imag() < l2.imag()) std::swap(l1, l2);
        return {l1, l2};
    }

    Point apply(Point v) const {
        return {a11 * v.real() + a12 * v.imag(), a21 * v.real() + a22 * v.imag()};
    }

    friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
    }
    friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
    }
    friend constexpr Mat2 operator*(double s, const Mat2& x) {
        return {s * x.a11, s * x.a12, s * x.a21, s * x.a22};
    }
    friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
                x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

namespace detail {

// Dense Gaussian elimination with partial pivoting for the tiny systems that
// show up in the Lyapunov and Newton steps.
template <std::size_t N>
std::array<double, N> solve_dense(std::array<std::array<double, N>, N> a, std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (a[piv][col] == 0.0) throw std::domain_error("solve_dense: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Solves the Sylvester-type equation L(X) = C where L is linear in the four
// entries of X; `apply` evaluates L on a basis matrix.
template <class LinearMap>
Mat2 solve_linear_matrix_equation(LinearMap&& apply, const Mat2& rhs) {
    const std::array<Mat2, 4> basis{Mat2{1, 0, 0, 0}, Mat2{0, 1, 0, 0}, Mat2{0, 0, 1, 0}, Mat2{0, 0, 0, 1}};
    std::array<std::array<double, 4>, 4> a{};
    for (std::size_t j = 0; j < 4; ++j) {
        const Mat2 col = apply(basis[j]);
        a[0][j] = col.a11;
        a[1][j] = col.a12;
        a[2][j] = col.a21;
        a[3][j] = col.a22;
    }
    const auto x = solve_dense<4>(a, {rhs.a11, rhs.a12, rhs.a21, rhs.a22});
    return {x[0], x[1], x[2], x[3]};
}

}  // namespace detail
}  // namespace lce
