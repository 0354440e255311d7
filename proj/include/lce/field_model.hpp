#pragma once

// Hopf-Moebius drift field on the unit disk.
//
// The complex Hopf field b(z) = z(-1 + |z|^2 + i*omega) has a stable focus at
// the origin and the unit circle as a repelling limit cycle. Conjugating by
// the disk automorphism z -> (z - alpha)/(1 - alpha z) moves the focus to
// (-alpha, 0) while keeping the circle invariant:
//
//   b_alpha(z) = (z + alpha)(1 + alpha z)/(1 - alpha^2)
//                * (-1 + |(z + alpha)/(1 + alpha z)|^2 + i*omega)
//
// In a strip around the circle the field splits into a normal part
// -rho * b0(theta) * nu and a tangential part B(theta) * tau, with
//
//   b0(theta) = 2 (1 - alpha^2 - omega alpha sin(theta)) / (1 - alpha^2)
//   B(theta)  = omega (1 + 2 alpha cos(theta) + alpha^2) / (1 - alpha^2)
//
// The boundary coordinate is the polar angle, period 2*pi.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lce/linalg.hpp"

namespace lce {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

class FieldSpec {
public:
    FieldSpec(double alpha, double omega, Mat2 noise = Mat2::identity())
        : alpha_(alpha), omega_(omega), noise_(noise) {
        if (!std::isfinite(alpha) || !(std::abs(alpha) < 1.0)) {
            throw std::invalid_argument("FieldSpec: alpha must satisfy |alpha| < 1");
        }
        if (!std::isfinite(omega) || !(omega > 0.0)) {
            throw std::invalid_argument("FieldSpec: omega must be positive");
        }
        if (noise.det() == 0.0 || !std::isfinite(noise.frobenius())) {
            throw std::invalid_argument("FieldSpec: noise matrix must be finite and nonsingular");
        }
    }

    double alpha() const { return alpha_; }
    double omega() const { return omega_; }
    const Mat2& noise() const { return noise_; }
    /// Diffusion matrix sigma = a a^T.
    Mat2 sigma() const { return noise_ * noise_.transpose(); }
    Point focus() const { return {-alpha_, 0.0}; }
    bool identity_noise() const { return noise_ == Mat2::identity(); }

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

private:
    double alpha_;
    double omega_;
    Mat2 noise_;
};

/// Drift b_alpha(z). Valid everywhere except the pole z = -1/alpha, which lies
/// outside the closed disk.
inline Point drift(const FieldSpec& spec, Point z) {
    const double a = spec.alpha();
    const Point num = z + a;
    const Point den = 1.0 + a * z;
    const Point w = num / den;
    return num * den / (1.0 - a * a) * Point(-1.0 + std::norm(w), spec.omega());
}

struct BoundaryComponents {
    double b0;  // minus the radial derivative of the radial drift
    double B;   // tangential speed
};

inline BoundaryComponents boundary_components(const FieldSpec& spec, double theta) {
    const double a = spec.alpha();
    const double w = spec.omega();
    const double one_m_a2 = 1.0 - a * a;
    return {2.0 * (one_m_a2 - w * a * std::sin(theta)) / one_m_a2,
            w * (1.0 + 2.0 * a * std::cos(theta) + a * a) / one_m_a2};
}

/// Normal-normal diffusion coefficient nu^T sigma nu at the boundary point theta.
inline double normal_diffusion(const FieldSpec& spec, double theta) {
    const Mat2 s = spec.sigma();
    const double c = std::cos(theta), sn = std::sin(theta);
    return s.a11 * c * c + (s.a12 + s.a21) * c * sn + s.a22 * sn * sn;
}

/// Periodic boundary functions on a uniform grid theta_k = 2*pi*k/M.
struct BoundaryData {
    std::size_t grid_size = 0;
    std::vector<double> theta;
    std::vector<double> b0;
    std::vector<double> B;
    std::vector<double> sigma;
    std::vector<double> phi;

    double step() const { return two_pi / static_cast<double>(grid_size); }

    /// Throws std::invalid_argument if B <= 0 somewhere, array sizes disagree,
    /// or the mean of (b0 + 2 sigma phi)/B is not positive.
    void validate() const {
        const std::size_t m = grid_size;
        if (m == 0 || theta.size() != m || b0.size() != m || B.size() != m ||
            sigma.size() != m || phi.size() != m) {
            throw std::invalid_argument("BoundaryData: inconsistent array sizes");
        }
        double mean_ratio = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (!(B[k] > 0.0)) throw std::invalid_argument("BoundaryData: tangential speed B must be positive");
            if (!(sigma[k] > 0.0)) throw std::invalid_argument("BoundaryData: sigma must be positive");
            mean_ratio += (b0[k] + 2.0 * sigma[k] * phi[k]) / B[k];
        }
        if (!(mean_ratio > 0.0)) {
            throw std::invalid_argument("BoundaryData: mean of b0/B must be positive");
        }
    }
};

inline constexpr std::size_t min_boundary_grid = 16;

inline BoundaryData sample_boundary(const FieldSpec& spec, std::size_t grid_size) {
    if (grid_size < min_boundary_grid) {
        throw std::invalid_argument("sample_boundary: grid_size must be at least 16");
    }
    BoundaryData bd;
    bd.grid_size = grid_size;
    bd.theta.resize(grid_size);
    bd.b0.resize(grid_size);
    bd.B.resize(grid_size);
    bd.sigma.resize(grid_size);
    bd.phi.assign(grid_size, 0.0);
    const double h = bd.step();
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double th = h * static_cast<double>(k);
        const auto [b0, B] = boundary_components(spec, th);
        bd.theta[k] = th;
        bd.b0[k] = b0;
        bd.B[k] = B;
        bd.sigma[k] = normal_diffusion(spec, th);
    }
    bd.validate();
    return bd;
}

/// Jacobian of the drift at the focus. Since b_alpha(z) = (z + alpha) g(z)
/// with g(-alpha) = -1 + i*omega, the linearization is multiplication by
/// -1 + i*omega for every alpha.
inline Mat2 linearization_at_focus(const FieldSpec& spec) {
    const double w = spec.omega();
    return {-1.0, -w, w, -1.0};
}

// Plain-text key/value form: "alpha = ...", "omega = ...", "noise = identity"
// (or four matrix entries in row order). Doubles use 17 significant digits so
// the text round-trips exactly.

inline std::string format_exact(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string to_config_text(const FieldSpec& spec) {
    std::ostringstream os;
    os << "alpha = " << format_exact(spec.alpha()) << '\n';
    os << "omega = " << format_exact(spec.omega()) << '\n';
    if (spec.identity_noise()) {
        os << "noise = identity\n";
    } else {
        const Mat2& a = spec.noise();
        os << "noise = " << format_exact(a.a11) << ' ' << format_exact(a.a12) << ' '
           << format_exact(a.a21) << ' ' << format_exact(a.a22) << '\n';
    }
    return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid number for '" + key + "': " + text);
    }
    if (used != text.size()) throw std::invalid_argument("invalid number for '" + key + "': " + text);
    return v;
}

}  // namespace detail

/// Parses the key/value form. Lines starting with '#' and unknown keys are
/// ignored; alpha and omega are required.
inline FieldSpec field_from_config_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool have_alpha = false, have_omega = false;
    double alpha = 0.0, omega = 0.0;
    Mat2 noise = Mat2::identity();
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "alpha") {
            alpha = detail::parse_double(key, value);
            have_alpha = true;
        } else if (key == "omega") {
            omega = detail::parse_double(key, value);
            have_omega = true;
        } else if (key == "noise") {
            if (value == "identity") {
                noise = Mat2::identity();
            } else {
                std::istringstream vs(value);
                std::string e[4];
                if (!(vs >> e[0] >> e[1] >> e[2] >> e[3])) {
                    throw std::invalid_argument("noise must be 'identity' or four numbers");
                }
                noise = {detail::parse_double(key, e[0]), detail::parse_double(key, e[1]),
                         detail::parse_double(key, e[2]), detail::parse_double(key, e[3])};
            }
        }
    }
    if (!have_alpha || !have_omega) throw std::invalid_argument("field config requires alpha and omega");
    return FieldSpec(alpha, omega, noise);
}

}  // namespace lce
