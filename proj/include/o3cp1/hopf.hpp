#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "o3cp1/lattice.hpp"

namespace o3cp1 {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Complex 2-spinor (z1, z2). std::complex stores (Re, Im) contiguously, so
/// the four real coordinates are exactly the Re/Im pairs of the measure.
template <typename Scalar>
using Spinor = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

using Vector3d = Vector3<double>;
using Spinord = Spinor<double>;

/// Standard Pauli matrices, sigma[0..2] = (sigma_x, sigma_y, sigma_z).
template <typename Scalar>
std::array<Matrix2c<Scalar>, 3> pauli_matrices() {
    using C = std::complex<Scalar>;
    const C i(0, 1);
    std::array<Matrix2c<Scalar>, 3> s;
    s[0] << C(0), C(1), C(1), C(0);
    s[1] << C(0), -i, i, C(0);
    s[2] << C(1), C(0), C(0), C(-1);
    return s;
}

/// Polar chart z = (r e^{i alpha}, s e^{i beta}).
template <typename Scalar>
struct PolarPoint {
    Scalar r{};
    Scalar s{};
    Scalar alpha{};
    Scalar beta{};
    /// true when r or s vanishes and the corresponding phase is undefined (stored as 0)
    bool degenerate = false;
};

template <typename Scalar>
Scalar wrap_angle(Scalar a) {
    constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    a = std::fmod(a, two_pi);
    if (a < 0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    return a;
}

template <typename Scalar>
void require_unit(const Spinor<Scalar>& z, double tol, const char* what) {
    if (!(std::abs(static_cast<double>(z.squaredNorm()) - 1.0) <= tol))
        throw ValidationError(std::string(what) + ": spinor is not normalized");
}

/// n = z^dagger sigma z with the standard Pauli matrices, written out in components.
template <typename Scalar>
Vector3<Scalar> hopf_map(const Spinor<Scalar>& z) {
    require_unit(z, 1e-9, "hopf_map");
    const std::complex<Scalar> w = std::conj(z(0)) * z(1);
    return {2 * w.real(), 2 * w.imag(), std::norm(z(0)) - std::norm(z(1))};
}

/// Same map, but computed as the literal sandwich z^dagger sigma^a z.
template <typename Scalar>
Vector3<Scalar> hopf_map_pauli(const Spinor<Scalar>& z) {
    const auto sigma = pauli_matrices<Scalar>();
    Vector3<Scalar> n;
    for (int a = 0; a < 3; ++a) n(a) = (z.adjoint() * sigma[a] * z)(0, 0).real();
    return n;
}

/// (2rs cos(alpha-beta), -2rs sin(alpha-beta), r^2 - s^2)
template <typename Scalar>
Vector3<Scalar> hopf_from_polar(const PolarPoint<Scalar>& p) {
    const Scalar phi = p.alpha - p.beta;
    return {2 * p.r * p.s * std::cos(phi), -2 * p.r * p.s * std::sin(phi),
            p.r * p.r - p.s * p.s};
}

template <typename Scalar>
PolarPoint<Scalar> to_polar(const Spinor<Scalar>& z) {
    require_unit(z, 1e-9, "to_polar");
    PolarPoint<Scalar> p;
    p.r = std::abs(z(0));
    p.s = std::abs(z(1));
    p.degenerate = p.r == Scalar(0) || p.s == Scalar(0);
    p.alpha = p.r == Scalar(0) ? Scalar(0) : wrap_angle(std::arg(z(0)));
    p.beta = p.s == Scalar(0) ? Scalar(0) : wrap_angle(std::arg(z(1)));
    return p;
}

template <typename Scalar>
Spinor<Scalar> from_polar(const PolarPoint<Scalar>& p) {
    if (std::abs(static_cast<double>(p.r * p.r + p.s * p.s) - 1.0) > 1e-9)
        throw ValidationError("from_polar: r^2 + s^2 != 1");
    return {std::polar(p.r, p.alpha), std::polar(p.s, p.beta)};
}

/// Jacobian of (Re z1, Im z1, Re z2, Im z2) with respect to (r, alpha, s, beta).
template <typename Scalar>
Scalar jacobian_polar(Scalar r, Scalar s) {
    return r * s;
}

/// The 4-vector of real coordinates for given polar coordinates (no normalization
/// requirement; used by finite-difference checks off the unit sphere).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> polar_to_real4(Scalar r, Scalar alpha, Scalar s, Scalar beta) {
    return {r * std::cos(alpha), r * std::sin(alpha), s * std::cos(beta), s * std::sin(beta)};
}

template <typename Scalar>
Spinor<Scalar> normalized(const Spinor<Scalar>& z) {
    return z / z.norm();
}

}  // namespace o3cp1
