#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <vector>

#include "o3cp1/hopf.hpp"
#include "o3cp1/lattice.hpp"

namespace o3cp1 {

using Rng = std::mt19937_64;

/// Per-site unit 3-vectors (the Neel field).
using SpinField = std::vector<Vector3d>;
/// Per-site unit complex 2-spinors.
using CP1Field = std::vector<Spinord>;

/// Real noncompact gauge field, one value per link, indexed by Lattice::link_index.
class GaugeField {
public:
    GaugeField() = default;
    explicit GaugeField(const Lattice& lat) : values_(lat.n_links(), 0.0) {}

    double& operator()(const Lattice& lat, SiteIndex site, int mu) {
        return values_[lat.link_index({site, mu})];
    }
    double operator()(const Lattice& lat, SiteIndex site, int mu) const {
        return values_[lat.link_index({site, mu})];
    }
    double& operator[](std::size_t link) { return values_[link]; }
    double operator[](std::size_t link) const { return values_[link]; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    std::vector<double> values_;
};

inline constexpr double kUnitTolerance = 1e-12;

void require_unit_field(const SpinField& n, const Lattice& lat, const char* what);
void require_unit_field(const CP1Field& z, const Lattice& lat, const char* what);
void require_finite(const GaugeField& a, const Lattice& lat, const char* what);

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform on S^3: four independent standard normals, normalized.
inline Spinord random_unit_spinor(Rng& rng) {
    for (;;) {
        const double a = standard_normal(rng), b = standard_normal(rng);
        const double c = standard_normal(rng), d = standard_normal(rng);
        const double norm = std::sqrt(a * a + b * b + c * c + d * d);
        if (norm == 0.0) continue;
        return Spinord(std::complex<double>(a / norm, b / norm), std::complex<double>(c / norm, d / norm));
    }
}

/// Uniform on S^2: three standard normals, normalized.
inline Vector3d random_unit_vector(Rng& rng) {
    for (;;) {
        Vector3d v(standard_normal(rng), standard_normal(rng), standard_normal(rng));
        const double norm = v.norm();
        if (norm == 0.0) continue;
        return v / norm;
    }
}

/// Haar-random SU(2) matrix [[a, -conj(b)], [b, conj(a)]] with (a, b) uniform on S^3.
inline Matrix2c<double> random_su2(Rng& rng) {
    const Spinord u = random_unit_spinor(rng);
    Matrix2c<double> m;
    m << u(0), -std::conj(u(1)), u(1), std::conj(u(0));
    return m;
}

/// Haar-random rotation built from a random unit quaternion.
inline Eigen::Matrix3d random_rotation(Rng& rng) {
    const Spinord u = random_unit_spinor(rng);
    Eigen::Quaterniond q(u(0).real(), u(0).imag(), u(1).real(), u(1).imag());
    return q.normalized().toRotationMatrix();
}

SpinField random_spin_field(const Lattice& lat, Rng& rng);
CP1Field random_cp1_field(const Lattice& lat, Rng& rng);
SpinField constant_spin_field(const Lattice& lat, const Vector3d& n);
CP1Field constant_cp1_field(const Lattice& lat, const Spinord& z);

/// Site-wise Hopf map of a CP1 field.
SpinField hopf_field(const CP1Field& z);

}  // namespace o3cp1
