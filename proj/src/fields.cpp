#include "o3cp1/fields.hpp"

#include <string>

namespace o3cp1 {

void require_unit_field(const SpinField& n, const Lattice& lat, const char* what) {
    if (n.size() != lat.volume())
        throw ValidationError(std::string(what) + ": field size does not match lattice");
    for (std::size_t x = 0; x < n.size(); ++x)
        if (!(std::abs(n[x].squaredNorm() - 1.0) <= 1e-9))
            throw ValidationError(std::string(what) + ": spin at site " + std::to_string(x) +
                                  " is not unit norm");
}

void require_unit_field(const CP1Field& z, const Lattice& lat, const char* what) {
    if (z.size() != lat.volume())
        throw ValidationError(std::string(what) + ": field size does not match lattice");
    for (std::size_t x = 0; x < z.size(); ++x)
        if (!(std::abs(z[x].squaredNorm() - 1.0) <= 1e-9))
            throw ValidationError(std::string(what) + ": spinor at site " + std::to_string(x) +
                                  " is not unit norm");
}

void require_finite(const GaugeField& a, const Lattice& lat, const char* what) {
    if (a.size() != lat.n_links())
        throw ValidationError(std::string(what) + ": gauge field size does not match lattice");
    for (double v : a.values())
        if (!std::isfinite(v))
            throw ValidationError(std::string(what) + ": gauge field has non-finite entries");
}

SpinField random_spin_field(const Lattice& lat, Rng& rng) {
    SpinField n(lat.volume());
    for (auto& v : n) v = random_unit_vector(rng);
    return n;
}

CP1Field random_cp1_field(const Lattice& lat, Rng& rng) {
    CP1Field z(lat.volume());
    for (auto& v : z) v = random_unit_spinor(rng);
    return z;
}

SpinField constant_spin_field(const Lattice& lat, const Vector3d& n) {
    return SpinField(lat.volume(), n.normalized());
}

CP1Field constant_cp1_field(const Lattice& lat, const Spinord& z) {
    return CP1Field(lat.volume(), normalized(z));
}

SpinField hopf_field(const CP1Field& z) {
    SpinField n(z.size());
    for (std::size_t x = 0; x < z.size(); ++x) n[x] = hopf_map(z[x]);
    return n;
}

}  // namespace o3cp1
