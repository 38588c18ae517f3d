#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace o3cp1 {

/// Raised for malformed inputs anywhere in the library.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using SiteIndex = std::size_t;

struct LinkId {
    SiteIndex site = 0;
    int mu = 0;
};

/// Periodic hypercubic lattice with unit spacing.
///
/// Sites are indexed row-major with direction 0 running fastest:
/// index = c[0] + dims[0] * (c[1] + dims[1] * (c[2] + ...)).
/// Link (site, mu) connects site to its +mu neighbor; link index is
/// site * D + mu.
class Lattice {
public:
    explicit Lattice(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int dimension() const { return static_cast<int>(dims_.size()); }
    std::size_t volume() const { return volume_; }
    std::size_t n_links() const { return volume_ * dims_.size(); }

    std::vector<int> coord(SiteIndex site) const;
    SiteIndex index(const std::vector<int>& coord) const;

    /// Site shifted by `sign` (+1 or -1) along `mu`, wrapped periodically.
    SiteIndex neighbor(SiteIndex site, int mu, int sign) const {
        check_site(site);
        check_mu(mu);
        if (sign != 1 && sign != -1)
            throw ValidationError("neighbor: sign must be +1 or -1");
        return neighbors_[(site * dims_.size() + static_cast<std::size_t>(mu)) * 2 +
                          (sign > 0 ? 0 : 1)];
    }

    /// Site displaced by an arbitrary integer vector.
    SiteIndex shifted(SiteIndex site, const std::vector<int>& offset) const;

    std::size_t link_index(const LinkId& link) const {
        check_site(link.site);
        check_mu(link.mu);
        return link.site * dims_.size() + static_cast<std::size_t>(link.mu);
    }
    LinkId link(std::size_t link_index) const;

    void check_site(SiteIndex site) const {
        if (site >= volume_)
            throw ValidationError("site index " + std::to_string(site) + " out of range");
    }
    void check_mu(int mu) const {
        if (mu < 0 || mu >= dimension())
            throw ValidationError("direction " + std::to_string(mu) + " out of range");
    }

    bool operator==(const Lattice& other) const { return dims_ == other.dims_; }

private:
    std::vector<int> dims_;
    std::size_t volume_ = 0;
    std::vector<SiteIndex> neighbors_;
};

Lattice build_lattice(const std::vector<int>& dims);

/// field(neighbor(site, mu, +1)) - field(site). Works for any entry type
/// supporting subtraction (scalars, Eigen vectors, spinors).
template <typename Field>
auto forward_diff(const Lattice& lat, const Field& field, SiteIndex site, int mu) {
    const SiteIndex up = lat.neighbor(site, mu, +1);
    using Entry = std::decay_t<decltype(field[site])>;
    return Entry(field[up] - field[site]);
}

/// Parses "8x8" or "4,4,4" into a dims vector.
std::vector<int> parse_dims(const std::string& text);
std::string format_dims(const std::vector<int>& dims);

}  // namespace o3cp1
