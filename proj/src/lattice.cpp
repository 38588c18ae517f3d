#include "o3cp1/lattice.hpp"

#include <sstream>

namespace o3cp1 {

Lattice::Lattice(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ValidationError("lattice dims must be non-empty");
    volume_ = 1;
    for (int d : dims_) {
        if (d < 2)
            throw ValidationError("lattice dims must all be >= 2 (got " +
                                  std::to_string(d) + ")");
        volume_ *= static_cast<std::size_t>(d);
    }

    const std::size_t D = dims_.size();
    neighbors_.resize(volume_ * D * 2);
    std::vector<int> c(D, 0);
    for (SiteIndex s = 0; s < volume_; ++s) {
        for (std::size_t mu = 0; mu < D; ++mu) {
            std::vector<int> up = c, down = c;
            up[mu] = (c[mu] + 1) % dims_[mu];
            down[mu] = (c[mu] - 1 + dims_[mu]) % dims_[mu];
            neighbors_[(s * D + mu) * 2 + 0] = index(up);
            neighbors_[(s * D + mu) * 2 + 1] = index(down);
        }
        // advance row-major counter, direction 0 fastest
        for (std::size_t mu = 0; mu < D; ++mu) {
            if (++c[mu] < dims_[mu]) break;
            c[mu] = 0;
        }
    }
}

std::vector<int> Lattice::coord(SiteIndex site) const {
    check_site(site);
    std::vector<int> c(dims_.size());
    for (std::size_t mu = 0; mu < dims_.size(); ++mu) {
        c[mu] = static_cast<int>(site % static_cast<std::size_t>(dims_[mu]));
        site /= static_cast<std::size_t>(dims_[mu]);
    }
    return c;
}

SiteIndex Lattice::index(const std::vector<int>& coord) const {
    if (coord.size() != dims_.size())
        throw ValidationError("coordinate has wrong dimension");
    SiteIndex idx = 0;
    for (std::size_t k = dims_.size(); k-- > 0;) {
        if (coord[k] < 0 || coord[k] >= dims_[k])
            throw ValidationError("coordinate out of range");
        idx = idx * static_cast<std::size_t>(dims_[k]) + static_cast<std::size_t>(coord[k]);
    }
    return idx;
}

SiteIndex Lattice::shifted(SiteIndex site, const std::vector<int>& offset) const {
    if (offset.size() != dims_.size())
        throw ValidationError("offset has wrong dimension");
    auto c = coord(site);
    for (std::size_t mu = 0; mu < c.size(); ++mu) {
        const int L = dims_[mu];
        c[mu] = ((c[mu] + offset[mu]) % L + L) % L;
    }
    return index(c);
}

LinkId Lattice::link(std::size_t link_index) const {
    if (link_index >= n_links()) throw ValidationError("link index out of range");
    return {link_index / dims_.size(), static_cast<int>(link_index % dims_.size())};
}

Lattice build_lattice(const std::vector<int>& dims) { return Lattice(dims); }

std::vector<int> parse_dims(const std::string& text) {
    std::vector<int> dims;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, text.find('x') != std::string::npos ? 'x' : ',')) {
        if (token.empty()) throw ValidationError("malformed dims '" + text + "'");
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(token, &used);
        } catch (const std::exception&) {
            throw ValidationError("malformed dims '" + text + "'");
        }
        if (used != token.size()) throw ValidationError("malformed dims '" + text + "'");
        dims.push_back(v);
    }
    if (dims.empty()) throw ValidationError("malformed dims '" + text + "'");
    return dims;
}

std::string format_dims(const std::vector<int>& dims) {
    std::string out;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k) out += 'x';
        out += std::to_string(dims[k]);
    }
    return out;
}

}  // namespace o3cp1
