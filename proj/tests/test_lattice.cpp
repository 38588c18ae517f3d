#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "o3cp1/lattice.hpp"

using namespace o3cp1;

TEST_CASE("build_lattice volumes and link counts") {
    CHECK(build_lattice({4}).volume() == 4);
    CHECK(build_lattice({4}).n_links() == 4);
    CHECK(build_lattice({8, 8}).volume() == 64);
    CHECK(build_lattice({8, 8}).n_links() == 128);
    CHECK(build_lattice({2, 2, 2}).volume() == 8);
    CHECK(build_lattice({2, 2, 2}).n_links() == 24);
}

TEST_CASE("build_lattice rejects empty dims and extents below 2") {
    CHECK_THROWS_AS(build_lattice({}), ValidationError);
    CHECK_THROWS_AS(build_lattice({1}), ValidationError);
    CHECK_THROWS_AS(build_lattice({4, 1}), ValidationError);
    CHECK_THROWS_AS(build_lattice({0, 4}), ValidationError);
    CHECK_THROWS_WITH_AS(build_lattice({3, -2}), doctest::Contains("2"), ValidationError);
}

TEST_CASE("neighbor wraps periodically with row-major indexing") {
    const Lattice chain({4});
    CHECK(chain.neighbor(3, 0, +1) == 0);
    CHECK(chain.neighbor(0, 0, -1) == 3);
    const Lattice sq({2, 2});
    CHECK(sq.neighbor(0, 1, +1) == 2);
    CHECK(sq.neighbor(0, 0, +1) == 1);
}

TEST_CASE("neighbor rejects out-of-range arguments") {
    const Lattice lat({4, 4});
    CHECK_THROWS_AS(lat.neighbor(16, 0, 1), ValidationError);
    CHECK_THROWS_AS(lat.neighbor(0, 2, 1), ValidationError);
    CHECK_THROWS_AS(lat.neighbor(0, -1, 1), ValidationError);
    CHECK_THROWS_AS(lat.neighbor(0, 0, 0), ValidationError);
}

TEST_CASE("neighbor is a bijection and inverts itself") {
    const Lattice lat({3, 4, 5});
    for (int mu = 0; mu < lat.dimension(); ++mu)
        for (int sign : {-1, 1}) {
            std::set<SiteIndex> image;
            for (SiteIndex x = 0; x < lat.volume(); ++x) {
                image.insert(lat.neighbor(x, mu, sign));
                CHECK(lat.neighbor(lat.neighbor(x, mu, sign), mu, -sign) == x);
            }
            CHECK(image.size() == lat.volume());
        }
}

TEST_CASE("coordinate round trip") {
    const Lattice lat({3, 4, 2});
    for (SiteIndex x = 0; x < lat.volume(); ++x) CHECK(lat.index(lat.coord(x)) == x);
    CHECK(lat.index({1, 0, 0}) == 1);
    CHECK(lat.index({0, 1, 0}) == 3);
    CHECK(lat.index({0, 0, 1}) == 12);
    CHECK_THROWS_AS(lat.index({3, 0, 0}), ValidationError);
    CHECK_THROWS_AS(lat.index({0, 0}), ValidationError);
}

TEST_CASE("links enumerate site-major") {
    const Lattice lat({4, 3});
    for (std::size_t l = 0; l < lat.n_links(); ++l) {
        const LinkId id = lat.link(l);
        CHECK(lat.link_index(id) == l);
    }
    CHECK(lat.link_index({5, 1}) == 11);
    CHECK_THROWS_AS(lat.link(lat.n_links()), ValidationError);
}

TEST_CASE("forward_diff examples") {
    const Lattice chain({4});
    const std::vector<double> f = {0, 1, 2, 3};
    CHECK(forward_diff(chain, f, 1, 0) == 1.0);
    CHECK(forward_diff(chain, f, 3, 0) == -3.0);
    const std::vector<double> flat(4, 2.5);
    for (SiteIndex x = 0; x < 4; ++x) CHECK(forward_diff(chain, flat, x, 0) == 0.0);
}

TEST_CASE("forward differences telescope to zero") {
    const Lattice lat({5, 3});
    std::vector<double> f(lat.volume());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(1.7 * k) + 0.1 * k * k;
    for (int mu = 0; mu < lat.dimension(); ++mu) {
        double sum = 0.0;
        for (SiteIndex x = 0; x < lat.volume(); ++x) sum += forward_diff(lat, f, x, mu);
        CHECK(std::abs(sum) < 1e-12);
    }
}

TEST_CASE("shifted displaces by arbitrary vectors") {
    const Lattice lat({4, 4});
    CHECK(lat.shifted(0, {2, 0}) == 2);
    CHECK(lat.shifted(0, {-1, -1}) == 15);
    CHECK(lat.shifted(5, {4, 8}) == 5);
}

TEST_CASE("parse_dims accepts x and comma separators") {
    CHECK(parse_dims("8x8") == std::vector<int>{8, 8});
    CHECK(parse_dims("4,4,4") == std::vector<int>{4, 4, 4});
    CHECK(parse_dims("2") == std::vector<int>{2});
    CHECK(format_dims({8, 8}) == "8x8");
    CHECK_THROWS_AS(parse_dims("8xa"), ValidationError);
    CHECK_THROWS_AS(parse_dims(""), ValidationError);
}
